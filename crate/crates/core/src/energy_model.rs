//! Two-bound energy-per-conversion model.
//!
//! Log10 energy is the larger of a throughput-independent floor (the
//! minimum-energy bound) and a bound that rises with throughput (the
//! energy-throughput tradeoff). Both are linear in log10 tech node and in
//! ENOB, so energy grows exponentially with resolution.

use serde::{Deserialize, Serialize};

use crate::dataset::Corpus;
use crate::error::{ensure_positive, Error, Result};
use crate::stats::{self, ResidualStats};

pub const DEFAULT_ENERGY_QUANTILE: f64 = 0.1;
pub const MAX_FIT_ITERATIONS: usize = 20;

/// Lower limit applied to slopes that must stay strictly positive.
const MIN_SLOPE: f64 = 1e-6;

/// `log10 E = a0 + a1·log10(tech) + a2·enob`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinEnergyBound {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
}

/// `log10 E = b0 + b1·log10(tech) + b2·enob + b3·log10(throughput)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffBound {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyBound {
    Minimum,
    Tradeoff,
}

impl EnergyBound {
    pub fn as_str(self) -> &'static str {
        match self {
            EnergyBound::Minimum => "minimum",
            EnergyBound::Tradeoff => "tradeoff",
        }
    }
}

/// Closed ranges of the predictors seen during fitting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRanges {
    pub tech_nm: [f64; 2],
    pub enob: [f64; 2],
    pub throughput_sps: [f64; 2],
}

impl FitRanges {
    fn of(corpus: &Corpus) -> Self {
        let span = |f: fn(&crate::dataset::AdcRecord) -> f64| {
            corpus
                .iter()
                .map(f)
                .fold([f64::INFINITY, f64::NEG_INFINITY], |[lo, hi], v| {
                    [lo.min(v), hi.max(v)]
                })
        };
        FitRanges {
            tech_nm: span(|r| r.tech_nm),
            enob: span(|r| r.enob),
            throughput_sps: span(|r| r.throughput_sps),
        }
    }

    pub fn contains(&self, q: &EnergyQueryPoint) -> bool {
        let within = |[lo, hi]: [f64; 2], v: f64| lo <= v && v <= hi;
        within(self.tech_nm, q.tech_nm)
            && within(self.enob, q.enob)
            && within(self.throughput_sps, q.per_adc_throughput_sps)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyFitMeta {
    pub records_min_bound: usize,
    pub records_tradeoff_bound: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Log10 residuals of the records against the unshifted model.
    pub residuals: ResidualStats,
    pub ranges: FitRanges,
    #[serde(default)]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyModel {
    pub min_bound: MinEnergyBound,
    pub tradeoff_bound: TradeoffBound,
    /// Residual quantile pinned to zero by `quantile_shift` at fit time.
    pub quantile: f64,
    /// Log10 offset added to both bounds.
    pub quantile_shift: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_meta: Option<EnergyFitMeta>,
}

/// Per-ADC inputs to the energy model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyQueryPoint {
    pub tech_nm: f64,
    pub enob: f64,
    pub per_adc_throughput_sps: f64,
}

impl EnergyQueryPoint {
    pub fn new(tech_nm: f64, enob: f64, per_adc_throughput_sps: f64) -> Result<Self> {
        let q = EnergyQueryPoint {
            tech_nm,
            enob,
            per_adc_throughput_sps,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("tech_nm", self.tech_nm)?;
        ensure_positive("enob", self.enob)?;
        ensure_positive("throughput", self.per_adc_throughput_sps)
    }
}

impl EnergyModel {
    pub fn new(min_bound: MinEnergyBound, tradeoff_bound: TradeoffBound) -> Result<Self> {
        let model = EnergyModel {
            min_bound,
            tradeoff_bound,
            quantile: DEFAULT_ENERGY_QUANTILE,
            quantile_shift: 0.0,
            fit_meta: None,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        let MinEnergyBound { a0, a1, a2 } = self.min_bound;
        let TradeoffBound { b0, b1, b2, b3 } = self.tradeoff_bound;
        if ![a0, a1, a2, b0, b1, b2, b3, self.quantile_shift]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::InvalidArgument(
                "energy coefficients must be finite".into(),
            ));
        }
        let fail = |m: &str| Err(Error::InvalidArgument(format!("energy model: {m}")));
        if b3 <= 0.0 {
            return fail("tradeoff throughput slope b3 must be > 0");
        }
        if a2 <= 0.0 || b2 <= 0.0 {
            return fail("ENOB slopes a2 and b2 must be > 0");
        }
        if b2 < a2 {
            return fail("b2 must be >= a2");
        }
        if !(0.0..=1.0).contains(&self.quantile) {
            return fail("quantile must lie in [0, 1]");
        }
        Ok(())
    }

    pub fn log_min_bound(&self, tech_nm: f64, enob: f64) -> f64 {
        let m = &self.min_bound;
        m.a0 + m.a1 * tech_nm.log10() + m.a2 * enob
    }

    pub fn log_tradeoff_bound(&self, q: &EnergyQueryPoint) -> f64 {
        let t = &self.tradeoff_bound;
        t.b0 + t.b1 * q.tech_nm.log10() + t.b2 * q.enob + t.b3 * q.per_adc_throughput_sps.log10()
    }

    fn log_unshifted(&self, q: &EnergyQueryPoint) -> (f64, EnergyBound) {
        let floor = self.log_min_bound(q.tech_nm, q.enob);
        let tradeoff = self.log_tradeoff_bound(q);
        if tradeoff > floor {
            (tradeoff, EnergyBound::Tradeoff)
        } else {
            (floor, EnergyBound::Minimum)
        }
    }

    /// Log10 pJ per conversion.
    pub fn predict_log_energy(&self, q: &EnergyQueryPoint) -> f64 {
        self.log_unshifted(q).0 + self.quantile_shift
    }

    pub fn predict_energy_pj(&self, q: &EnergyQueryPoint) -> f64 {
        10f64.powf(self.predict_log_energy(q))
    }

    /// Which bound sets the energy at `q`; ties report the minimum bound.
    pub fn active_bound(&self, q: &EnergyQueryPoint) -> EnergyBound {
        self.log_unshifted(q).1
    }

    /// Throughput at which the two bounds meet.
    pub fn corner_throughput(&self, tech_nm: f64, enob: f64) -> f64 {
        let m = &self.min_bound;
        let t = &self.tradeoff_bound;
        let log_tech = tech_nm.log10();
        10f64.powf((m.a0 - t.b0 + (m.a1 - t.b1) * log_tech + (m.a2 - t.b2) * enob) / t.b3)
    }

    pub fn is_extrapolating(&self, q: &EnergyQueryPoint) -> bool {
        self.fit_meta
            .as_ref()
            .is_some_and(|m| !m.ranges.contains(q))
    }
}

/// Shifts the model so it reproduces `measured_pj` at `reference`.
/// Slopes are untouched, so ratios between any two queries are preserved.
pub fn calibrate_energy(
    model: &EnergyModel,
    reference: &EnergyQueryPoint,
    measured_pj: f64,
) -> Result<EnergyModel> {
    ensure_positive("measured energy", measured_pj)?;
    reference.validate()?;
    let current = model.predict_energy_pj(reference);
    let mut out = model.clone();
    out.quantile_shift += measured_pj.log10() - current.log10();
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyFitOptions {
    /// Residual quantile that the fitted model sits on.
    pub quantile: f64,
    pub max_iterations: usize,
}

impl Default for EnergyFitOptions {
    fn default() -> Self {
        EnergyFitOptions {
            quantile: DEFAULT_ENERGY_QUANTILE,
            max_iterations: MAX_FIT_ITERATIONS,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Side {
    Min,
    Tradeoff,
}

struct Point {
    log_tech: f64,
    enob: f64,
    log_thr: f64,
    log_energy: f64,
}

/// Segmented log-space regression of the two bounds.
///
/// Records start on the minimum bound if their throughput is at or below
/// the median of their (rounded) ENOB group, otherwise on the tradeoff
/// bound. Each round fits both bounds by least squares and moves every
/// record to the bound with the smaller absolute residual, until the split
/// stops changing. The result is then shifted so the requested residual
/// quantile sits at zero.
pub fn fit_energy_model(corpus: &Corpus, options: &EnergyFitOptions) -> Result<EnergyModel> {
    if !(0.0..=1.0).contains(&options.quantile) {
        return Err(Error::InvalidArgument(format!(
            "quantile must lie in [0, 1], got {}",
            options.quantile
        )));
    }
    let points: Vec<Point> = corpus
        .iter()
        .map(|r| Point {
            log_tech: r.tech_nm.log10(),
            enob: r.enob,
            log_thr: r.throughput_sps.log10(),
            log_energy: r.energy_pj.log10(),
        })
        .collect();
    check_identifiable(&points)?;

    let mut warnings = Vec::new();
    let use_tech = points.iter().any(|p| p.log_tech != points[0].log_tech);
    if !use_tech {
        warnings.push("single technology node in corpus; tech slopes fixed at 0".to_string());
    }

    let mut sides = initial_split(&points);
    let (mut min_bound, mut tradeoff_bound) = fit_partitions(&points, &sides, use_tech)?;
    let mut iterations = 1;
    let mut converged = false;
    loop {
        let next = reassign(&points, &min_bound, &tradeoff_bound);
        if next == sides {
            converged = true;
            break;
        }
        if iterations >= options.max_iterations {
            warnings.push(format!(
                "partition not stable after {iterations} iterations"
            ));
            break;
        }
        match fit_partitions(&points, &next, use_tech) {
            Ok((m, t)) => {
                min_bound = m;
                tradeoff_bound = t;
                sides = next;
                iterations += 1;
            }
            Err(e) => {
                warnings.push(format!("stopped at iteration {iterations}: {e}"));
                break;
            }
        }
    }

    project_to_valid(&mut min_bound, &mut tradeoff_bound, &mut warnings);

    let mut model = EnergyModel {
        min_bound,
        tradeoff_bound,
        quantile: options.quantile,
        quantile_shift: 0.0,
        fit_meta: None,
    };
    let residuals: Vec<f64> = corpus
        .iter()
        .zip(&points)
        .map(|(r, p)| {
            let q = EnergyQueryPoint {
                tech_nm: r.tech_nm,
                enob: r.enob,
                per_adc_throughput_sps: r.throughput_sps,
            };
            p.log_energy - model.predict_log_energy(&q)
        })
        .collect();
    model.quantile_shift = stats::quantile(&residuals, options.quantile);
    let records_min_bound = sides.iter().filter(|s| **s == Side::Min).count();
    model.fit_meta = Some(EnergyFitMeta {
        records_min_bound,
        records_tradeoff_bound: sides.len() - records_min_bound,
        iterations,
        converged,
        residuals: ResidualStats::from_residuals(&residuals),
        ranges: FitRanges::of(corpus),
        warnings,
    });
    Ok(model)
}

fn check_identifiable(points: &[Point]) -> Result<()> {
    const COEFFICIENTS: usize = 7;
    if points.len() < 2 * COEFFICIENTS {
        return Err(Error::DegenerateCorpus(format!(
            "{} records, need at least {}",
            points.len(),
            2 * COEFFICIENTS
        )));
    }
    let first_enob = points[0].enob;
    if points.iter().all(|p| p.enob == first_enob) {
        return Err(Error::DegenerateCorpus("single ENOB value".into()));
    }
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.log_thr), hi.max(p.log_thr))
        });
    if hi - lo < 2.0 {
        return Err(Error::DegenerateCorpus(format!(
            "throughput spans {:.2} decades, need at least 2",
            hi - lo
        )));
    }
    Ok(())
}

fn initial_split(points: &[Point]) -> Vec<Side> {
    let mut medians = std::collections::BTreeMap::new();
    for p in points {
        medians
            .entry(p.enob.round() as i64)
            .or_insert_with(Vec::new)
            .push(p.log_thr);
    }
    let medians: std::collections::BTreeMap<i64, f64> = medians
        .into_iter()
        .map(|(k, v)| (k, stats::median(&v)))
        .collect();
    points
        .iter()
        .map(|p| {
            if p.log_thr <= medians[&(p.enob.round() as i64)] {
                Side::Min
            } else {
                Side::Tradeoff
            }
        })
        .collect()
}

fn fit_partitions(
    points: &[Point],
    sides: &[Side],
    use_tech: bool,
) -> Result<(MinEnergyBound, TradeoffBound)> {
    let design = |side: Side| {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for (p, s) in points.iter().zip(sides) {
            if *s != side {
                continue;
            }
            let mut row = vec![1.0];
            if use_tech {
                row.push(p.log_tech);
            }
            row.push(p.enob);
            if side == Side::Tradeoff {
                row.push(p.log_thr);
            }
            rows.push(row);
            y.push(p.log_energy);
        }
        (rows, y)
    };
    let (rows, y) = design(Side::Min);
    let c = stats::ols(&rows, &y).map_err(|e| tag(e, "minimum-energy bound"))?;
    let min_bound = if use_tech {
        MinEnergyBound {
            a0: c[0],
            a1: c[1],
            a2: c[2],
        }
    } else {
        MinEnergyBound {
            a0: c[0],
            a1: 0.0,
            a2: c[1],
        }
    };
    let (rows, y) = design(Side::Tradeoff);
    let c = stats::ols(&rows, &y).map_err(|e| tag(e, "tradeoff bound"))?;
    let tradeoff_bound = if use_tech {
        TradeoffBound {
            b0: c[0],
            b1: c[1],
            b2: c[2],
            b3: c[3],
        }
    } else {
        TradeoffBound {
            b0: c[0],
            b1: 0.0,
            b2: c[1],
            b3: c[2],
        }
    };
    Ok((min_bound, tradeoff_bound))
}

fn tag(e: Error, which: &str) -> Error {
    match e {
        Error::DegenerateCorpus(m) => Error::DegenerateCorpus(format!("{which}: {m}")),
        other => other,
    }
}

fn reassign(points: &[Point], m: &MinEnergyBound, t: &TradeoffBound) -> Vec<Side> {
    points
        .iter()
        .map(|p| {
            let r_min = p.log_energy - (m.a0 + m.a1 * p.log_tech + m.a2 * p.enob);
            let r_thr =
                p.log_energy - (t.b0 + t.b1 * p.log_tech + t.b2 * p.enob + t.b3 * p.log_thr);
            if r_min.abs() <= r_thr.abs() {
                Side::Min
            } else {
                Side::Tradeoff
            }
        })
        .collect()
}

fn project_to_valid(m: &mut MinEnergyBound, t: &mut TradeoffBound, warnings: &mut Vec<String>) {
    if t.b3 < MIN_SLOPE {
        warnings.push(format!("b3 = {} projected to {MIN_SLOPE}", t.b3));
        t.b3 = MIN_SLOPE;
    }
    if m.a2 < MIN_SLOPE {
        warnings.push(format!("a2 = {} projected to {MIN_SLOPE}", m.a2));
        m.a2 = MIN_SLOPE;
    }
    if t.b2 < MIN_SLOPE {
        warnings.push(format!("b2 = {} projected to {MIN_SLOPE}", t.b2));
        t.b2 = MIN_SLOPE;
    }
    if t.b2 < m.a2 {
        // Round-off on equal slopes is not worth a warning.
        if m.a2 - t.b2 > 1e-9 {
            warnings.push(format!("b2 = {} projected to a2 = {}", t.b2, m.a2));
        }
        t.b2 = m.a2;
    }
}
