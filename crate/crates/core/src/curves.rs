//! Plot data: model curves of energy and area versus throughput, and
//! survey points normalised to one technology node.

use serde::Serialize;

use crate::area_model::AreaModel;
use crate::dataset::{enob_bucket, pareto_filter, scale_to_node, Corpus, NodeScaling};
use crate::energy_model::{EnergyBound, EnergyModel, EnergyQueryPoint};
use crate::error::{ensure_positive, Error, Result};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    EnergyPj,
    AreaUm2,
}

impl Quantity {
    pub fn as_str(self) -> &'static str {
        match self {
            Quantity::EnergyPj => "energy_pj",
            Quantity::AreaUm2 => "area_um2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub quantity: Quantity,
    /// Series label, e.g. `8b`.
    pub series: String,
    pub enob: f64,
    /// Per-ADC throughput in conversions/s.
    pub x: f64,
    pub y: f64,
    pub bound_active: EnergyBound,
}

pub fn series_label(enob: f64) -> String {
    format!("{enob}b")
}

/// Energy and area curves over `points` log-spaced throughputs in
/// `[lo, hi]`, one series per ENOB. Energy rows come first, then area rows,
/// each grouped by series in the order given.
pub fn export_curves(
    energy: &EnergyModel,
    area: &AreaModel,
    tech_nm: f64,
    enobs: &[f64],
    throughput_range: (f64, f64),
    points: usize,
) -> Result<Vec<CurvePoint>> {
    let (lo, hi) = throughput_range;
    ensure_positive("tech_nm", tech_nm)?;
    ensure_positive("throughput min", lo)?;
    ensure_positive("throughput max", hi)?;
    if enobs.is_empty() || points == 0 || hi < lo || (points > 1 && hi == lo) {
        return Err(Error::InvalidArgument(format!(
            "empty curve range: {} ENOB values, {points} points over [{lo}, {hi}]",
            enobs.len()
        )));
    }
    let xs = stats::log_space(lo, hi, points);
    let mut energy_rows = Vec::with_capacity(enobs.len() * points);
    let mut area_rows = Vec::with_capacity(enobs.len() * points);
    for &enob in enobs {
        let series = series_label(enob);
        for &x in &xs {
            let q = EnergyQueryPoint::new(tech_nm, enob, x)?;
            let e = energy.predict_energy_pj(&q);
            let bound_active = energy.active_bound(&q);
            energy_rows.push(CurvePoint {
                quantity: Quantity::EnergyPj,
                series: series.clone(),
                enob,
                x,
                y: e,
                bound_active,
            });
            area_rows.push(CurvePoint {
                quantity: Quantity::AreaUm2,
                series: series.clone(),
                enob,
                x,
                y: area.predict_area(tech_nm, x, e)?,
                bound_active,
            });
        }
    }
    energy_rows.extend(area_rows);
    Ok(energy_rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurveyPoint {
    pub id: String,
    pub series: String,
    pub enob: f64,
    pub throughput_sps: f64,
    pub energy_pj: f64,
    pub area_um2: Option<f64>,
}

/// Survey records moved to `tech_nm`, optionally reduced to the near-Pareto
/// set, and labelled with their nearest ENOB bucket.
pub fn survey_points(
    corpus: &Corpus,
    tech_nm: f64,
    scaling: NodeScaling,
    buckets: &[f64],
    pareto_slack: Option<f64>,
) -> Result<Vec<SurveyPoint>> {
    let scaled: Vec<_> = corpus
        .iter()
        .map(|r| scale_to_node(r, tech_nm, scaling))
        .collect::<Result<_>>()?;
    let mut scaled = Corpus::new(scaled, corpus.provenance().clone())?;
    if let Some(slack) = pareto_slack {
        scaled = pareto_filter(&scaled, slack)?;
    }
    scaled
        .iter()
        .map(|r| {
            let bucket = enob_bucket(r.enob, buckets)
                .ok_or_else(|| Error::InvalidArgument("no ENOB buckets".into()))?;
            Ok(SurveyPoint {
                id: r.id.clone(),
                series: series_label(bucket),
                enob: r.enob,
                throughput_sps: r.throughput_sps,
                energy_pj: r.energy_pj,
                area_um2: r.area_um2,
            })
        })
        .collect()
}
