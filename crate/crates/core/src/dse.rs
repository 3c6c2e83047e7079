//! Accelerator-level exploration: ADC converts per workload, energy and
//! area of whole configurations, and sweeps over ADC count and throughput.

use serde::{Deserialize, Serialize};

use crate::area_model::AreaModel;
use crate::energy_model::EnergyModel;
use crate::error::{Error, Result};
use crate::estimator::{estimate, AdcEstimate, AdcQuery};
use crate::stats;

/// Default ADC counts for [`sweep_n_adcs`].
pub const DEFAULT_N_ADCS: [u32; 5] = [1, 2, 4, 8, 16];
/// Default total-throughput range and resolution for [`sweep_n_adcs`].
pub const DEFAULT_THROUGHPUT_RANGE_SPS: (f64, f64) = (1.3e9, 40e9);
pub const DEFAULT_THROUGHPUT_POINTS: usize = 20;

/// Analog sum size and ADC resolution of the four standard variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    S,
    M,
    L,
    XL,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::S, Preset::M, Preset::L, Preset::XL];

    pub fn sum_size(self) -> u64 {
        match self {
            Preset::S => 128,
            Preset::M => 512,
            Preset::L => 2048,
            Preset::XL => 8192,
        }
    }

    pub fn adc_enob(self) -> f64 {
        match self {
            Preset::S => 6.0,
            Preset::M => 7.0,
            Preset::L => 8.0,
            Preset::XL => 9.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::S => "S",
            Preset::M => "M",
            Preset::L => "L",
            Preset::XL => "XL",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchConfig {
    pub name: String,
    /// Most analog values accumulated per ADC convert.
    pub sum_size: u64,
    pub adc_enob: f64,
    pub n_adcs: u32,
    pub tech_nm: f64,
    pub total_adc_throughput_sps: f64,
    #[serde(default)]
    pub non_adc_energy_pj_per_mac: f64,
    #[serde(default)]
    pub non_adc_area_um2: f64,
}

impl ArchConfig {
    /// A preset variant with zero non-ADC costs.
    pub fn preset(
        preset: Preset,
        n_adcs: u32,
        tech_nm: f64,
        total_adc_throughput_sps: f64,
    ) -> Self {
        ArchConfig {
            name: preset.name().to_string(),
            sum_size: preset.sum_size(),
            adc_enob: preset.adc_enob(),
            n_adcs,
            tech_nm,
            total_adc_throughput_sps,
            non_adc_energy_pj_per_mac: 0.0,
            non_adc_area_um2: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sum_size == 0 {
            return Err(Error::InvalidArgument(format!(
                "config `{}`: sum_size must be >= 1",
                self.name
            )));
        }
        let nonneg = [self.non_adc_energy_pj_per_mac, self.non_adc_area_um2];
        if !nonneg.iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "config `{}`: non-ADC costs must be >= 0",
                self.name
            )));
        }
        self.adc_query()
            .map(|_| ())
            .map_err(|e| Error::InvalidArgument(format!("config `{}`: {e}", self.name)))
    }

    pub fn adc_query(&self) -> Result<AdcQuery> {
        AdcQuery::new(
            self.n_adcs,
            self.total_adc_throughput_sps,
            self.tech_nm,
            self.adc_enob,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Workload {
    pub name: String,
    pub total_macs: u64,
    /// Length of the dimension that can be summed in analog.
    pub reduction_dim: u64,
}

impl Workload {
    pub fn validate(&self) -> Result<()> {
        if self.total_macs == 0 || self.reduction_dim == 0 {
            return Err(Error::InvalidArgument(format!(
                "workload `{}`: sizes must be >= 1",
                self.name
            )));
        }
        if self.reduction_dim > self.total_macs {
            return Err(Error::InvalidArgument(format!(
                "workload `{}`: reduction_dim exceeds total_macs",
                self.name
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Models<'a> {
    pub energy: &'a EnergyModel,
    pub area: &'a AreaModel,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DseResult {
    pub workload: String,
    pub config: String,
    pub n_adcs: u32,
    pub total_adc_throughput_sps: f64,
    pub converts: u64,
    pub utilization: f64,
    pub adc_energy_pj: f64,
    pub non_adc_energy_pj: f64,
    pub total_energy_pj: f64,
    pub adc_area_um2: f64,
    pub total_area_um2: f64,
    /// Energy-area product in pJ·µm².
    pub eap: f64,
    pub adc: AdcEstimate,
}

/// Number of ADC converts for a workload, and how full each analog sum is.
///
/// A sum never spans more values than the reduction dimension provides, and
/// a partial sum still costs a whole convert.
pub fn adc_converts(w: &Workload, a: &ArchConfig) -> (u64, f64) {
    let effective = a.sum_size.min(w.reduction_dim);
    let utilization = effective as f64 / a.sum_size as f64;
    (w.total_macs.div_ceil(effective), utilization)
}

pub fn evaluate(w: &Workload, a: &ArchConfig, models: Models<'_>) -> Result<DseResult> {
    w.validate()?;
    a.validate()?;
    let (converts, utilization) = adc_converts(w, a);
    let adc = estimate(&a.adc_query()?, models.energy, models.area)?;
    let adc_energy_pj = converts as f64 * adc.energy_pj_per_convert;
    let non_adc_energy_pj = w.total_macs as f64 * a.non_adc_energy_pj_per_mac;
    let total_energy_pj = adc_energy_pj + non_adc_energy_pj;
    let total_area_um2 = adc.total_area_um2 + a.non_adc_area_um2;
    Ok(DseResult {
        workload: w.name.clone(),
        config: a.name.clone(),
        n_adcs: a.n_adcs,
        total_adc_throughput_sps: a.total_adc_throughput_sps,
        converts,
        utilization,
        adc_energy_pj,
        non_adc_energy_pj,
        total_energy_pj,
        adc_area_um2: adc.total_area_um2,
        total_area_um2,
        eap: total_energy_pj * total_area_um2,
        adc,
    })
}

/// Per-throughput summary of an ADC-count sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThroughputSummary {
    pub total_adc_throughput_sps: f64,
    /// ADC count with the lowest EAP; the smaller count wins ties.
    pub argmin_n_adcs: u32,
    pub min_eap: f64,
    pub max_eap: f64,
    pub eap_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NAdcSweep {
    /// Throughput-major: all ADC counts for the first throughput, then the next.
    pub cells: Vec<DseResult>,
    pub summaries: Vec<ThroughputSummary>,
}

impl NAdcSweep {
    /// Largest max/min EAP ratio over all throughputs.
    pub fn max_eap_ratio(&self) -> f64 {
        self.summaries
            .iter()
            .map(|s| s.eap_ratio)
            .fold(1.0, f64::max)
    }
}

pub fn default_throughputs() -> Vec<f64> {
    stats::log_space(
        DEFAULT_THROUGHPUT_RANGE_SPS.0,
        DEFAULT_THROUGHPUT_RANGE_SPS.1,
        DEFAULT_THROUGHPUT_POINTS,
    )
}

pub fn sweep_n_adcs(
    w: &Workload,
    base: &ArchConfig,
    n_values: &[u32],
    throughput_values: &[f64],
    models: Models<'_>,
) -> Result<NAdcSweep> {
    if n_values.is_empty() || throughput_values.is_empty() {
        return Err(Error::InvalidArgument(
            "sweep needs at least one ADC count and one throughput".into(),
        ));
    }
    let mut cells = Vec::with_capacity(n_values.len() * throughput_values.len());
    let mut summaries = Vec::with_capacity(throughput_values.len());
    for &throughput in throughput_values {
        let row_start = cells.len();
        for &n in n_values {
            let config = ArchConfig {
                n_adcs: n,
                total_adc_throughput_sps: throughput,
                ..base.clone()
            };
            cells.push(evaluate(w, &config, models)?);
        }
        let row = &cells[row_start..];
        let best = row
            .iter()
            .min_by(|a, b| a.eap.total_cmp(&b.eap).then(a.n_adcs.cmp(&b.n_adcs)))
            .expect("non-empty row");
        let max_eap = row.iter().map(|c| c.eap).fold(f64::NEG_INFINITY, f64::max);
        summaries.push(ThroughputSummary {
            total_adc_throughput_sps: throughput,
            argmin_n_adcs: best.n_adcs,
            min_eap: best.eap,
            max_eap,
            eap_ratio: if best.eap > 0.0 {
                max_eap / best.eap
            } else {
                1.0
            },
        });
    }
    Ok(NAdcSweep { cells, summaries })
}

/// Every (workload, config) pair, workload-major.
pub fn sweep_configs(
    workloads: &[Workload],
    configs: &[ArchConfig],
    models: Models<'_>,
) -> Result<Vec<DseResult>> {
    if workloads.is_empty() || configs.is_empty() {
        return Err(Error::InvalidArgument(
            "need at least one workload and one config".into(),
        ));
    }
    workloads
        .iter()
        .flat_map(|w| configs.iter().map(move |a| evaluate(w, a, models)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy_model::{MinEnergyBound, TradeoffBound};

    fn models() -> (EnergyModel, AreaModel) {
        let e = EnergyModel::new(
            MinEnergyBound {
                a0: -4.2,
                a1: 1.0,
                a2: 0.25,
            },
            TradeoffBound {
                b0: -15.25,
                b1: 1.5,
                b2: 0.45,
                b3: 1.0,
            },
        )
        .unwrap();
        (e, AreaModel::reference())
    }

    fn layer(macs: u64, red: u64) -> Workload {
        Workload {
            name: "layer".into(),
            total_macs: macs,
            reduction_dim: red,
        }
    }

    #[test]
    fn converts_and_utilization() {
        let xl = ArchConfig::preset(Preset::XL, 1, 32.0, 1e9);
        assert_eq!(adc_converts(&layer(8192, 8192), &xl), (1, 1.0));
        let (n, u) = adc_converts(&layer(1 << 20, 128), &xl);
        assert_eq!(n, 1 << 13);
        assert!((u - 128.0 / 8192.0).abs() < 1e-15);
        let mut one = xl.clone();
        one.sum_size = 1;
        assert_eq!(adc_converts(&layer(777, 1), &one), (777, 1.0));
        assert_eq!(
            adc_converts(
                &layer(1000, 300),
                &ArchConfig::preset(Preset::S, 1, 32.0, 1e9)
            )
            .0,
            8
        );
    }

    #[test]
    fn presets() {
        let pairs: Vec<_> = Preset::ALL
            .iter()
            .map(|p| (p.sum_size(), p.adc_enob()))
            .collect();
        assert_eq!(
            pairs,
            vec![(128, 6.0), (512, 7.0), (2048, 8.0), (8192, 9.0)]
        );
    }

    #[test]
    fn invalid_inputs() {
        assert!(layer(10, 20).validate().is_err());
        let mut a = ArchConfig::preset(Preset::S, 1, 32.0, 1e9);
        a.sum_size = 0;
        assert!(a.validate().is_err());
        let mut a = ArchConfig::preset(Preset::S, 0, 32.0, 1e9);
        assert!(a.validate().is_err());
        a.n_adcs = 1;
        a.non_adc_area_um2 = -1.0;
        assert!(a.validate().is_err());
    }

    #[test]
    fn adc_count_below_corner_changes_only_area() {
        let (e, ar) = models();
        let m = Models {
            energy: &e,
            area: &ar,
        };
        let w = layer(1 << 20, 4096);
        let a2 = ArchConfig::preset(Preset::M, 2, 32.0, 1e7);
        let a8 = ArchConfig {
            n_adcs: 8,
            ..a2.clone()
        };
        let r2 = evaluate(&w, &a2, m).unwrap();
        let r8 = evaluate(&w, &a8, m).unwrap();
        assert_eq!(r2.total_energy_pj, r8.total_energy_pj);
        assert!(r2.total_area_um2 < r8.total_area_um2);
    }

    #[test]
    fn result_identities() {
        let (e, ar) = models();
        let mut a = ArchConfig::preset(Preset::L, 4, 32.0, 5e9);
        a.non_adc_energy_pj_per_mac = 0.01;
        a.non_adc_area_um2 = 1e5;
        let r = evaluate(
            &layer(1 << 22, 2304),
            &a,
            Models {
                energy: &e,
                area: &ar,
            },
        )
        .unwrap();
        assert_eq!(r.total_energy_pj, r.adc_energy_pj + r.non_adc_energy_pj);
        assert_eq!(r.eap, r.total_energy_pj * r.total_area_um2);
        assert_eq!(r.total_area_um2, r.adc_area_um2 + 1e5);
    }

    #[test]
    fn degenerate_sweep() {
        let (e, ar) = models();
        let s = sweep_n_adcs(
            &layer(1 << 20, 512),
            &ArchConfig::preset(Preset::M, 1, 32.0, 1e9),
            &[4],
            &[2e9],
            Models {
                energy: &e,
                area: &ar,
            },
        )
        .unwrap();
        assert_eq!(s.cells.len(), 1);
        assert_eq!(s.summaries[0].eap_ratio, 1.0);
        assert_eq!(s.summaries[0].argmin_n_adcs, 4);
    }

    #[test]
    fn sweep_configs_rows_and_linearity() {
        let (e, ar) = models();
        let m = Models {
            energy: &e,
            area: &ar,
        };
        let configs: Vec<_> = Preset::ALL
            .iter()
            .map(|&p| ArchConfig::preset(p, 4, 32.0, 4e9))
            .collect();
        let w = layer(1 << 24, 4608);
        let rows = sweep_configs(std::slice::from_ref(&w), &configs, m).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[1], evaluate(&w, &configs[1], m).unwrap());
        let w2 = Workload {
            total_macs: 2 << 24,
            ..w.clone()
        };
        let rows2 = sweep_configs(&[w2], &configs, m).unwrap();
        for (a, b) in rows.iter().zip(&rows2) {
            assert_eq!(b.total_energy_pj, 2.0 * a.total_energy_pj);
            assert_eq!(b.total_area_um2, a.total_area_um2);
        }
        assert!(sweep_configs(&[], &configs, m).is_err());
    }
}
