//! Seeded synthetic survey generation, used for tests and for the bundled
//! sample dataset.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::area_model::AreaModel;
use crate::dataset::{AdcRecord, Corpus, Provenance};
use crate::energy_model::{EnergyModel, EnergyQueryPoint, MinEnergyBound, TradeoffBound};
use crate::error::Result;

/// Multiplicative scatter applied to generated values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Noise {
    None,
    /// `value · exp(N(0, sigma))`
    LogNormal {
        sigma: f64,
    },
    /// `value · 10^|N(0, sigma)|`: scatter only above the model.
    AboveLog10 {
        sigma: f64,
    },
}

impl Noise {
    fn factor(self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            Noise::None => 1.0,
            Noise::LogNormal { sigma } => Normal::new(0.0, sigma).unwrap().sample(rng).exp(),
            Noise::AboveLog10 { sigma } => {
                10f64.powf(Normal::new(0.0, sigma).unwrap().sample(rng).abs())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub records: usize,
    pub tech_nodes_nm: Vec<f64>,
    pub enob_range: (f64, f64),
    /// ENOB values are rounded to this step (0 leaves them continuous).
    pub enob_step: f64,
    pub throughput_range_sps: (f64, f64),
    pub energy_noise: Noise,
    pub area_noise: Noise,
    pub area_missing_fraction: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            records: 500,
            tech_nodes_nm: vec![16.0, 22.0, 28.0, 40.0, 65.0, 90.0, 130.0, 180.0],
            enob_range: (3.0, 14.0),
            enob_step: 0.0,
            throughput_range_sps: (1e4, 1e11),
            energy_noise: Noise::None,
            area_noise: Noise::None,
            area_missing_fraction: 0.0,
        }
    }
}

/// Generator behind the bundled sample survey: roughly 0.2 pJ per
/// conversion for an 8-bit 32 nm ADC at low speed, with a corner near
/// 5e8 conversions/s.
pub fn sample_truth() -> (EnergyModel, AreaModel) {
    let energy = EnergyModel::new(
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
    .expect("sample generator is a valid model");
    (energy, AreaModel::reference())
}

/// Survey-like settings used for the bundled sample file.
pub fn sample_spec() -> SyntheticSpec {
    SyntheticSpec {
        records: 400,
        enob_step: 0.1,
        energy_noise: Noise::AboveLog10 { sigma: 0.35 },
        area_noise: Noise::AboveLog10 { sigma: 0.3 },
        area_missing_fraction: 0.15,
        ..SyntheticSpec::default()
    }
}

pub const SAMPLE_SEED: u64 = 20_240_601;

/// Draws a corpus from the given models. Area is computed from the
/// generated (noisy) energy, matching how measured surveys relate them.
pub fn generate(
    energy: &EnergyModel,
    area: &AreaModel,
    spec: &SyntheticSpec,
    seed: u64,
) -> Result<Corpus> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo_thr, hi_thr) = (
        spec.throughput_range_sps.0.log10(),
        spec.throughput_range_sps.1.log10(),
    );
    let mut records = Vec::with_capacity(spec.records);
    for i in 0..spec.records {
        let tech = spec.tech_nodes_nm[rng.gen_range(0..spec.tech_nodes_nm.len())];
        let mut enob = rng.gen_range(spec.enob_range.0..=spec.enob_range.1);
        if spec.enob_step > 0.0 {
            enob = ((enob / spec.enob_step).round() * spec.enob_step * 1e6).round() / 1e6;
        }
        let throughput = round_sig(10f64.powf(rng.gen_range(lo_thr..=hi_thr)));
        let q = EnergyQueryPoint::new(tech, enob, throughput)?;
        let energy_pj = energy.predict_energy_pj(&q) * spec.energy_noise.factor(&mut rng);
        let area_um2 =
            area.predict_area(tech, throughput, energy_pj)? * spec.area_noise.factor(&mut rng);
        let missing = rng.gen_bool(spec.area_missing_fraction.clamp(0.0, 1.0));
        records.push(AdcRecord {
            id: format!("syn{i:04}"),
            tech_nm: tech,
            enob,
            throughput_sps: throughput,
            energy_pj,
            area_um2: (!missing).then_some(area_um2),
        });
    }
    Corpus::new(
        records,
        Provenance {
            source: format!("synthetic(seed={seed})"),
            rows_read: spec.records,
        },
    )
}

fn round_sig(x: f64) -> f64 {
    format!("{x:.6e}").parse().unwrap()
}

/// Renders a corpus as canonical CSV.
pub fn to_csv(corpus: &Corpus) -> String {
    let mut out = String::from("id,tech_nm,enob,throughput_sps,energy_pj,area_um2\n");
    for r in corpus {
        let area = r.area_um2.map(|a| format!("{a:e}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{:e},{:e},{}\n",
            r.id, r.tech_nm, r.enob, r.throughput_sps, r.energy_pj, area
        ));
    }
    out
}
