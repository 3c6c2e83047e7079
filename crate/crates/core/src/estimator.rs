//! End-to-end estimate: aggregate query, per-ADC throughput, energy, then
//! area with the energy estimate as one of its inputs.

use serde::Serialize;

use crate::area_model::AreaModel;
use crate::energy_model::{EnergyBound, EnergyModel, EnergyQueryPoint};
use crate::error::{ensure_positive, Error, Result};

/// Architecture-level description of a bank of identical ADCs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdcQuery {
    pub n_adcs: u32,
    /// Conversions per second summed over all ADCs.
    pub total_throughput_sps: f64,
    pub tech_nm: f64,
    pub enob: f64,
}

impl AdcQuery {
    pub fn new(n_adcs: u32, total_throughput_sps: f64, tech_nm: f64, enob: f64) -> Result<Self> {
        let q = AdcQuery {
            n_adcs,
            total_throughput_sps,
            tech_nm,
            enob,
        };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_adcs == 0 {
            return Err(Error::InvalidArgument("n_adcs must be >= 1".into()));
        }
        ensure_positive("total throughput", self.total_throughput_sps)?;
        ensure_positive("tech_nm", self.tech_nm)?;
        ensure_positive("enob", self.enob)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AdcEstimate {
    pub n_adcs: u32,
    pub per_adc_throughput_sps: f64,
    pub energy_pj_per_convert: f64,
    pub area_um2_per_adc: f64,
    pub total_area_um2: f64,
    pub energy_bound_active: EnergyBound,
    /// The per-ADC operating point lies outside the energy fit's data range.
    pub extrapolated: bool,
}

pub fn per_adc_throughput(q: &AdcQuery) -> f64 {
    q.total_throughput_sps / f64::from(q.n_adcs)
}

pub fn estimate(q: &AdcQuery, energy: &EnergyModel, area: &AreaModel) -> Result<AdcEstimate> {
    q.validate()?;
    let per_adc = per_adc_throughput(q);
    let point = EnergyQueryPoint::new(q.tech_nm, q.enob, per_adc)?;
    let energy_pj = energy.predict_energy_pj(&point);
    let area_per_adc = area.predict_area(q.tech_nm, per_adc, energy_pj)?;
    Ok(AdcEstimate {
        n_adcs: q.n_adcs,
        per_adc_throughput_sps: per_adc,
        energy_pj_per_convert: energy_pj,
        area_um2_per_adc: area_per_adc,
        total_area_um2: f64::from(q.n_adcs) * area_per_adc,
        energy_bound_active: energy.active_bound(&point),
        extrapolated: energy.is_extrapolating(&point),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy_model::{MinEnergyBound, TradeoffBound};

    fn worked_energy() -> EnergyModel {
        EnergyModel::new(
            MinEnergyBound {
                a0: 0.0,
                a1: 0.0,
                a2: 0.3,
            },
            TradeoffBound {
                b0: -9.0,
                b1: 0.0,
                b2: 0.3,
                b3: 1.0,
            },
        )
        .unwrap()
    }

    #[test]
    fn per_adc_division() {
        assert_eq!(
            per_adc_throughput(&AdcQuery::new(16, 40e9, 32.0, 8.0).unwrap()),
            2.5e9
        );
        assert_eq!(
            per_adc_throughput(&AdcQuery::new(1, 40e9, 32.0, 8.0).unwrap()),
            40e9
        );
        assert_eq!(
            per_adc_throughput(&AdcQuery::new(2, 1.3e9, 32.0, 8.0).unwrap()),
            6.5e8
        );
    }

    #[test]
    fn zero_adcs_rejected() {
        assert!(AdcQuery::new(0, 1e9, 32.0, 8.0).is_err());
        assert!(AdcQuery::new(1, 1e9, 32.0, 0.0).is_err());
    }

    #[test]
    fn doubling_adcs_and_throughput() {
        let (e, a) = (worked_energy(), AreaModel::reference());
        let one = estimate(&AdcQuery::new(3, 3e9, 32.0, 8.0).unwrap(), &e, &a).unwrap();
        let two = estimate(&AdcQuery::new(6, 6e9, 32.0, 8.0).unwrap(), &e, &a).unwrap();
        assert_eq!(one.energy_pj_per_convert, two.energy_pj_per_convert);
        assert_eq!(one.area_um2_per_adc, two.area_um2_per_adc);
        assert_eq!(two.total_area_um2, 2.0 * one.total_area_um2);
    }

    #[test]
    fn below_corner_throughput_only_moves_area() {
        let (e, a) = (worked_energy(), AreaModel::reference());
        let lo = estimate(&AdcQuery::new(4, 1e8, 32.0, 8.0).unwrap(), &e, &a).unwrap();
        let hi = estimate(&AdcQuery::new(4, 2e8, 32.0, 8.0).unwrap(), &e, &a).unwrap();
        assert_eq!(lo.energy_pj_per_convert, hi.energy_pj_per_convert);
        assert!((hi.area_um2_per_adc / lo.area_um2_per_adc - 2f64.powf(0.2)).abs() < 1e-12);
        assert_eq!(lo.energy_bound_active, EnergyBound::Minimum);
    }

    #[test]
    fn composed_corner_point() {
        let (e, a) = (worked_energy(), AreaModel::reference());
        let est = estimate(&AdcQuery::new(1, 1e9, 1.0, 8.0).unwrap(), &e, &a).unwrap();
        let energy = 10f64.powf(2.4);
        assert!((est.energy_pj_per_convert / energy - 1.0).abs() < 1e-12);
        let area = 21.1 * 1e9f64.powf(0.2) * energy.powf(0.3);
        assert!((est.area_um2_per_adc / area - 1.0).abs() < 1e-12);
        assert!(!est.extrapolated);
    }
}
