//! Per-ADC area regression on technology node, throughput and energy per
//! conversion, calibrated down to the low-area end of the survey.

use serde::{Deserialize, Serialize};

use crate::dataset::Corpus;
use crate::error::{ensure_positive, Error, Result};
use crate::stats;

pub const DEFAULT_AREA_QUANTILE: f64 = 0.1;
pub const MIN_AREA_RECORDS: usize = 20;

/// Published reference coefficients: `21.1 · tech^1.0 · throughput^0.2 · energy^0.3`.
pub const REFERENCE_SCALE_UM2: f64 = 21.1;
pub const REFERENCE_TECH_EXPONENT: f64 = 1.0;
pub const REFERENCE_THROUGHPUT_EXPONENT: f64 = 0.2;
pub const REFERENCE_ENERGY_EXPONENT: f64 = 0.3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaFitMeta {
    pub records: usize,
    pub quantile: f64,
    /// Pearson r between predicted and measured log10 area.
    pub r_energy: f64,
    /// Same, for a regression that uses ENOB instead of log10 energy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_enob: Option<f64>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

/// `area = decile_factor · 10^c0 · tech^c_tech · throughput^c_thr · energy^c_energy`
/// with tech in nm, throughput in conversions/s, energy in pJ and area in µm².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaModel {
    pub c0: f64,
    pub c_tech: f64,
    pub c_thr: f64,
    pub c_energy: f64,
    pub decile_factor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_meta: Option<AreaFitMeta>,
}

impl Default for AreaModel {
    fn default() -> Self {
        Self::reference()
    }
}

impl AreaModel {
    pub fn reference() -> Self {
        AreaModel {
            c0: REFERENCE_SCALE_UM2.log10(),
            c_tech: REFERENCE_TECH_EXPONENT,
            c_thr: REFERENCE_THROUGHPUT_EXPONENT,
            c_energy: REFERENCE_ENERGY_EXPONENT,
            decile_factor: 1.0,
            fit_meta: None,
        }
    }

    /// Checks coefficient invariants. `decile_factor` only has to be
    /// positive here: user calibration may legitimately push it above 1.
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.c0,
            self.c_tech,
            self.c_thr,
            self.c_energy,
            self.decile_factor,
        ];
        if !all.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidArgument(
                "area coefficients must be finite".into(),
            ));
        }
        if self.c_tech < 0.0 || self.c_thr < 0.0 || self.c_energy < 0.0 {
            return Err(Error::InvalidArgument("area exponents must be >= 0".into()));
        }
        if self.decile_factor <= 0.0 {
            return Err(Error::InvalidArgument("decile_factor must be > 0".into()));
        }
        Ok(())
    }

    fn log_uncalibrated(&self, tech_nm: f64, throughput_sps: f64, energy_pj: f64) -> f64 {
        self.c0
            + self.c_tech * tech_nm.log10()
            + self.c_thr * throughput_sps.log10()
            + self.c_energy * energy_pj.log10()
    }

    /// Area of one ADC in µm².
    pub fn predict_area(&self, tech_nm: f64, throughput_sps: f64, energy_pj: f64) -> Result<f64> {
        ensure_positive("tech_nm", tech_nm)?;
        ensure_positive("throughput", throughput_sps)?;
        ensure_positive("energy", energy_pj)?;
        Ok(self.decile_factor
            * 10f64.powf(self.log_uncalibrated(tech_nm, throughput_sps, energy_pj)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaFitOptions {
    pub quantile: f64,
}

impl Default for AreaFitOptions {
    fn default() -> Self {
        AreaFitOptions {
            quantile: DEFAULT_AREA_QUANTILE,
        }
    }
}

/// Fits the area regression in log10 space.
///
/// `energies_pj` is indexed like `corpus.records()` and supplies the energy
/// predictor, either measured values or model estimates. Records without
/// area are skipped. Exponents that come out negative are pinned to zero
/// and the remaining ones refit.
pub fn fit_area_model(
    corpus: &Corpus,
    energies_pj: &[f64],
    options: &AreaFitOptions,
) -> Result<AreaModel> {
    if energies_pj.len() != corpus.len() {
        return Err(Error::InvalidArgument(format!(
            "{} energies for {} records",
            energies_pj.len(),
            corpus.len()
        )));
    }
    if !(0.0..=1.0).contains(&options.quantile) {
        return Err(Error::InvalidArgument(format!(
            "quantile must lie in [0, 1], got {}",
            options.quantile
        )));
    }
    let mut features = Vec::new();
    let mut enobs = Vec::new();
    let mut log_area = Vec::new();
    for (r, &e) in corpus.iter().zip(energies_pj) {
        let Some(area) = r.area_um2 else { continue };
        ensure_positive("energy", e)?;
        features.push([r.tech_nm.log10(), r.throughput_sps.log10(), e.log10()]);
        enobs.push(r.enob);
        log_area.push(area.log10());
    }
    if features.len() < MIN_AREA_RECORDS {
        return Err(Error::DegenerateCorpus(format!(
            "{} records with area, need at least {MIN_AREA_RECORDS}",
            features.len()
        )));
    }

    let mut warnings = Vec::new();
    let mut active = [true; 3];
    let coefficients = loop {
        let rows: Vec<Vec<f64>> = features
            .iter()
            .map(|f| {
                std::iter::once(1.0)
                    .chain((0..3).filter(|&j| active[j]).map(|j| f[j]))
                    .collect()
            })
            .collect();
        let beta = stats::ols(&rows, &log_area)?;
        let mut full = [beta[0], 0.0, 0.0, 0.0];
        let mut it = beta[1..].iter();
        for j in 0..3 {
            if active[j] {
                full[j + 1] = *it.next().unwrap();
            }
        }
        let worst = (0..3)
            .filter(|&j| active[j] && full[j + 1] < 0.0)
            .min_by(|&a, &b| full[a + 1].total_cmp(&full[b + 1]));
        match worst {
            Some(j) => {
                warnings.push(format!(
                    "{} exponent {} pinned to 0",
                    ["tech", "throughput", "energy"][j],
                    full[j + 1]
                ));
                active[j] = false;
            }
            None => break full,
        }
    };

    let mut model = AreaModel {
        c0: coefficients[0],
        c_tech: coefficients[1],
        c_thr: coefficients[2],
        c_energy: coefficients[3],
        decile_factor: 1.0,
        fit_meta: None,
    };
    let predicted: Vec<f64> = features
        .iter()
        .map(|f| model.c0 + model.c_tech * f[0] + model.c_thr * f[1] + model.c_energy * f[2])
        .collect();
    let ratios: Vec<f64> = predicted
        .iter()
        .zip(&log_area)
        .map(|(p, a)| 10f64.powf(a - p))
        .collect();
    model.decile_factor = stats::quantile(&ratios, options.quantile).min(1.0);

    let r_energy = stats::pearson(&predicted, &log_area);
    let enob_rows: Vec<Vec<f64>> = features
        .iter()
        .zip(&enobs)
        .map(|(f, &n)| vec![1.0, f[0], f[1], n])
        .collect();
    let r_enob = match stats::ols(&enob_rows, &log_area) {
        Ok(beta) => {
            let fitted: Vec<f64> = enob_rows
                .iter()
                .map(|row| row.iter().zip(&beta).map(|(x, b)| x * b).sum())
                .collect();
            Some(stats::pearson(&fitted, &log_area))
        }
        Err(e) => {
            warnings.push(format!("ENOB comparison regression failed: {e}"));
            None
        }
    };
    model.fit_meta = Some(AreaFitMeta {
        records: features.len(),
        quantile: options.quantile,
        r_energy,
        r_enob,
        warnings,
    });
    Ok(model)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationReport {
    pub r_energy: f64,
    pub r_enob: f64,
    /// `r_energy - r_enob`
    pub improvement: f64,
    pub records: usize,
}

/// Compares how well energy and ENOB explain area, from fit metadata.
pub fn correlation_report(model: &AreaModel) -> Result<CorrelationReport> {
    let meta = model
        .fit_meta
        .as_ref()
        .ok_or(Error::MissingMetadata("area fit metadata"))?;
    let r_enob = meta
        .r_enob
        .ok_or(Error::MissingMetadata("ENOB correlation"))?;
    Ok(CorrelationReport {
        r_energy: meta.r_energy,
        r_enob,
        improvement: meta.r_energy - r_enob,
        records: meta.records,
    })
}

/// Rescales `decile_factor` so the model reproduces `measured_um2` at the
/// reference point.
pub fn calibrate_area(
    model: &AreaModel,
    tech_nm: f64,
    throughput_sps: f64,
    energy_pj: f64,
    measured_um2: f64,
) -> Result<AreaModel> {
    ensure_positive("measured area", measured_um2)?;
    let current = model.predict_area(tech_nm, throughput_sps, energy_pj)?;
    let mut out = model.clone();
    out.decile_factor *= measured_um2 / current;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_point() {
        let m = AreaModel::reference();
        let a = m.predict_area(32.0, 1e9, 1.0).unwrap();
        let expected = 21.1 * 32.0 * 10f64.powf(1.8);
        assert!((a / expected - 1.0).abs() < 1e-9);
        assert!((a - 4.26e4).abs() < 50.0);
    }

    #[test]
    fn tech_doubles_area() {
        let m = AreaModel::reference();
        let a = m.predict_area(32.0, 1e9, 3.0).unwrap();
        let b = m.predict_area(64.0, 1e9, 3.0).unwrap();
        assert!((b / a - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unit_energy_is_neutral() {
        let mut m = AreaModel::reference();
        let a = m.predict_area(32.0, 1e9, 1.0).unwrap();
        m.c_energy = 0.9;
        assert_eq!(m.predict_area(32.0, 1e9, 1.0).unwrap(), a);
    }

    #[test]
    fn rejects_non_positive_inputs() {
        let m = AreaModel::reference();
        assert!(m.predict_area(0.0, 1e9, 1.0).is_err());
        assert!(m.predict_area(32.0, -1.0, 1.0).is_err());
        assert!(m.predict_area(32.0, 1e9, f64::NAN).is_err());
    }

    #[test]
    fn calibration() {
        let m = AreaModel::reference();
        let now = m.predict_area(28.0, 5e8, 0.4).unwrap();
        assert_eq!(calibrate_area(&m, 28.0, 5e8, 0.4, now).unwrap(), m);
        let half = calibrate_area(&m, 28.0, 5e8, 0.4, 0.5 * now).unwrap();
        assert!(
            (half.predict_area(90.0, 1e6, 7.0).unwrap() / m.predict_area(90.0, 1e6, 7.0).unwrap()
                - 0.5)
                .abs()
                < 1e-12
        );
        let cal = calibrate_area(&m, 28.0, 5e8, 0.4, 1234.0).unwrap();
        let twice = cal.predict_area(56.0, 5e8, 0.4).unwrap();
        assert!((twice / 1234.0 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn report_needs_metadata() {
        assert!(matches!(
            correlation_report(&AreaModel::reference()),
            Err(Error::MissingMetadata(_))
        ));
    }
}
