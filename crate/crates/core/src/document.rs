//! Versioned model document: both fitted models plus provenance, stored as
//! TOML. Floats are written in shortest round-trip form, so a load/save
//! cycle reproduces the file byte for byte.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::area_model::{fit_area_model, AreaFitOptions, AreaModel};
use crate::dataset::Corpus;
use crate::energy_model::{fit_energy_model, EnergyFitOptions, EnergyModel};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

const SAMPLE_MODEL: &str = include_str!("../data/sample_model.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub format_version: u32,
    pub provenance: DocumentProvenance,
    pub energy: EnergyModel,
    pub area: AreaModel,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DocumentProvenance {
    pub source: String,
    pub records: usize,
    /// Caller-supplied timestamp; never filled in implicitly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub calibrations: Vec<CalibrationEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "lowercase")]
pub enum CalibrationEntry {
    Energy {
        tech_nm: f64,
        enob: f64,
        throughput_sps: f64,
        measured_pj: f64,
    },
    Area {
        tech_nm: f64,
        throughput_sps: f64,
        energy_pj: f64,
        measured_um2: f64,
    },
}

impl ModelDocument {
    /// Ships without a fitting step: the published area coefficients, and
    /// energy coefficients fitted to the bundled sample survey.
    pub fn reference() -> Self {
        let sample = Self::sample();
        ModelDocument {
            format_version: FORMAT_VERSION,
            provenance: DocumentProvenance {
                source: "reference".into(),
                records: 0,
                created: None,
                calibrations: Vec::new(),
            },
            energy: sample.energy,
            area: AreaModel::reference(),
        }
    }

    /// Models fitted to the bundled synthetic survey.
    pub fn sample() -> Self {
        Self::from_toml_str(SAMPLE_MODEL).expect("bundled sample model is valid")
    }

    pub fn fit(
        corpus: &Corpus,
        energy_options: &EnergyFitOptions,
        area_options: &AreaFitOptions,
    ) -> Result<Self> {
        let energy = fit_energy_model(corpus, energy_options)?;
        let measured: Vec<f64> = corpus.iter().map(|r| r.energy_pj).collect();
        let area = fit_area_model(corpus, &measured, area_options)?;
        Ok(ModelDocument {
            format_version: FORMAT_VERSION,
            provenance: DocumentProvenance {
                source: corpus.provenance().source.clone(),
                records: corpus.len(),
                created: None,
                calibrations: Vec::new(),
            },
            energy,
            area,
        })
    }

    pub fn converged(&self) -> bool {
        self.energy.fit_meta.as_ref().is_none_or(|m| m.converged)
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::FormatVersion {
                found: self.format_version,
                expected: FORMAT_VERSION,
            });
        }
        self.energy.validate()?;
        self.area.validate()
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("model document serializes")
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let doc: ModelDocument = toml::from_str(text).map_err(|e| Error::Parse {
            path: "<model>".into(),
            message: e.to_string(),
        })?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Parse { message, .. } => Error::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_toml_string()).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_is_valid_and_round_trips() {
        let doc = ModelDocument::reference();
        doc.validate().unwrap();
        let text = doc.to_toml_string();
        let back = ModelDocument::from_toml_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_toml_string(), text);
    }

    #[test]
    fn wrong_version_rejected() {
        let text = ModelDocument::reference()
            .to_toml_string()
            .replace("format_version = 1", "format_version = 9");
        assert!(matches!(
            ModelDocument::from_toml_str(&text),
            Err(Error::FormatVersion { found: 9, .. })
        ));
    }

    #[test]
    fn awkward_floats_round_trip() {
        let mut doc = ModelDocument::reference();
        doc.energy.quantile_shift = -1.0 / 3.0;
        doc.area.c0 = 1e-300;
        doc.area.decile_factor = 0.1 + 0.2;
        doc.provenance.calibrations.push(CalibrationEntry::Energy {
            tech_nm: 32.0,
            enob: 7.3,
            throughput_sps: 1.3e9,
            measured_pj: 2.0f64.sqrt(),
        });
        let text = doc.to_toml_string();
        let back = ModelDocument::from_toml_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_toml_string(), text);
    }
}
