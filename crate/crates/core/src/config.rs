//! TOML files describing accelerator configurations and workloads.
//!
//! ```toml
//! [defaults]
//! tech_nm = 32
//! total_adc_throughput_sps = 4e9
//!
//! [[config]]
//! preset = "S"          # fills name, sum_size and adc_enob
//! n_adcs = 4
//!
//! [[workload]]
//! name = "conv3_x"
//! total_macs = 115605504
//! reduction_dim = 1152
//! ```

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::dse::{ArchConfig, Preset, Workload};
use crate::error::{Error, Result};

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    name: Option<String>,
    preset: Option<Preset>,
    sum_size: Option<u64>,
    adc_enob: Option<f64>,
    n_adcs: Option<u32>,
    tech_nm: Option<f64>,
    total_adc_throughput_sps: Option<f64>,
    non_adc_energy_pj_per_mac: Option<f64>,
    non_adc_area_um2: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArchFile {
    #[serde(default)]
    defaults: Entry,
    #[serde(default)]
    config: Vec<Entry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorkloadFile {
    #[serde(default)]
    workload: Vec<Workload>,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_error(path: &Path, message: impl ToString) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

pub fn parse_arch_configs(text: &str, path: &Path) -> Result<Vec<ArchConfig>> {
    let file: ArchFile = toml::from_str(text).map_err(|e| parse_error(path, e))?;
    if file.config.is_empty() {
        return Err(parse_error(path, "no [[config]] entries"));
    }
    let d = &file.defaults;
    file.config
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let preset = e.preset.or(d.preset);
            let missing =
                |what: &str| parse_error(path, format!("config {}: missing `{what}`", i + 1));
            let config = ArchConfig {
                name: e
                    .name
                    .clone()
                    .or_else(|| e.preset.map(|p| p.name().to_string()))
                    .ok_or_else(|| missing("name"))?,
                sum_size: e
                    .sum_size
                    .or(preset.map(Preset::sum_size))
                    .or(d.sum_size)
                    .ok_or_else(|| missing("sum_size"))?,
                adc_enob: e
                    .adc_enob
                    .or(preset.map(Preset::adc_enob))
                    .or(d.adc_enob)
                    .ok_or_else(|| missing("adc_enob"))?,
                n_adcs: e.n_adcs.or(d.n_adcs).unwrap_or(1),
                tech_nm: e.tech_nm.or(d.tech_nm).ok_or_else(|| missing("tech_nm"))?,
                total_adc_throughput_sps: e
                    .total_adc_throughput_sps
                    .or(d.total_adc_throughput_sps)
                    .ok_or_else(|| missing("total_adc_throughput_sps"))?,
                non_adc_energy_pj_per_mac: e
                    .non_adc_energy_pj_per_mac
                    .or(d.non_adc_energy_pj_per_mac)
                    .unwrap_or(0.0),
                non_adc_area_um2: e.non_adc_area_um2.or(d.non_adc_area_um2).unwrap_or(0.0),
            };
            config.validate().map_err(|err| parse_error(path, err))?;
            Ok(config)
        })
        .collect()
}

pub fn parse_workloads(text: &str, path: &Path) -> Result<Vec<Workload>> {
    let file: WorkloadFile = toml::from_str(text).map_err(|e| parse_error(path, e))?;
    if file.workload.is_empty() {
        return Err(parse_error(path, "no [[workload]] entries"));
    }
    for w in &file.workload {
        w.validate().map_err(|err| parse_error(path, err))?;
    }
    Ok(file.workload)
}

pub fn load_arch_configs(path: &Path) -> Result<Vec<ArchConfig>> {
    parse_arch_configs(&read(path)?, path)
}

pub fn load_workloads(path: &Path) -> Result<Vec<Workload>> {
    parse_workloads(&read(path)?, path)
}
