//! Architecture-level ADC energy and area estimation.
//!
//! Four inputs describe a bank of ADCs: how many there are, their total
//! conversion rate, the technology node and the effective resolution
//! (ENOB). The [`estimator`] splits the rate across ADCs, evaluates the
//! two-bound [`energy_model`], and feeds that energy into the
//! [`area_model`]. Both models are fitted to a survey of published ADCs
//! loaded through [`dataset`]. [`dse`] builds accelerator-level sweeps on
//! top of the estimates.

pub mod area_model;
pub mod cli;
pub mod config;
pub mod curves;
pub mod dataset;
pub mod document;
pub mod dse;
pub mod energy_model;
pub mod error;
pub mod estimator;
pub mod stats;
pub mod synthetic;

pub use area_model::{
    calibrate_area, correlation_report, fit_area_model, AreaFitOptions, AreaModel,
    CorrelationReport,
};
pub use dataset::{
    load_corpus, pareto_filter, scale_to_node, AdcRecord, ColumnMapping, Corpus, NodeScaling,
};
pub use document::ModelDocument;
pub use dse::{
    adc_converts, evaluate, sweep_configs, sweep_n_adcs, ArchConfig, DseResult, Models, Preset,
    Workload,
};
pub use energy_model::{
    calibrate_energy, fit_energy_model, EnergyBound, EnergyFitOptions, EnergyModel,
    EnergyQueryPoint, MinEnergyBound, TradeoffBound,
};
pub use error::{Error, Result};
pub use estimator::{estimate, per_adc_throughput, AdcEstimate, AdcQuery};
