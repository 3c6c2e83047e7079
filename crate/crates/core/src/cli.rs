//! The `adcmodel` command line.
//!
//! Exit codes: 0 success, 2 input or configuration error, 3 energy fit did
//! not converge (the model is still written, flagged in its metadata).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::area_model::{
    calibrate_area, correlation_report, AreaFitOptions, DEFAULT_AREA_QUANTILE,
};
use crate::config::{load_arch_configs, load_workloads};
use crate::curves::{export_curves, survey_points};
use crate::dataset::{
    load_corpus, pareto_filter, ColumnMapping, NodeScaling, DEFAULT_ENOB_BUCKETS,
};
use crate::document::{CalibrationEntry, ModelDocument};
use crate::dse::{self, sweep_configs, sweep_n_adcs, Models};
use crate::energy_model::{
    calibrate_energy, EnergyFitOptions, EnergyQueryPoint, DEFAULT_ENERGY_QUANTILE,
};
use crate::error::Error;
use crate::estimator::{estimate, AdcQuery};
use crate::stats;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

pub const CURVES_HEADER: &str = "# adcmodel curves v1";
pub const DSE_CONFIGS_HEADER: &str = "# adcmodel dse-configs v1";
pub const DSE_SWEEP_HEADER: &str = "# adcmodel dse-n-adcs v1";
pub const POINTS_HEADER: &str = "# adcmodel survey-points v1";

#[derive(Debug, Parser)]
#[command(
    name = "adcmodel",
    version,
    about = "ADC energy/area estimation and CiM design-space exploration"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DseMode {
    Configs,
    NAdcs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Energy,
    Area,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit energy and area models to a survey file.
    Fit {
        #[arg(long)]
        dataset: PathBuf,
        /// Column mapping (`canonical = source` lines).
        #[arg(long)]
        schema: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Residual quantile the energy model sits on.
        #[arg(long, default_value_t = DEFAULT_ENERGY_QUANTILE)]
        quantile: f64,
        #[arg(long, default_value_t = DEFAULT_AREA_QUANTILE)]
        area_quantile: f64,
        /// Fit only near-Pareto records at this slack.
        #[arg(long)]
        pareto_slack: Option<f64>,
        /// Provenance timestamp recorded in the model file.
        #[arg(long)]
        created: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Estimate per-ADC energy and area.
    Estimate {
        /// Model file; the built-in reference model when omitted.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        n_adcs: u32,
        #[arg(long)]
        total_throughput: f64,
        #[arg(long)]
        tech_nm: f64,
        #[arg(long)]
        enob: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Match the model to one measured ADC and rewrite the model file.
    Calibrate {
        #[arg(long)]
        model: PathBuf,
        /// Output path; defaults to rewriting --model.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        target: Target,
        #[arg(long)]
        tech_nm: f64,
        /// Per-ADC throughput of the reference ADC.
        #[arg(long)]
        throughput: f64,
        #[arg(long)]
        enob: Option<f64>,
        /// Energy per convert used by area calibration; estimated from
        /// --enob when omitted.
        #[arg(long)]
        energy_pj: Option<f64>,
        /// Measured pJ/convert (energy) or µm² (area).
        #[arg(long)]
        measured: f64,
    },
    /// Energy and area versus throughput for plotting.
    ExportCurves {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        tech_nm: f64,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ENOB_BUCKETS)]
        enob: Vec<f64>,
        #[arg(long)]
        throughput_min: f64,
        #[arg(long)]
        throughput_max: f64,
        /// Log-spaced samples per decade of throughput.
        #[arg(long, default_value_t = 50.0)]
        points_per_decade: f64,
        /// Shortest round-trip floats instead of 6 significant digits.
        #[arg(long)]
        full_precision: bool,
    },
    /// Survey records scaled to one node and bucketed by ENOB.
    ExportPoints {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        schema: Option<PathBuf>,
        #[arg(long)]
        tech_nm: f64,
        #[arg(long)]
        pareto_slack: Option<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_ENOB_BUCKETS)]
        enob_buckets: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        energy_exponent: f64,
        #[arg(long, default_value_t = 1.0)]
        area_exponent: f64,
    },
    /// Accelerator-level sweeps.
    Dse {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        arch: PathBuf,
        #[arg(long)]
        workloads: PathBuf,
        #[arg(long, value_enum, default_value_t = DseMode::Configs)]
        mode: DseMode,
        /// Base config for n-adcs mode (first in file by default).
        #[arg(long)]
        config: Option<String>,
        /// Workload for n-adcs mode (first in file by default).
        #[arg(long)]
        workload: Option<String>,
        #[arg(long, value_delimiter = ',', default_values_t = dse::DEFAULT_N_ADCS)]
        n_values: Vec<u32>,
        #[arg(long, default_value_t = dse::DEFAULT_THROUGHPUT_RANGE_SPS.0)]
        throughput_min: f64,
        #[arg(long, default_value_t = dse::DEFAULT_THROUGHPUT_RANGE_SPS.1)]
        throughput_max: f64,
        #[arg(long, default_value_t = dse::DEFAULT_THROUGHPUT_POINTS)]
        throughput_points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long)]
        full_precision: bool,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(CliError::Model(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
        Err(CliError::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

#[derive(Debug)]
enum CliError {
    Model(Error),
    Io(std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Model(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult = std::result::Result<i32, CliError>;

/// Six significant digits, or shortest round-trip when `full`.
pub fn num(x: f64, full: bool) -> String {
    if full {
        format!("{x:e}")
    } else {
        format!("{x:.5e}")
    }
}

fn load_model(path: Option<&Path>) -> crate::error::Result<ModelDocument> {
    match path {
        Some(p) => ModelDocument::load(p),
        None => Ok(ModelDocument::reference()),
    }
}

fn load_mapping(path: Option<&Path>) -> crate::error::Result<ColumnMapping> {
    path.map_or_else(|| Ok(ColumnMapping::default()), ColumnMapping::from_file)
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    match command {
        Command::Fit {
            dataset,
            schema,
            out: model_path,
            quantile,
            area_quantile,
            pareto_slack,
            created,
            format,
        } => {
            let mapping = load_mapping(schema.as_deref())?;
            let report = load_corpus(&dataset, &mapping)?;
            for d in &report.diagnostics {
                writeln!(err, "{d}")?;
            }
            let mut corpus = report.corpus;
            if let Some(slack) = pareto_slack {
                corpus = pareto_filter(&corpus, slack)?;
            }
            let mut doc = ModelDocument::fit(
                &corpus,
                &EnergyFitOptions {
                    quantile,
                    ..EnergyFitOptions::default()
                },
                &AreaFitOptions {
                    quantile: area_quantile,
                },
            )?;
            doc.provenance.created = created;
            doc.save(&model_path)?;
            match format {
                Format::Json => out.write_all(to_json(&doc).as_bytes())?,
                _ => out.write_all(fit_summary(&doc, &model_path).as_bytes())?,
            }
            if doc.converged() {
                Ok(EXIT_OK)
            } else {
                writeln!(
                    err,
                    "warning: energy fit did not converge; model written with converged = false"
                )?;
                Ok(EXIT_NOT_CONVERGED)
            }
        }
        Command::Estimate {
            model,
            n_adcs,
            total_throughput,
            tech_nm,
            enob,
            format,
        } => {
            let doc = load_model(model.as_deref())?;
            let query = AdcQuery::new(n_adcs, total_throughput, tech_nm, enob)?;
            let est = estimate(&query, &doc.energy, &doc.area)?;
            let text = match format {
                Format::Json => to_json(&est),
                Format::Csv => format!(
                    "n_adcs,per_adc_throughput_sps,energy_pj_per_convert,area_um2_per_adc,total_area_um2,energy_bound_active,extrapolated\n{},{},{},{},{},{},{}\n",
                    est.n_adcs,
                    num(est.per_adc_throughput_sps, false),
                    num(est.energy_pj_per_convert, false),
                    num(est.area_um2_per_adc, false),
                    num(est.total_area_um2, false),
                    est.energy_bound_active.as_str(),
                    est.extrapolated
                ),
                Format::Text => {
                    let mut s = String::new();
                    let _ = writeln!(s, "n_adcs                  {}", est.n_adcs);
                    let _ = writeln!(s, "per_adc_throughput_sps  {}", num(est.per_adc_throughput_sps, false));
                    let _ = writeln!(s, "energy_pj_per_convert   {}", num(est.energy_pj_per_convert, false));
                    let _ = writeln!(s, "area_um2_per_adc        {}", num(est.area_um2_per_adc, false));
                    let _ = writeln!(s, "total_area_um2          {}", num(est.total_area_um2, false));
                    let _ = writeln!(s, "energy_bound_active     {}", est.energy_bound_active.as_str());
                    if est.extrapolated {
                        let _ = writeln!(s, "note: operating point outside the fitted data range");
                    }
                    s
                }
            };
            out.write_all(text.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Calibrate {
            model,
            out: out_path,
            target,
            tech_nm,
            throughput,
            enob,
            energy_pj,
            measured,
        } => {
            let mut doc = ModelDocument::load(&model)?;
            match target {
                Target::Energy => {
                    let enob = enob.ok_or_else(|| {
                        Error::InvalidArgument("--enob is required for energy calibration".into())
                    })?;
                    let q = EnergyQueryPoint::new(tech_nm, enob, throughput)?;
                    let calibrated = calibrate_energy(&doc.energy, &q, measured)?;
                    if calibrated != doc.energy {
                        doc.energy = calibrated;
                        doc.provenance.calibrations.push(CalibrationEntry::Energy {
                            tech_nm,
                            enob,
                            throughput_sps: throughput,
                            measured_pj: measured,
                        });
                    }
                }
                Target::Area => {
                    let energy_pj = match (energy_pj, enob) {
                        (Some(e), _) => e,
                        (None, Some(enob)) => doc
                            .energy
                            .predict_energy_pj(&EnergyQueryPoint::new(tech_nm, enob, throughput)?),
                        (None, None) => {
                            return Err(Error::InvalidArgument(
                                "area calibration needs --energy-pj or --enob".into(),
                            )
                            .into())
                        }
                    };
                    let calibrated =
                        calibrate_area(&doc.area, tech_nm, throughput, energy_pj, measured)?;
                    // A no-op calibration leaves the document untouched.
                    if calibrated != doc.area {
                        doc.area = calibrated;
                        doc.provenance.calibrations.push(CalibrationEntry::Area {
                            tech_nm,
                            throughput_sps: throughput,
                            energy_pj,
                            measured_um2: measured,
                        });
                    }
                }
            }
            let dest = out_path.unwrap_or(model);
            doc.save(&dest)?;
            writeln!(
                out,
                "calibrated {} model written to {}",
                target_name(target),
                dest.display()
            )?;
            Ok(EXIT_OK)
        }
        Command::ExportCurves {
            model,
            tech_nm,
            enob,
            throughput_min,
            throughput_max,
            points_per_decade,
            full_precision,
        } => {
            let doc = load_model(model.as_deref())?;
            let points = curve_points(throughput_min, throughput_max, points_per_decade)?;
            let rows = export_curves(
                &doc.energy,
                &doc.area,
                tech_nm,
                &enob,
                (throughput_min, throughput_max),
                points,
            )?;
            let mut s = format!(
                "{CURVES_HEADER}\nquantity,series,enob,throughput_sps,value,bound_active\n"
            );
            for r in rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    r.quantity.as_str(),
                    r.series,
                    r.enob,
                    num(r.x, full_precision),
                    num(r.y, full_precision),
                    r.bound_active.as_str()
                );
            }
            out.write_all(s.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::ExportPoints {
            dataset,
            schema,
            tech_nm,
            pareto_slack,
            enob_buckets,
            energy_exponent,
            area_exponent,
        } => {
            let mapping = load_mapping(schema.as_deref())?;
            let report = load_corpus(&dataset, &mapping)?;
            for d in &report.diagnostics {
                writeln!(err, "{d}")?;
            }
            let scaling = NodeScaling {
                energy_exponent,
                area_exponent,
            };
            let points = survey_points(
                &report.corpus,
                tech_nm,
                scaling,
                &enob_buckets,
                pareto_slack,
            )?;
            let mut s =
                format!("{POINTS_HEADER}\nid,series,enob,throughput_sps,energy_pj,area_um2\n");
            for p in points {
                let area = p.area_um2.map(|a| num(a, false)).unwrap_or_default();
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    p.id,
                    p.series,
                    p.enob,
                    num(p.throughput_sps, false),
                    num(p.energy_pj, false),
                    area
                );
            }
            out.write_all(s.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Dse {
            model,
            arch,
            workloads,
            mode,
            config,
            workload,
            n_values,
            throughput_min,
            throughput_max,
            throughput_points,
            format,
            full_precision,
        } => {
            let doc = load_model(model.as_deref())?;
            let models = Models {
                energy: &doc.energy,
                area: &doc.area,
            };
            let configs = load_arch_configs(&arch)?;
            let workloads = load_workloads(&workloads)?;
            let text = match mode {
                DseMode::Configs => {
                    let rows = sweep_configs(&workloads, &configs, models)?;
                    render_config_table(&rows, format, full_precision)
                }
                DseMode::NAdcs => {
                    let base = pick(&configs, config.as_deref(), |c| &c.name, "config")?;
                    let w = pick(&workloads, workload.as_deref(), |w| &w.name, "workload")?;
                    if throughput_points == 0 || throughput_min > throughput_max {
                        return Err(Error::InvalidArgument("empty throughput range".into()).into());
                    }
                    let throughputs =
                        stats::log_space(throughput_min, throughput_max, throughput_points);
                    let sweep = sweep_n_adcs(w, base, &n_values, &throughputs, models)?;
                    render_sweep(&sweep, format, full_precision)
                }
            };
            out.write_all(text.as_bytes())?;
            Ok(EXIT_OK)
        }
    }
}

/// Samples per series: `decades · points_per_decade`, at least one.
pub fn curve_points(lo: f64, hi: f64, points_per_decade: f64) -> crate::error::Result<usize> {
    if !(points_per_decade.is_finite() && points_per_decade > 0.0) {
        return Err(Error::InvalidArgument(
            "--points-per-decade must be > 0".into(),
        ));
    }
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::InvalidArgument(format!(
            "empty throughput range [{lo}, {hi}]"
        )));
    }
    Ok((((hi / lo).log10() * points_per_decade).round() as usize).max(1))
}

fn target_name(t: Target) -> &'static str {
    match t {
        Target::Energy => "energy",
        Target::Area => "area",
    }
}

fn pick<'a, T>(
    items: &'a [T],
    name: Option<&str>,
    key: impl Fn(&T) -> &String,
    what: &str,
) -> crate::error::Result<&'a T> {
    match name {
        None => Ok(&items[0]),
        Some(n) => items
            .iter()
            .find(|i| key(i) == n)
            .ok_or_else(|| Error::InvalidArgument(format!("no {what} named `{n}`"))),
    }
}

fn fit_summary(doc: &ModelDocument, path: &Path) -> String {
    let mut s = String::new();
    let e = &doc.energy;
    let _ = writeln!(s, "model written to {}", path.display());
    let _ = writeln!(s, "records                 {}", doc.provenance.records);
    let _ = writeln!(
        s,
        "minimum-energy bound    a0={} a1={} a2={}",
        num(e.min_bound.a0, false),
        num(e.min_bound.a1, false),
        num(e.min_bound.a2, false)
    );
    let _ = writeln!(
        s,
        "tradeoff bound          b0={} b1={} b2={} b3={}",
        num(e.tradeoff_bound.b0, false),
        num(e.tradeoff_bound.b1, false),
        num(e.tradeoff_bound.b2, false),
        num(e.tradeoff_bound.b3, false)
    );
    let _ = writeln!(
        s,
        "energy quantile shift   {} (q={})",
        num(e.quantile_shift, false),
        e.quantile
    );
    if let Some(m) = &e.fit_meta {
        let _ = writeln!(
            s,
            "energy fit              {} iterations, converged={}, {} min-bound / {} tradeoff records",
            m.iterations, m.converged, m.records_min_bound, m.records_tradeoff_bound
        );
        for w in &m.warnings {
            let _ = writeln!(s, "warning                 {w}");
        }
    }
    let a = &doc.area;
    let _ = writeln!(
        s,
        "area model              c0={} c_tech={} c_thr={} c_energy={} decile_factor={}",
        num(a.c0, false),
        num(a.c_tech, false),
        num(a.c_thr, false),
        num(a.c_energy, false),
        num(a.decile_factor, false)
    );
    match correlation_report(a) {
        Ok(r) => {
            let _ = writeln!(
                s,
                "area correlation        r(enob)={} r(energy)={} improvement={} over {} records",
                num(r.r_enob, false),
                num(r.r_energy, false),
                num(r.improvement, false),
                r.records
            );
        }
        Err(e) => {
            let _ = writeln!(s, "area correlation        unavailable: {e}");
        }
    }
    s
}

fn render_config_table(rows: &[dse::DseResult], format: Format, full: bool) -> String {
    match format {
        Format::Json => to_json(&rows),
        Format::Csv => {
            let mut s = format!(
                "{DSE_CONFIGS_HEADER}\nworkload,config,n_adcs,total_adc_throughput_sps,converts,utilization,energy_pj_per_convert,adc_energy_pj,non_adc_energy_pj,total_energy_pj,adc_area_um2,total_area_um2,eap_pj_um2\n"
            );
            for r in rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.workload,
                    r.config,
                    r.n_adcs,
                    num(r.total_adc_throughput_sps, full),
                    r.converts,
                    num(r.utilization, full),
                    num(r.adc.energy_pj_per_convert, full),
                    num(r.adc_energy_pj, full),
                    num(r.non_adc_energy_pj, full),
                    num(r.total_energy_pj, full),
                    num(r.adc_area_um2, full),
                    num(r.total_area_um2, full),
                    num(r.eap, full)
                );
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "{:<14} {:<8} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}\n",
                "workload", "config", "util", "adc_pJ", "non_adc_pJ", "total_pJ", "area_um2", "eap"
            );
            for r in rows {
                let _ = writeln!(
                    s,
                    "{:<14} {:<8} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
                    r.workload,
                    r.config,
                    num(r.utilization, full),
                    num(r.adc_energy_pj, full),
                    num(r.non_adc_energy_pj, full),
                    num(r.total_energy_pj, full),
                    num(r.total_area_um2, full),
                    num(r.eap, full)
                );
            }
            s
        }
    }
}

fn render_sweep(sweep: &dse::NAdcSweep, format: Format, full: bool) -> String {
    match format {
        Format::Json => to_json(sweep),
        Format::Csv => {
            let mut s = format!(
                "{DSE_SWEEP_HEADER}\nworkload,config,total_adc_throughput_sps,n_adcs,per_adc_throughput_sps,energy_pj_per_convert,energy_bound,total_energy_pj,total_area_um2,eap_pj_um2,argmin_n_adcs,eap_ratio\n"
            );
            let per_row = sweep.cells.len() / sweep.summaries.len();
            for (i, r) in sweep.cells.iter().enumerate() {
                let summary = &sweep.summaries[i / per_row];
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    r.workload,
                    r.config,
                    num(r.total_adc_throughput_sps, full),
                    r.n_adcs,
                    num(r.adc.per_adc_throughput_sps, full),
                    num(r.adc.energy_pj_per_convert, full),
                    r.adc.energy_bound_active.as_str(),
                    num(r.total_energy_pj, full),
                    num(r.total_area_um2, full),
                    num(r.eap, full),
                    summary.argmin_n_adcs,
                    num(summary.eap_ratio, full)
                );
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "{:>14} {:>8} {:>14} {:>14} {:>10}\n",
                "throughput", "best_n", "min_eap", "max_eap", "ratio"
            );
            for t in &sweep.summaries {
                let _ = writeln!(
                    s,
                    "{:>14} {:>8} {:>14} {:>14} {:>10}",
                    num(t.total_adc_throughput_sps, full),
                    t.argmin_n_adcs,
                    num(t.min_eap, full),
                    num(t.max_eap, full),
                    format!("{:.3}", t.eap_ratio)
                );
            }
            let _ = writeln!(
                s,
                "max EAP ratio across ADC counts: {:.3}",
                sweep.max_eap_ratio()
            );
            s
        }
    }
}
