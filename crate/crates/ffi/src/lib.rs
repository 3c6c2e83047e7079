//! C ABI over the `adcmodel` estimator.
//!
//! Models are opaque `AdcmModel` handles created by `adcm_model_reference`,
//! `adcm_model_load` or `adcm_model_fit` and released with
//! `adcm_model_free`. Every fallible call returns an `AdcmStatus`; on failure
//! `adcm_last_error_message` describes the error for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use adcmodel::document::CalibrationEntry;
use adcmodel::{
    calibrate_area, calibrate_energy, estimate, load_corpus, AdcQuery, AreaFitOptions,
    ColumnMapping, EnergyBound, EnergyFitOptions, EnergyQueryPoint, Error, ModelDocument,
};

/// Opaque model handle.
pub struct AdcmModel {
    doc: ModelDocument,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdcmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Fit = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdcmBound {
    Minimum = 0,
    Tradeoff = 1,
}

/// Per-query estimate; all quantities are per convert or per ADC unless
/// prefixed with `total`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdcmEstimate {
    pub n_adcs: u32,
    pub per_adc_throughput_sps: f64,
    pub energy_pj_per_convert: f64,
    pub area_um2_per_adc: f64,
    pub total_area_um2: f64,
    pub energy_bound_active: AdcmBound,
    /// The operating point lies outside the data the model was fit on.
    pub extrapolated: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(err: &Error) -> AdcmStatus {
    match err {
        Error::Io { .. } => AdcmStatus::Io,
        Error::InvalidArgument(_) => AdcmStatus::InvalidArgument,
        Error::DegenerateCorpus(_) => AdcmStatus::Fit,
        Error::Parse { .. }
        | Error::UnmappableColumn(_)
        | Error::EmptyCorpus(_)
        | Error::MissingMetadata(_)
        | Error::FormatVersion { .. } => AdcmStatus::Parse,
    }
}

struct Failure(AdcmStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(AdcmStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, converting errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> AdcmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AdcmStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            AdcmStatus::Panic
        }
    }
}

unsafe fn model_ref<'a>(model: *const AdcmModel) -> Result<&'a AdcmModel, Failure> {
    model.as_ref().ok_or_else(|| null("model"))
}

unsafe fn model_mut<'a>(model: *mut AdcmModel) -> Result<&'a mut AdcmModel, Failure> {
    model.as_mut().ok_or_else(|| null("model"))
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, Failure> {
    if path.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map(PathBuf::from)
        .map_err(|_| {
            Failure(
                AdcmStatus::InvalidArgument,
                "path is not valid UTF-8".into(),
            )
        })
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn publish(out: *mut *mut AdcmModel, doc: ModelDocument) -> Result<(), Failure> {
    // SAFETY: caller guarantees `out` is null or valid for writes.
    unsafe { write_out(out, Box::into_raw(Box::new(AdcmModel { doc }))) }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn adcm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the most recent failed call on this thread, or an empty
/// string. The pointer stays valid until the next failing call on the
/// same thread.
#[no_mangle]
pub extern "C" fn adcm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a model with the bundled reference coefficients.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn adcm_model_reference(out: *mut *mut AdcmModel) -> AdcmStatus {
    guard(|| publish(out, ModelDocument::reference()))
}

/// Loads a model document from `path`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for writing
/// one pointer.
#[no_mangle]
pub unsafe extern "C" fn adcm_model_load(
    path: *const c_char,
    out: *mut *mut AdcmModel,
) -> AdcmStatus {
    guard(|| {
        let path = path_arg(path)?;
        publish(out, ModelDocument::load(&path)?)
    })
}

/// Fits energy and area models to a survey CSV with canonical column names.
/// Returns `ADCM_STATUS_FIT` if the corpus cannot support a fit.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid for writing
/// one pointer.
#[no_mangle]
pub unsafe extern "C" fn adcm_model_fit(
    path: *const c_char,
    out: *mut *mut AdcmModel,
) -> AdcmStatus {
    guard(|| {
        let path = path_arg(path)?;
        let report = load_corpus(&path, &ColumnMapping::default())?;
        let doc = ModelDocument::fit(
            &report.corpus,
            &EnergyFitOptions::default(),
            &AreaFitOptions::default(),
        )?;
        publish(out, doc)
    })
}

/// Writes the model document to `path`.
///
/// # Safety
/// `model` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn adcm_model_save(
    model: *const AdcmModel,
    path: *const c_char,
) -> AdcmStatus {
    guard(|| {
        let model = model_ref(model)?;
        let path = path_arg(path)?;
        model.doc.save(&path)?;
        Ok(())
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn adcm_model_free(model: *mut AdcmModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Estimates per-ADC energy and area for `n_adcs` ADCs sharing
/// `total_throughput_sps`.
///
/// # Safety
/// `model` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn adcm_estimate(
    model: *const AdcmModel,
    n_adcs: u32,
    total_throughput_sps: f64,
    tech_nm: f64,
    enob: f64,
    out: *mut AdcmEstimate,
) -> AdcmStatus {
    guard(|| {
        let doc = &model_ref(model)?.doc;
        let q = AdcQuery::new(n_adcs, total_throughput_sps, tech_nm, enob)?;
        let e = estimate(&q, &doc.energy, &doc.area)?;
        write_out(
            out,
            AdcmEstimate {
                n_adcs: e.n_adcs,
                per_adc_throughput_sps: e.per_adc_throughput_sps,
                energy_pj_per_convert: e.energy_pj_per_convert,
                area_um2_per_adc: e.area_um2_per_adc,
                total_area_um2: e.total_area_um2,
                energy_bound_active: match e.energy_bound_active {
                    EnergyBound::Minimum => AdcmBound::Minimum,
                    EnergyBound::Tradeoff => AdcmBound::Tradeoff,
                },
                extrapolated: e.extrapolated,
            },
        )
    })
}

/// Energy per convert (pJ) of one ADC.
///
/// # Safety
/// `model` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn adcm_energy_pj(
    model: *const AdcmModel,
    tech_nm: f64,
    enob: f64,
    throughput_sps: f64,
    out: *mut f64,
) -> AdcmStatus {
    guard(|| {
        let doc = &model_ref(model)?.doc;
        let q = EnergyQueryPoint::new(tech_nm, enob, throughput_sps)?;
        write_out(out, doc.energy.predict_energy_pj(&q))
    })
}

/// Area (um^2) of one ADC given its throughput and energy per convert.
///
/// # Safety
/// `model` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn adcm_area_um2(
    model: *const AdcmModel,
    tech_nm: f64,
    throughput_sps: f64,
    energy_pj: f64,
    out: *mut f64,
) -> AdcmStatus {
    guard(|| {
        let doc = &model_ref(model)?.doc;
        write_out(
            out,
            doc.area.predict_area(tech_nm, throughput_sps, energy_pj)?,
        )
    })
}

/// Throughput where the tradeoff bound overtakes the minimum-energy bound.
///
/// # Safety
/// `model` must come from this library; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn adcm_corner_throughput(
    model: *const AdcmModel,
    tech_nm: f64,
    enob: f64,
    out: *mut f64,
) -> AdcmStatus {
    guard(|| {
        let doc = &model_ref(model)?.doc;
        EnergyQueryPoint::new(tech_nm, enob, 1.0)?;
        write_out(out, doc.energy.corner_throughput(tech_nm, enob))
    })
}

/// Shifts the energy model so it predicts `measured_pj` at the given point.
/// A calibration that changes nothing is not recorded.
///
/// # Safety
/// `model` must come from this library and not be shared across threads
/// during the call.
#[no_mangle]
pub unsafe extern "C" fn adcm_calibrate_energy(
    model: *mut AdcmModel,
    tech_nm: f64,
    enob: f64,
    throughput_sps: f64,
    measured_pj: f64,
) -> AdcmStatus {
    guard(|| {
        let doc = &mut model_mut(model)?.doc;
        let q = EnergyQueryPoint::new(tech_nm, enob, throughput_sps)?;
        let calibrated = calibrate_energy(&doc.energy, &q, measured_pj)?;
        if calibrated != doc.energy {
            doc.energy = calibrated;
            doc.provenance.calibrations.push(CalibrationEntry::Energy {
                tech_nm,
                enob,
                throughput_sps,
                measured_pj,
            });
        }
        Ok(())
    })
}

/// Scales the area model so it predicts `measured_um2` at the given point.
/// A calibration that changes nothing is not recorded.
///
/// # Safety
/// `model` must come from this library and not be shared across threads
/// during the call.
#[no_mangle]
pub unsafe extern "C" fn adcm_calibrate_area(
    model: *mut AdcmModel,
    tech_nm: f64,
    throughput_sps: f64,
    energy_pj: f64,
    measured_um2: f64,
) -> AdcmStatus {
    guard(|| {
        let doc = &mut model_mut(model)?.doc;
        let calibrated =
            calibrate_area(&doc.area, tech_nm, throughput_sps, energy_pj, measured_um2)?;
        if calibrated != doc.area {
            doc.area = calibrated;
            doc.provenance.calibrations.push(CalibrationEntry::Area {
                tech_nm,
                throughput_sps,
                energy_pj,
                measured_um2,
            });
        }
        Ok(())
    })
}
