use std::ffi::{CStr, CString};
use std::ptr;

use adcmodel::{estimate, AdcQuery, ModelDocument};
use adcmodel_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(adcm_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn reference() -> *mut AdcmModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { adcm_model_reference(&mut m) }, AdcmStatus::Ok);
    assert!(!m.is_null());
    m
}

#[test]
fn estimate_matches_library() {
    let m = reference();
    let mut out = std::mem::MaybeUninit::<AdcmEstimate>::uninit();
    let status = unsafe { adcm_estimate(m, 4, 8e9, 32.0, 8.0, out.as_mut_ptr()) };
    assert_eq!(status, AdcmStatus::Ok);
    let got = unsafe { out.assume_init() };

    let doc = ModelDocument::reference();
    let want = estimate(
        &AdcQuery::new(4, 8e9, 32.0, 8.0).unwrap(),
        &doc.energy,
        &doc.area,
    )
    .unwrap();
    assert_eq!(got.n_adcs, 4);
    assert_eq!(got.per_adc_throughput_sps, 2e9);
    assert_eq!(got.energy_pj_per_convert, want.energy_pj_per_convert);
    assert_eq!(got.area_um2_per_adc, want.area_um2_per_adc);
    assert_eq!(got.total_area_um2, want.total_area_um2);
    assert_eq!(got.extrapolated, want.extrapolated);

    let mut e = 0.0;
    let mut a = 0.0;
    unsafe {
        assert_eq!(adcm_energy_pj(m, 32.0, 8.0, 2e9, &mut e), AdcmStatus::Ok);
        assert_eq!(adcm_area_um2(m, 32.0, 2e9, e, &mut a), AdcmStatus::Ok);
        adcm_model_free(m);
    }
    assert_eq!(e, got.energy_pj_per_convert);
    assert_eq!(a, got.area_um2_per_adc);
}

#[test]
fn corner_separates_bounds() {
    let m = reference();
    let mut corner = 0.0;
    assert_eq!(
        unsafe { adcm_corner_throughput(m, 32.0, 8.0, &mut corner) },
        AdcmStatus::Ok
    );
    let mut est = std::mem::MaybeUninit::<AdcmEstimate>::uninit();
    unsafe {
        adcm_estimate(m, 1, corner / 10.0, 32.0, 8.0, est.as_mut_ptr());
        assert_eq!(est.assume_init().energy_bound_active, AdcmBound::Minimum);
        adcm_estimate(m, 1, corner * 10.0, 32.0, 8.0, est.as_mut_ptr());
        assert_eq!(est.assume_init().energy_bound_active, AdcmBound::Tradeoff);
        adcm_model_free(m);
    }
}

#[test]
fn errors_map_to_status_codes() {
    let m = reference();
    let mut x = 0.0;
    unsafe {
        assert_eq!(
            adcm_energy_pj(ptr::null(), 32.0, 8.0, 1e9, &mut x),
            AdcmStatus::NullPointer
        );
        assert!(last_error().contains("model"));
        assert_eq!(
            adcm_energy_pj(m, 32.0, 8.0, 1e9, ptr::null_mut()),
            AdcmStatus::NullPointer
        );
        assert_eq!(
            adcm_energy_pj(m, -1.0, 8.0, 1e9, &mut x),
            AdcmStatus::InvalidArgument
        );
        assert!(last_error().contains("tech"), "{}", last_error());
        let mut est = std::mem::MaybeUninit::<AdcmEstimate>::uninit();
        assert_eq!(
            adcm_estimate(m, 0, 1e9, 32.0, 8.0, est.as_mut_ptr()),
            AdcmStatus::InvalidArgument
        );

        let missing = CString::new("/nonexistent/model.toml").unwrap();
        let mut h = ptr::null_mut();
        assert_eq!(adcm_model_load(missing.as_ptr(), &mut h), AdcmStatus::Io);
        assert!(h.is_null());
        assert_eq!(
            adcm_model_load(ptr::null(), &mut h),
            AdcmStatus::NullPointer
        );
        adcm_model_free(m);
        adcm_model_free(ptr::null_mut());
    }
}

#[test]
fn bad_documents_and_corpora() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "format_version = 99\n").unwrap();
    let tiny = dir.path().join("tiny.csv");
    std::fs::write(
        &tiny,
        "id,tech_nm,enob,throughput_sps,energy_pj\na,32,8,1e9,1\nb,32,9,1e8,2\n",
    )
    .unwrap();
    let mut h = ptr::null_mut();
    unsafe {
        let p = CString::new(bad.to_str().unwrap()).unwrap();
        assert_eq!(adcm_model_load(p.as_ptr(), &mut h), AdcmStatus::Parse);
        let p = CString::new(tiny.to_str().unwrap()).unwrap();
        assert_eq!(adcm_model_fit(p.as_ptr(), &mut h), AdcmStatus::Fit);
        assert!(last_error().contains("degenerate"), "{}", last_error());
    }
    assert!(h.is_null());
}

#[test]
fn calibrate_save_load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = CString::new(dir.path().join("m.toml").to_str().unwrap()).unwrap();
    let m = reference();
    let (mut e, mut a) = (0.0, 0.0);
    unsafe {
        adcm_energy_pj(m, 28.0, 9.0, 3e8, &mut e);
        adcm_area_um2(m, 28.0, 3e8, e, &mut a);
        assert_eq!(
            adcm_calibrate_energy(m, 28.0, 9.0, 3e8, 2.0 * e),
            AdcmStatus::Ok
        );
        assert_eq!(
            adcm_calibrate_area(m, 28.0, 3e8, e, 2.0 * a),
            AdcmStatus::Ok
        );
        assert_eq!(adcm_model_save(m, path.as_ptr()), AdcmStatus::Ok);
        adcm_model_free(m);

        let mut back = ptr::null_mut();
        assert_eq!(adcm_model_load(path.as_ptr(), &mut back), AdcmStatus::Ok);
        let (mut e2, mut a2) = (0.0, 0.0);
        adcm_energy_pj(back, 28.0, 9.0, 3e8, &mut e2);
        adcm_area_um2(back, 28.0, 3e8, e, &mut a2);
        adcm_model_free(back);
        assert!((e2 / e - 2.0).abs() < 1e-12);
        assert_eq!(a2, 2.0 * a);
    }
    let doc = ModelDocument::load(std::path::Path::new(path.to_str().unwrap())).unwrap();
    assert_eq!(doc.provenance.calibrations.len(), 2);
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(adcm_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/adcmodel.h"))
            .unwrap();
    for name in [
        "adcm_version",
        "adcm_last_error_message",
        "adcm_model_reference",
        "adcm_model_load",
        "adcm_model_fit",
        "adcm_model_save",
        "adcm_model_free",
        "adcm_estimate",
        "adcm_energy_pj",
        "adcm_area_um2",
        "adcm_corner_throughput",
        "adcm_calibrate_energy",
        "adcm_calibrate_area",
        "typedef struct AdcmModel AdcmModel",
        "ADCM_STATUS_FIT = 5",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
