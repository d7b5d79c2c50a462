use std::ffi::{CStr, CString};
use std::ptr;

use fsl_rt::fsl::{rt_fsl, FslPresentation};
use fsl_rt::{Precision, RootContext};
use fsl_rt_ffi::*;

fn context(r: i64) -> *mut FslrtContext {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { fslrt_context_new(r, FSLRT_PRECISION_STANDARD, &mut h) }, FSLRT_OK);
    assert!(!h.is_null());
    h
}

fn tetra1() -> *mut FslrtPresentation {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { fslrt_presentation_tetra1(&mut p) }, FSLRT_OK);
    p
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(fslrt_last_error()) }.to_str().unwrap().to_owned()
}

#[test]
fn sixj_routes_match_through_the_abi() {
    let ctx = context(7);
    let colors = [2i64; 6];
    let mut a = FslrtValue::default();
    let mut b = FslrtValue::default();
    unsafe {
        assert_eq!(fslrt_sixj(ctx, colors.as_ptr(), 0, &mut a), FSLRT_OK);
        assert_eq!(fslrt_sixj(ctx, colors.as_ptr(), 1, &mut b), FSLRT_OK);
        fslrt_context_free(ctx);
    }
    assert!((a.re - 5.85085507532714).abs() < 1e-9);
    assert!((a.re - b.re).abs() < 1e-9 && (a.im - b.im).abs() < 1e-9);
}

#[test]
fn even_level_gives_level_code_and_message() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { fslrt_context_new(8, FSLRT_PRECISION_STANDARD, &mut h) }, FSLRT_ERR_LEVEL);
    assert!(h.is_null());
    assert!(last_error().contains("r = 8"));
}

#[test]
fn unknown_precision_is_a_domain_error() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { fslrt_context_new(7, 5, &mut h) }, FSLRT_ERR_DOMAIN);
}

#[test]
fn inadmissible_colors_give_color_code() {
    let ctx = context(7);
    let colors = [0i64, 0, 2, 0, 0, 0];
    let mut v = FslrtValue::default();
    let code = unsafe { fslrt_sixj(ctx, colors.as_ptr(), 0, &mut v) };
    unsafe { fslrt_context_free(ctx) };
    assert_eq!(code, FSLRT_ERR_COLOR);
    assert!(!last_error().is_empty());
}

#[test]
fn success_clears_the_last_error() {
    let mut h = ptr::null_mut();
    unsafe { fslrt_context_new(4, FSLRT_PRECISION_STANDARD, &mut h) };
    assert!(!last_error().is_empty());
    let ctx = context(5);
    assert!(last_error().is_empty());
    unsafe { fslrt_context_free(ctx) };
}

#[test]
fn mu_r_and_null_handles() {
    let ctx = context(9);
    let want = RootContext::new(9, Precision::Standard).unwrap().mu_r();
    assert_eq!(unsafe { fslrt_mu_r(ctx) }, want);
    assert!(unsafe { fslrt_mu_r(ptr::null()) }.is_nan());
    assert_eq!(unsafe { fslrt_presentation_components(ptr::null()) }, 0);
    let mut v = FslrtValue::default();
    assert_eq!(unsafe { fslrt_sixj(ptr::null(), [0i64; 6].as_ptr(), 0, &mut v) }, FSLRT_ERR_NULL);
    unsafe {
        fslrt_context_free(ctx);
        fslrt_context_free(ptr::null_mut());
        fslrt_presentation_free(ptr::null_mut());
    }
}

#[test]
fn rt_matches_the_library() {
    let ctx = context(11);
    let pres = tetra1();
    let colors = [2i64, 4, 6];
    let mut v = FslrtValue::default();
    unsafe {
        assert_eq!(fslrt_presentation_components(pres), 3);
        assert_eq!(fslrt_rt(ctx, pres, colors.as_ptr(), 3, &mut v), FSLRT_OK);
    }
    let c = RootContext::new(11, Precision::Standard).unwrap();
    let want = rt_fsl(&c, &FslPresentation::tetra1(), &colors).unwrap();
    assert_eq!(v.logmag, want.logmag);
    assert_eq!(v.phase, want.phase);
    let mut bad = FslrtValue::default();
    assert_eq!(unsafe { fslrt_rt(ctx, pres, colors.as_ptr(), 2, &mut bad) }, FSLRT_ERR_ARITY);
    unsafe {
        fslrt_presentation_free(pres);
        fslrt_context_free(ctx);
    }
}

#[test]
fn change_of_pair_requires_a_set() {
    let ctx = context(9);
    let pres = tetra1();
    let n = [2i64];
    let m = [2i64, 2];
    let mut v = FslrtValue::default();
    unsafe {
        let code = fslrt_rt_change_of_pair(ctx, pres, n.as_ptr(), 1, m.as_ptr(), 2, &mut v);
        assert_eq!(code, FSLRT_ERR_PRESENTATION);
        let ids = [1usize];
        assert_eq!(fslrt_presentation_set_change_of_pair(pres, ids.as_ptr(), 1), FSLRT_OK);
        let code = fslrt_rt_change_of_pair(ctx, pres, n.as_ptr(), 1, m.as_ptr(), 2, &mut v);
        assert_eq!(code, FSLRT_OK);
        assert!(v.logmag.is_finite());
        let bad = [4usize];
        assert_eq!(fslrt_presentation_set_change_of_pair(pres, bad.as_ptr(), 1), FSLRT_ERR_PRESENTATION);
        fslrt_presentation_free(pres);
        fslrt_context_free(ctx);
    }
}

#[test]
fn critical_point_at_complete_structure() {
    let pres = tetra1();
    let theta = [0.0f64; 3];
    let mut out = FslrtCritical::default();
    unsafe {
        assert_eq!(fslrt_critical(pres, theta.as_ptr(), 3, &mut out), FSLRT_OK);
        fslrt_presentation_free(pres);
    }
    // twice the volume of the regular ideal octahedron
    assert!((out.volume - 7.327724753188).abs() < 1e-9, "{}", out.volume);
    assert!(out.residual < 1e-8);
}

#[test]
fn presentation_json_round_trip() {
    let text = FslPresentation::tetra1().to_json(None);
    let c = CString::new(text).unwrap();
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(fslrt_presentation_from_json(c.as_ptr(), &mut p), FSLRT_OK);
        assert_eq!(fslrt_presentation_components(p), 3);
        fslrt_presentation_free(p);
    }
    let junk = CString::new("{not json").unwrap();
    let mut q = ptr::null_mut();
    assert_eq!(unsafe { fslrt_presentation_from_json(junk.as_ptr(), &mut q) }, FSLRT_ERR_PRESENTATION);
}

#[test]
fn version_is_set() {
    let v = unsafe { CStr::from_ptr(fslrt_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/fsl_rt.h")).unwrap();
    for name in [
        "fslrt_context_new",
        "fslrt_context_free",
        "fslrt_mu_r",
        "fslrt_sixj",
        "fslrt_presentation_from_json",
        "fslrt_rt_change_of_pair",
        "fslrt_critical",
        "fslrt_last_error",
        "FSLRT_ERR_PANIC",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
