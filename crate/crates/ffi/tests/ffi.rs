use std::f64::consts::{PI, SQRT_2, TAU};
use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use zollflow_ffi::*;

fn last_error() -> String {
    let n = unsafe { zf_last_error_message(ptr::null_mut(), 0) };
    let mut buf = vec![0 as std::ffi::c_char; n + 1];
    unsafe { zf_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn profile(kind: ZfSurface) -> *mut ZfProfile {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { zf_profile_new(kind, &mut p) }, ZfStatus::Ok);
    p
}

fn value(f: impl FnOnce(*mut f64) -> ZfStatus) -> f64 {
    let mut x = f64::NAN;
    assert_eq!(f(&mut x), ZfStatus::Ok, "{}", last_error());
    x
}

#[test]
fn catalog_profiles_and_their_invariants() {
    let round = profile(ZfSurface::Round);
    unsafe {
        assert!((value(|o| zf_profile_area(round, o)) - 4.0 * PI).abs() < 1e-10);
        assert!((value(|o| zf_profile_length(round, o)) - PI).abs() < 1e-12);
        assert!((value(|o| zf_profile_curvature(round, 1.0, o)) - 1.0).abs() < 1e-8);
        assert!((value(|o| zf_profile_rho(round, 0.5 * PI, o)) - 1.0).abs() < 1e-12);
        assert!(value(|o| zf_lprime_analytic(round, o)).abs() < 1e-10);
        zf_profile_free(round);
    }

    let gong = profile(ZfSurface::GongNormalized);
    unsafe {
        assert!((value(|o| zf_equator_length(gong, o)) - TAU).abs() < 1e-12);
        let s = value(|o| zf_profile_length(gong, o));
        let k = value(|o| zf_profile_curvature(gong, 0.5 * s, o));
        assert!((k - 4.0 * (2.0 - SQRT_2)).abs() < 1e-8);
        zf_profile_free(gong);
    }
}

#[test]
fn errors_carry_status_and_message() {
    let round = profile(ZfSurface::Round);
    unsafe {
        let mut x = 0.0;
        assert_eq!(zf_profile_curvature(round, -1.0, &mut x), ZfStatus::InvalidArgument);
        assert!(last_error().contains("outside"), "{}", last_error());
        assert_eq!(zf_profile_area(ptr::null(), &mut x), ZfStatus::NullPointer);
        assert_eq!(last_error(), "profile is null");
        assert_eq!(zf_profile_area(round, ptr::null_mut()), ZfStatus::NullPointer);
        assert_eq!(zf_profile_area(round, &mut x), ZfStatus::Ok);
        assert_eq!(last_error(), "");

        let mut p = ptr::null_mut();
        let bad = [0.3];
        assert_eq!(zf_profile_new_michel(bad.as_ptr(), 1, 256, &mut p), ZfStatus::InvalidArgument);
        assert!(p.is_null());
        let good = [0.3, -0.3];
        assert_eq!(zf_profile_new_michel(good.as_ptr(), 2, 256, &mut p), ZfStatus::Ok);
        let mut summary = ZfSweepSummary::default();
        assert_eq!(zf_zoll_sweep(p, 8, 0.0, 0.0, 0.0, &mut summary), ZfStatus::Ok);
        assert_eq!(summary.n_entries, 9);
        assert_eq!(summary.n_flagged, 0);
        assert!(summary.spread < 1e-5);
        // an unsymmetric profile cannot enter the conformal flow
        let mut f = ptr::null_mut();
        assert_eq!(zf_flow_create(p, 65, &mut f), ZfStatus::InvalidArgument);
        zf_profile_free(p);
        zf_profile_free(round);
    }
}

#[test]
fn gong_flow_through_handles() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(zf_profile_new_unit_area(ZfSurface::GongRaw, &mut p), ZfStatus::Ok);
        assert!((value(|o| zf_profile_area(p, o)) - 4.0 * PI).abs() < 1e-10);
        let analytic = value(|o| zf_lprime_analytic(p, o));
        let mut f = ptr::null_mut();
        assert_eq!(zf_flow_create(p, 129, &mut f), ZfStatus::Ok);
        let mut start = ZfDiagnostics::default();
        assert_eq!(zf_flow_diagnostics(f, &mut start), ZfStatus::Ok);

        let dts = [1e-3, 5e-4, 2.5e-4];
        let (mut v, mut r) = (0.0, 0.0);
        assert_eq!(zf_flow_lprime_numeric(f, dts.as_ptr(), 3, &mut v, &mut r), ZfStatus::Ok);
        assert!((v - analytic).abs() < 1e-2, "numeric {v} analytic {analytic}");
        let coarse = [1e-2];
        assert_eq!(zf_flow_lprime_numeric(f, coarse.as_ptr(), 1, &mut v, &mut r), ZfStatus::Numerical);
        assert!(r.is_infinite());

        assert_eq!(zf_flow_evolve(f, 0.05, 0.0), ZfStatus::Ok);
        assert_eq!(zf_flow_evolve(f, 0.01, 0.0), ZfStatus::InvalidArgument);
        let mut end = ZfDiagnostics::default();
        assert_eq!(zf_flow_diagnostics(f, &mut end), ZfStatus::Ok);
        assert_eq!(end.t, 0.05);
        assert!(end.equator_length < start.equator_length);
        assert!((end.area - 4.0 * PI).abs() < 1e-8);

        let mut q = ptr::null_mut();
        assert_eq!(zf_flow_profile(f, &mut q), ZfStatus::Ok);
        assert!((value(|o| zf_equator_length(q, o)) - end.equator_length).abs() < 1e-10);
        zf_profile_free(q);
        zf_flow_free(f);
        zf_profile_free(p);
    }
}

#[test]
fn weinstein_integer_over_the_boundary() {
    let mut w = ZfWeinstein::default();
    unsafe {
        assert_eq!(zf_weinstein_integer(8.0 * PI, 1.0, 2, &mut w), ZfStatus::Ok);
        assert_eq!(w.nearest, 2);
        assert_eq!(zf_weinstein_integer(4.0 * PI, 1.0, -2, &mut w), ZfStatus::InvalidArgument);
        assert_eq!(zf_weinstein_integer(-1.0, 1.0, 2, &mut w), ZfStatus::InvalidArgument);
    }
    let v = unsafe { CStr::from_ptr(zf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn generated_header_is_current() {
    let header = std::fs::read_to_string(crate_dir().join("include/zollflow.h")).unwrap();
    for name in [
        "zf_profile_new",
        "zf_zoll_sweep",
        "zf_flow_evolve",
        "zf_flow_lprime_numeric",
        "zf_weinstein_integer",
        "zf_last_error_message",
        "typedef struct ZfProfile ZfProfile;",
        "ZF_STATUS_INVALID_ARGUMENT = 2",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Links the C smoke program against the static library next to this test
/// binary.
#[test]
fn c_program_links_against_the_static_library() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libzollflow_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out_dir = tempfile_dir();
    let bin = out_dir.join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg("-std=c11")
        .arg("-D_DEFAULT_SOURCE")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler runs");
    assert!(status.success(), "compiling the smoke program failed");
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).ends_with("ok\n"));
    let _ = std::fs::remove_dir_all(out_dir);
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("zollflow-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
