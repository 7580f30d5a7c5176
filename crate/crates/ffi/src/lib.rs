//! C interface to `zollflow`.
//!
//! Profiles and flow states cross the boundary as opaque handles created by
//! `zf_*_new`/`zf_*_create` functions and released with the matching
//! `zf_*_free`. Every fallible call returns a [`ZfStatus`]; on failure the
//! message is kept per thread and read back with
//! [`zf_last_error_message`]. Results are written through out-pointers.

use std::cell::RefCell;
use std::ffi::{c_char, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use zollflow::catalog::CatalogError;
use zollflow::cli::{self, CliError, ConfigError, RunConfig, SurfaceSpec};
use zollflow::geodesics::{self, GeodesicError, PeriodOptions};
use zollflow::profile::{self, ProfileError, ProfileMetric};
use zollflow::ricci::{self, FlowState, RicciError};
use zollflow::weinstein::{self, WeinsteinError};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    Panic = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZfSurface {
    Round = 0,
    GongRaw = 1,
    GongNormalized = 2,
}

/// Arc-length profile `ds^2 + rho(s)^2 dphi^2`.
pub struct ZfProfile(ProfileMetric);

/// Conformal flow state.
pub struct ZfFlow(FlowState);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZfSweepSummary {
    pub min: f64,
    pub max: f64,
    pub spread: f64,
    pub mean: f64,
    pub n_entries: usize,
    pub n_flagged: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZfDiagnostics {
    pub t: f64,
    pub area: f64,
    pub k_bar: f64,
    pub min_k: f64,
    pub max_k: f64,
    pub equator_length: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZfWeinstein {
    pub i_value: f64,
    pub nearest: i64,
    pub residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(ZfStatus, String);

impl Failure {
    fn invalid(msg: impl Into<String>) -> Self {
        Failure(ZfStatus::InvalidArgument, msg.into())
    }
}

impl From<ProfileError> for Failure {
    fn from(e: ProfileError) -> Self {
        let status = match e {
            ProfileError::OutsideDomain { .. }
            | ProfileError::NearPole { .. }
            | ProfileError::OutsideArclength { .. }
            | ProfileError::NonPositiveArea(_)
            | ProfileError::NotSymmetric(_)
            | ProfileError::NotNormalized(_)
            | ProfileError::GridTooSmall(_) => ZfStatus::InvalidArgument,
            _ => ZfStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Profile(p) => p.into(),
            other => Failure::invalid(other.to_string()),
        }
    }
}

impl From<GeodesicError> for Failure {
    fn from(e: GeodesicError) -> Self {
        match e {
            GeodesicError::Profile(p) => p.into(),
            GeodesicError::TooFewSamples(_) | GeodesicError::BadTolerance(_) | GeodesicError::AtPole(_) => {
                Failure::invalid(e.to_string())
            }
            other => Failure(ZfStatus::Numerical, other.to_string()),
        }
    }
}

impl From<RicciError> for Failure {
    fn from(e: RicciError) -> Self {
        match e {
            RicciError::Profile(p) => p.into(),
            RicciError::Stability { .. } | RicciError::BadHorizon(_) | RicciError::NotSymmetric | RicciError::NoOffsets => {
                Failure::invalid(e.to_string())
            }
            other => Failure(ZfStatus::Numerical, other.to_string()),
        }
    }
}

impl From<WeinsteinError> for Failure {
    fn from(e: WeinsteinError) -> Self {
        match e {
            WeinsteinError::UnsupportedDimension(_) | WeinsteinError::NonPositive { .. } => {
                Failure::invalid(e.to_string())
            }
            other => Failure(ZfStatus::Numerical, other.to_string()),
        }
    }
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        match e {
            CliError::Config(c) => Failure::invalid(c.to_string()),
            CliError::Catalog(c) => c.into(),
            CliError::Profile(p) => p.into(),
            CliError::Geodesic(g) => g.into(),
            CliError::Ricci(r) => r.into(),
            CliError::Weinstein(w) => w.into(),
            other => Failure(ZfStatus::Numerical, other.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::invalid(e.to_string())
    }
}

fn set_error(msg: String) {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = msg);
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> ZfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error(String::new());
            ZfStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            ZfStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(ZfStatus::NullPointer, format!("{name} is null")))
}

unsafe fn write<T>(out: *mut T, value: T, name: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(ZfStatus::NullPointer, format!("{name} is null")));
    }
    out.write(value);
    Ok(())
}

fn spec(kind: ZfSurface) -> SurfaceSpec {
    match kind {
        ZfSurface::Round => SurfaceSpec::Round,
        ZfSurface::GongRaw => SurfaceSpec::GongRaw,
        ZfSurface::GongNormalized => SurfaceSpec::GongNormalized,
    }
}

fn boxed_profile(p: ProfileMetric) -> *mut ZfProfile {
    Box::into_raw(Box::new(ZfProfile(p)))
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len - 1` bytes) and returns the full length in
/// bytes excluding the terminator. `buf` may be null to query the length.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn zf_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let msg = slot.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr().cast::<c_char>(), buf, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

/// NUL-terminated library version.
#[no_mangle]
pub extern "C" fn zf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Catalog surface at its own scale.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn zf_profile_new(kind: ZfSurface, out: *mut *mut ZfProfile) -> ZfStatus {
    guard(|| {
        let config = RunConfig { surface: spec(kind), ..RunConfig::default() };
        let p = cli::surface_metric(&config)?;
        write(out, boxed_profile(p), "out")
    })
}

/// Catalog surface rescaled to area `4 pi`.
///
/// # Safety
/// `out` must be valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn zf_profile_new_unit_area(kind: ZfSurface, out: *mut *mut ZfProfile) -> ZfStatus {
    guard(|| {
        let config = RunConfig { surface: spec(kind), ..RunConfig::default() };
        let p = cli::flow_metric(&config)?;
        write(out, boxed_profile(p), "out")
    })
}

/// Michel surface for the odd function `h(x) = sum coeffs[k] x^(2k+1)`.
///
/// # Safety
/// `coeffs` must be valid for `n_coeffs` reads; `out` for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn zf_profile_new_michel(
    coeffs: *const f64,
    n_coeffs: usize,
    n_nodes: usize,
    out: *mut *mut ZfProfile,
) -> ZfStatus {
    guard(|| {
        if coeffs.is_null() {
            return Err(Failure(ZfStatus::NullPointer, "coeffs is null".into()));
        }
        let a = std::slice::from_raw_parts(coeffs, n_coeffs).to_vec();
        let config = RunConfig {
            surface: SurfaceSpec::Michel { coeffs: a },
            grid: cli::GridOptions { n_nodes },
            ..RunConfig::default()
        };
        config.validate()?;
        let p = cli::surface_metric(&config)?;
        write(out, boxed_profile(p), "out")
    })
}

/// # Safety
/// `p` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zf_profile_free(p: *mut ZfProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Total meridian length `S`.
///
/// # Safety
/// `p` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_profile_length(p: *const ZfProfile, out: *mut f64) -> ZfStatus {
    guard(|| write(out, deref(p, "profile")?.0.total_length(), "out"))
}

/// # Safety
/// `p` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_profile_area(p: *const ZfProfile, out: *mut f64) -> ZfStatus {
    guard(|| write(out, deref(p, "profile")?.0.area(), "out"))
}

/// # Safety
/// `p` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_profile_average_curvature(p: *const ZfProfile, out: *mut f64) -> ZfStatus {
    guard(|| write(out, deref(p, "profile")?.0.average_curvature(), "out"))
}

/// `rho(s)` for `s` in `[0, S]`.
///
/// # Safety
/// `p` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_profile_rho(p: *const ZfProfile, s: f64, out: *mut f64) -> ZfStatus {
    guard(|| {
        let m = &deref(p, "profile")?.0;
        if !(0.0..=m.total_length()).contains(&s) {
            return Err(Failure::invalid(format!("s = {s} outside [0, {}]", m.total_length())));
        }
        write(out, m.rho(s), "out")
    })
}

/// Gaussian curvature `-rho''/rho` at arc length `s` in `(0, S)`.
///
/// # Safety
/// `p` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_profile_curvature(p: *const ZfProfile, s: f64, out: *mut f64) -> ZfStatus {
    guard(|| write(out, profile::curvature_arclength(&deref(p, "profile")?.0, s)?, "out"))
}

/// Length of the equator of a reflection-symmetric profile.
///
/// # Safety
/// `p` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_equator_length(p: *const ZfProfile, out: *mut f64) -> ZfStatus {
    guard(|| write(out, geodesics::equator_length(&deref(p, "profile")?.0)?, "out"))
}

/// Period sweep over `n_samples` Clairaut constants plus the widest
/// parallel. Non-positive tolerances or horizon select the defaults.
///
/// # Safety
/// `p` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_zoll_sweep(
    p: *const ZfProfile,
    n_samples: usize,
    tol: f64,
    closure_tol: f64,
    horizon: f64,
    out: *mut ZfSweepSummary,
) -> ZfStatus {
    guard(|| {
        let m = &deref(p, "profile")?.0;
        let d = PeriodOptions::default();
        let opts = PeriodOptions {
            tol: if tol > 0.0 { tol } else { d.tol },
            closure_tol: if closure_tol > 0.0 { closure_tol } else { d.closure_tol },
            horizon: if horizon > 0.0 { horizon } else { d.horizon },
        };
        let r = geodesics::zoll_sweep(m, n_samples, &opts)?;
        let s = ZfSweepSummary {
            min: r.summary.min,
            max: r.summary.max,
            spread: r.summary.spread,
            mean: r.summary.mean,
            n_entries: r.entries.len(),
            n_flagged: r.entries.iter().filter(|e| e.flagged).count(),
        };
        write(out, s, "out")
    })
}

/// Closed-form first variation of the widest parallel's length.
///
/// # Safety
/// `p` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_lprime_analytic(p: *const ZfProfile, out: *mut f64) -> ZfStatus {
    guard(|| write(out, ricci::lprime_analytic(&deref(p, "profile")?.0)?, "out"))
}

/// Flow state on `n_nodes` conformal nodes from an area-`4 pi` symmetric
/// profile.
///
/// # Safety
/// `p` must be a live handle; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn zf_flow_create(p: *const ZfProfile, n_nodes: usize, out: *mut *mut ZfFlow) -> ZfStatus {
    guard(|| {
        let state = FlowState::from_metric(&deref(p, "profile")?.0, n_nodes)?;
        write(out, Box::into_raw(Box::new(ZfFlow(state))), "out")
    })
}

/// # Safety
/// `f` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zf_flow_free(f: *mut ZfFlow) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Advances the state in place to time `t`. `max_dt <= 0` uses the stability
/// bound alone. On failure the state is left unchanged.
///
/// # Safety
/// `f` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn zf_flow_evolve(f: *mut ZfFlow, t: f64, max_dt: f64) -> ZfStatus {
    guard(|| {
        let flow = f.as_mut().ok_or_else(|| Failure(ZfStatus::NullPointer, "flow is null".into()))?;
        if !(t.is_finite() && t >= flow.0.t) {
            return Err(Failure::invalid(format!("target time {t} is before the current time {}", flow.0.t)));
        }
        let cap = if max_dt > 0.0 { Some(max_dt) } else { None };
        flow.0 = ricci::advance_to(&flow.0, t, cap)?;
        Ok(())
    })
}

/// # Safety
/// `f` must be a live handle; `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_flow_diagnostics(f: *const ZfFlow, out: *mut ZfDiagnostics) -> ZfStatus {
    guard(|| {
        let s = &deref(f, "flow")?.0;
        let d = ZfDiagnostics {
            t: s.t,
            area: s.diagnostics.area,
            k_bar: s.diagnostics.k_bar,
            min_k: s.diagnostics.min_k,
            max_k: s.diagnostics.max_k,
            equator_length: s.equator_length(),
        };
        write(out, d, "out")
    })
}

/// Richardson-extrapolated `l'(t)` from forward offsets `dts`. The estimate
/// is written even when the residual check fails, in which case the status
/// is `Numerical`.
///
/// # Safety
/// `f` must be a live handle; `dts` valid for `n` reads; `value` and
/// `residual` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn zf_flow_lprime_numeric(
    f: *const ZfFlow,
    dts: *const f64,
    n: usize,
    value: *mut f64,
    residual: *mut f64,
) -> ZfStatus {
    guard(|| {
        let s = &deref(f, "flow")?.0;
        if dts.is_null() {
            return Err(Failure(ZfStatus::NullPointer, "dts is null".into()));
        }
        let offsets = std::slice::from_raw_parts(dts, n);
        match ricci::lprime_numeric(s, offsets) {
            Ok(est) => {
                write(value, est.value, "value")?;
                write(residual, est.residual, "residual")
            }
            Err(RicciError::ExtrapolationResidual { value: v, residual: r }) => {
                write(value, v, "value")?;
                write(residual, r, "residual")?;
                Err(RicciError::ExtrapolationResidual { value: v, residual: r }.into())
            }
            Err(e) => Err(e.into()),
        }
    })
}

/// Arc-length profile of the current flow state.
///
/// # Safety
/// `f` must be a live handle; `out` valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn zf_flow_profile(f: *const ZfFlow, out: *mut *mut ZfProfile) -> ZfStatus {
    guard(|| {
        let p = deref(f, "flow")?.0.to_profile_metric()?;
        write(out, boxed_profile(p), "out")
    })
}

/// `i = volume / (l^n vol(S^n))`; only `n = 2` is supported.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn zf_weinstein_integer(volume: f64, l: f64, n: c_int, out: *mut ZfWeinstein) -> ZfStatus {
    guard(|| {
        let dim = u32::try_from(n).map_err(|_| Failure::invalid(format!("dimension {n} is negative")))?;
        let w = weinstein::weinstein_integer(volume, l, dim)?;
        write(out, ZfWeinstein { i_value: w.i_value, nearest: w.nearest, residual: w.residual }, "out")
    })
}
