//! Unit-speed geodesics on `ds^2 + rho(s)^2 dphi^2`.
//!
//! With `psi` the heading measured from the meridian direction the geodesic
//! equations are
//!
//! ```text
//! ds/dtau   = cos psi
//! dphi/dtau = sin psi / rho(s)
//! dpsi/dtau = -(rho'(s) / rho(s)) sin psi
//! ```
//!
//! and `rho(s) sin psi` (the Clairaut constant) is a first integral.
//! Meridians (`sin psi = 0`) run through the poles where this chart is
//! singular; they are followed in closed form instead.

mod rk;

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::profile::{ProfileError, ProfileMetric};
use crate::roots;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_CLOSURE_TOL: f64 = 1e-6;
pub const DEFAULT_HORIZON: f64 = 8.0 * TAU;
/// Clairaut constants are sampled up to this fraction of the widest radius.
pub const CLAIRAUT_CAP: f64 = 0.95;

const MERIDIAN_EPS: f64 = 1e-14;
// Local error target as a fraction of the requested tolerance, so that the
// error accumulated over a few revolutions stays near `tol`.
const LOCAL_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeodesicError {
    #[error("initial radius {0} is not positive")]
    AtPole(f64),
    #[error("step size underflow at tau = {tau} (s = {s}, h = {h:e})")]
    StepUnderflow { tau: f64, s: f64, h: f64 },
    #[error("no closure within horizon {horizon}: first return at {first_return} with closure error {closure_error:e}")]
    NoClosure { horizon: f64, first_return: f64, closure_error: f64 },
    #[error("trajectory never returned to its section within horizon {0}")]
    NoReturn(f64),
    #[error("sweep needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState {
    /// Arc position along the meridian.
    pub s: f64,
    pub phi: f64,
    /// Heading from the meridian direction.
    pub psi: f64,
    /// Arc length travelled.
    pub tau: f64,
}

impl GeodesicState {
    pub fn new(s: f64, phi: f64, psi: f64) -> Self {
        Self { s, phi, psi, tau: 0.0 }
    }

    pub fn clairaut(&self, p: &ProfileMetric) -> f64 {
        p.rho(self.s) * self.psi.sin()
    }

    fn is_meridian(&self) -> bool {
        self.psi.sin().abs() < MERIDIAN_EPS
    }

    fn as_array(&self) -> rk::State {
        [self.s, self.phi, self.psi]
    }

    fn from_array(y: rk::State, tau: f64) -> Self {
        Self { s: y[0], phi: y[1], psi: y[2], tau }
    }
}

fn wrap_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// `|ds| + rho |dphi mod 2pi| + |dpsi mod 2pi|`.
pub fn closure_distance(p: &ProfileMetric, a: &GeodesicState, b: &GeodesicState) -> f64 {
    (a.s - b.s).abs() + p.rho(a.s) * wrap_angle(a.phi - b.phi).abs() + wrap_angle(a.psi - b.psi).abs()
}

fn rhs(p: &ProfileMetric) -> impl Fn(&rk::State) -> rk::State + '_ {
    move |y| {
        let rho = p.rho(y[0]);
        if !(rho > 0.0) {
            return [f64::NAN; 3];
        }
        let (sin, cos) = y[2].sin_cos();
        [cos, sin / rho, -p.drho(y[0]) / rho * sin]
    }
}

/// Adaptive stepping of the geodesic ODE.
struct Stepper<'a> {
    p: &'a ProfileMetric,
    tol: f64,
    h: f64,
    y: rk::State,
    tau: f64,
}

impl<'a> Stepper<'a> {
    fn new(p: &'a ProfileMetric, init: &GeodesicState, tol: f64) -> Self {
        // crude start: a few per cent of the local radius
        let h = (0.05 * p.rho(init.s)).clamp(1e-6, 0.1);
        Self { p, tol: tol * LOCAL_FRACTION, h, y: init.as_array(), tau: init.tau }
    }

    /// Advances one accepted step, never past `tau_max`.
    fn advance(&mut self, tau_max: f64) -> Result<(rk::State, f64), GeodesicError> {
        let f = rhs(self.p);
        let floor = 1e-13 * (1.0 + self.tau.abs());
        loop {
            let h = self.h.min(tau_max - self.tau);
            let trial = rk::step(&f, &self.y, h);
            let err = rk::error_norm(&self.y, &trial, self.tol);
            if err <= 1.0 {
                let prev = self.y;
                self.y = trial.y;
                self.tau += h;
                if h == self.h {
                    self.h = rk::next_step(h, err);
                }
                return Ok((prev, h));
            }
            self.h = rk::next_step(h, err.min(1e10));
            if self.h < floor {
                return Err(GeodesicError::StepUnderflow { tau: self.tau, s: self.y[0], h: self.h });
            }
        }
    }
}

fn check_start(p: &ProfileMetric, init: &GeodesicState, tol: f64) -> Result<(), GeodesicError> {
    if !(tol > 0.0) {
        return Err(GeodesicError::BadTolerance(tol));
    }
    let rho = p.rho(init.s);
    if !(rho > 0.0) || init.s <= 0.0 || init.s >= p.total_length() {
        return Err(GeodesicError::AtPole(rho));
    }
    Ok(())
}

/// Integrates a geodesic for arc length `length`, returning the accepted
/// states (including both ends).
pub fn integrate(
    p: &ProfileMetric,
    init: GeodesicState,
    length: f64,
    tol: f64,
) -> Result<Vec<GeodesicState>, GeodesicError> {
    check_start(p, &init, tol)?;
    if init.is_meridian() {
        return Ok(meridian_trajectory(p, init, length));
    }
    let end = init.tau + length;
    let mut stepper = Stepper::new(p, &init, tol);
    let mut out = vec![init];
    while stepper.tau < end {
        stepper.advance(end)?;
        out.push(GeodesicState::from_array(stepper.y, stepper.tau));
    }
    Ok(out)
}

// The meridian through the poles is a great-circle-like closed curve of
// length 2S: passing a pole flips phi by pi and reverses the meridian heading.
fn meridian_trajectory(p: &ProfileMetric, init: GeodesicState, length: f64) -> Vec<GeodesicState> {
    let total = p.total_length();
    let mut state = init;
    let mut out = vec![init];
    let mut remaining = length;
    while remaining > 0.0 {
        let forward = state.psi.cos() > 0.0;
        let to_pole = if forward { total - state.s } else { state.s };
        if to_pole > remaining {
            state.s += if forward { remaining } else { -remaining };
            state.tau += remaining;
            out.push(state);
            break;
        }
        remaining -= to_pole;
        state.tau += to_pole;
        state.s = if forward { total } else { 0.0 };
        state.phi = (state.phi + PI).rem_euclid(TAU);
        state.psi = PI - state.psi;
        out.push(state);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodOptions {
    /// Local error tolerance of the integrator.
    pub tol: f64,
    /// Maximum closure distance accepted as a return to the start.
    pub closure_tol: f64,
    pub horizon: f64,
}

impl Default for PeriodOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, closure_tol: DEFAULT_CLOSURE_TOL, horizon: DEFAULT_HORIZON }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodMeasurement {
    pub period: f64,
    pub closure_error: f64,
    /// Number of section returns before closure.
    pub returns: usize,
}

/// Period of the closed geodesic through `init`.
///
/// Returns to a Poincaré section through the start (`s = s0` crossed in the
/// initial direction, or `cos psi = 0` when starting at a turning point) are
/// located by Illinois iteration on single Dormand–Prince steps. The first
/// return whose closure distance is below `closure_tol` gives the period.
pub fn find_period(
    p: &ProfileMetric,
    init: GeodesicState,
    opts: &PeriodOptions,
) -> Result<PeriodMeasurement, GeodesicError> {
    check_start(p, &init, opts.tol)?;
    let init = GeodesicState { tau: 0.0, ..init };
    if init.is_meridian() {
        return Ok(PeriodMeasurement { period: 2.0 * p.total_length(), closure_error: 0.0, returns: 1 });
    }
    let cos0 = init.psi.cos();
    let slope0 = p.drho(init.s);
    // parallel circle: a geodesic exactly when rho' vanishes there
    if cos0.abs() < 1e-12 && slope0.abs() < 1e-9 {
        return Ok(PeriodMeasurement { period: TAU * p.rho(init.s), closure_error: 0.0, returns: 1 });
    }
    let section: Box<dyn Fn(&rk::State) -> f64> = if cos0.abs() > 1e-6 {
        let dir = cos0.signum();
        let s0 = init.s;
        Box::new(move |y: &rk::State| dir * (y[0] - s0))
    } else {
        // at a turning point cos psi changes sign with d(cos psi) ~ rho'
        let dir = slope0.signum();
        Box::new(move |y: &rk::State| dir * y[2].cos())
    };

    let f = rhs(p);
    let mut stepper = Stepper::new(p, &init, opts.tol);
    let mut first: Option<(f64, f64)> = None;
    let mut returns = 0;
    let mut prev_val = 0.0;
    while stepper.tau < opts.horizon {
        let (y0, h) = stepper.advance(opts.horizon)?;
        let tau0 = stepper.tau - h;
        let val = section(&stepper.y);
        if prev_val < 0.0 && val >= 0.0 {
            let dt = roots::illinois(|t| section(&rk::step(&f, &y0, t).y), 0.0, h, prev_val, val, 1e-14);
            let hit = GeodesicState::from_array(rk::step(&f, &y0, dt).y, tau0 + dt);
            let closure = closure_distance(p, &hit, &init);
            returns += 1;
            if first.is_none() {
                first = Some((hit.tau, closure));
            }
            if closure <= opts.closure_tol {
                return Ok(PeriodMeasurement { period: hit.tau, closure_error: closure, returns });
            }
        }
        prev_val = val;
    }
    match first {
        Some((first_return, closure_error)) => {
            Err(GeodesicError::NoClosure { horizon: opts.horizon, first_return, closure_error })
        }
        None => Err(GeodesicError::NoReturn(opts.horizon)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodEntry {
    pub clairaut_c: f64,
    pub period: f64,
    pub closure_error: f64,
    /// Set when the geodesic did not close within tolerance; `period` is then
    /// its first return time.
    pub flagged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodSummary {
    pub min: f64,
    pub max: f64,
    pub spread: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodReport {
    pub entries: Vec<PeriodEntry>,
    pub summary: PeriodSummary,
}

impl PeriodReport {
    pub fn from_entries(mut entries: Vec<PeriodEntry>) -> Self {
        entries.sort_by(|a, b| a.clairaut_c.total_cmp(&b.clairaut_c));
        let min = entries.iter().map(|e| e.period).fold(f64::INFINITY, f64::min);
        let max = entries.iter().map(|e| e.period).fold(f64::NEG_INFINITY, f64::max);
        let mean = entries.iter().map(|e| e.period).sum::<f64>() / entries.len() as f64;
        Self { entries, summary: PeriodSummary { min, max, spread: max - min, mean } }
    }

    pub fn all_closed(&self) -> bool {
        self.entries.iter().all(|e| !e.flagged)
    }
}

/// Measures the period of geodesics leaving the widest parallel with
/// Clairaut constants `c_k = 0.95 rho_max k/(n-1)`, plus that parallel
/// itself (`c = rho_max`, period `2 pi rho_max`).
pub fn zoll_sweep(p: &ProfileMetric, n_samples: usize, opts: &PeriodOptions) -> Result<PeriodReport, GeodesicError> {
    if n_samples < 2 {
        return Err(GeodesicError::TooFewSamples(n_samples));
    }
    let (s_eq, rho_max) = p.widest_parallel();
    let samples: Vec<f64> =
        (0..n_samples).map(|k| CLAIRAUT_CAP * rho_max * k as f64 / (n_samples - 1) as f64).collect();
    let mut entries = samples
        .par_iter()
        .map(|&c| {
            let init = GeodesicState::new(s_eq, 0.0, (c / rho_max).asin());
            match find_period(p, init, opts) {
                Ok(m) => Ok(PeriodEntry { clairaut_c: c, period: m.period, closure_error: m.closure_error, flagged: false }),
                Err(GeodesicError::NoClosure { first_return, closure_error, .. }) => {
                    Ok(PeriodEntry { clairaut_c: c, period: first_return, closure_error, flagged: true })
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    entries.push(PeriodEntry { clairaut_c: rho_max, period: TAU * rho_max, closure_error: 0.0, flagged: false });
    Ok(PeriodReport::from_entries(entries))
}

/// Length `2 pi rho(S/2)` of the equator of a reflection-symmetric profile.
pub fn equator_length(p: &ProfileMetric) -> Result<f64, GeodesicError> {
    if !p.is_symmetric() {
        return Err(ProfileError::NotSymmetric(f64::NAN).into());
    }
    Ok(TAU * p.rho(0.5 * p.total_length()))
}
