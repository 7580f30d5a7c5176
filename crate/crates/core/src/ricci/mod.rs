//! Normalized Ricci flow `dg/dt = -2 (K - Kbar) g` on axisymmetric spheres.
//!
//! In the conformal gauge `g = e^{2u} g_round` the flow is the scalar
//! parabolic equation `u_t = Kbar - e^{-2u} (1 - Delta_0 u)`. It is stepped
//! with Heun's method under the diffusive bound
//! `dt <= 0.4 dtheta^2 min e^{2u}`, and after every step `u` is shifted so the
//! discrete area is `4 pi` again.

use std::f64::consts::TAU;

use crate::profile::{self, ConformalProfile, ProfileError, ProfileMetric, ROUND_AREA};

/// Fraction of `dtheta^2 min e^{2u}` allowed as a time step.
pub const STABILITY_FACTOR: f64 = 0.4;
/// Largest accepted Richardson residual relative to `max(1, |l'|)`.
pub const RESIDUAL_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RicciError {
    #[error("time step {dt:e} exceeds the stability bound {bound:e}")]
    Stability { dt: f64, bound: f64 },
    #[error("non-finite values at t = {}", last_good.t)]
    NonFinite { last_good: Box<FlowState> },
    #[error("flow horizon must be positive, got {0}")]
    BadHorizon(f64),
    #[error("first variation needs a closed parallel geodesic; profile is not reflection symmetric")]
    NotSymmetric,
    #[error("no time offsets given")]
    NoOffsets,
    #[error("Richardson extrapolation not converged: estimate {value}, residual {residual:e}")]
    ExtrapolationResidual { value: f64, residual: f64 },
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub area: f64,
    pub k_bar: f64,
    pub min_k: f64,
    pub max_k: f64,
}

impl Diagnostics {
    pub fn max_abs_k_minus_1(&self) -> f64 {
        (self.max_k - 1.0).abs().max((self.min_k - 1.0).abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub profile: ConformalProfile,
    pub t: f64,
    pub diagnostics: Diagnostics,
}

struct Evaluation {
    curvature: Vec<f64>,
    k_bar: f64,
    area: f64,
}

fn evaluate(u: &ConformalProfile, weights: &[f64]) -> Evaluation {
    let curvature = u.curvatures();
    let mut area = 0.0;
    let mut total = 0.0;
    for ((w, k), uj) in weights.iter().zip(&curvature).zip(u.values()) {
        let da = w * (2.0 * uj).exp();
        area += da;
        total += da * k;
    }
    Evaluation { curvature, k_bar: total / area, area }
}

impl FlowState {
    /// Starts a flow at `t = 0`, shifting `u` to discrete area `4 pi`.
    pub fn new(mut profile: ConformalProfile) -> Self {
        renormalize(&mut profile);
        let diagnostics = diagnostics(&profile);
        Self { profile, t: 0.0, diagnostics }
    }

    pub fn from_metric(p: &ProfileMetric, n_nodes: usize) -> Result<Self, RicciError> {
        Ok(Self::new(profile::to_conformal(p, n_nodes)?))
    }

    pub fn round(n_nodes: usize) -> Result<Self, RicciError> {
        Ok(Self::new(ConformalProfile::round(n_nodes)?))
    }

    /// Largest stable explicit step for the current state.
    pub fn stability_bound(&self) -> f64 {
        let h = self.profile.spacing();
        let min_u = self.profile.values().iter().copied().fold(f64::INFINITY, f64::min);
        STABILITY_FACTOR * h * h * (2.0 * min_u).exp()
    }

    /// `l(t) = 2 pi e^{u(pi/2)}`.
    pub fn equator_length(&self) -> f64 {
        TAU * self.profile.equator_value().exp()
    }

    pub fn to_profile_metric(&self) -> Result<ProfileMetric, RicciError> {
        Ok(self.profile.to_profile_metric()?)
    }
}

fn renormalize(profile: &mut ConformalProfile) {
    let shift = 0.5 * (profile.area() / ROUND_AREA).ln();
    profile.values_mut().iter_mut().for_each(|u| *u -= shift);
}

fn diagnostics(profile: &ConformalProfile) -> Diagnostics {
    let eval = evaluate(profile, &profile.zone_areas());
    let min_k = eval.curvature.iter().copied().fold(f64::INFINITY, f64::min);
    let max_k = eval.curvature.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Diagnostics { area: eval.area, k_bar: eval.k_bar, min_k, max_k }
}

/// One explicit step of size `dt`.
pub fn flow_step(state: &FlowState, dt: f64) -> Result<FlowState, RicciError> {
    let bound = state.stability_bound();
    if !(dt > 0.0) || dt > bound * (1.0 + 1e-12) {
        return Err(RicciError::Stability { dt, bound });
    }
    let weights = state.profile.zone_areas();
    let symmetric = state.profile.symmetry_defect() <= 1e-12;
    let u0 = &state.profile;

    let e0 = evaluate(u0, &weights);
    let rate0: Vec<f64> = e0.curvature.iter().map(|k| e0.k_bar - k).collect();
    let mut mid = u0.clone();
    for (u, r) in mid.values_mut().iter_mut().zip(&rate0) {
        *u += dt * r;
    }
    let e1 = evaluate(&mid, &weights);
    let mut next = u0.clone();
    for ((u, r0), k1) in next.values_mut().iter_mut().zip(&rate0).zip(&e1.curvature) {
        *u += 0.5 * dt * (r0 + (e1.k_bar - k1));
    }
    if next.values().iter().any(|v| !v.is_finite()) {
        return Err(RicciError::NonFinite { last_good: Box::new(state.clone()) });
    }
    renormalize(&mut next);
    if symmetric {
        next.symmetrize();
    }
    let diagnostics = diagnostics(&next);
    if !(diagnostics.max_k.is_finite() && diagnostics.min_k.is_finite()) {
        return Err(RicciError::NonFinite { last_good: Box::new(state.clone()) });
    }
    Ok(FlowState { profile: next, t: state.t + dt, diagnostics })
}

/// Advances to `target` time with stable substeps, capped by `max_dt`.
pub fn advance_to(state: &FlowState, target: f64, max_dt: Option<f64>) -> Result<FlowState, RicciError> {
    let mut current = state.clone();
    while current.t < target {
        let remaining = target - current.t;
        let mut dt = current.stability_bound();
        if let Some(cap) = max_dt {
            dt = dt.min(cap);
        }
        let last = dt >= remaining * (1.0 - 1e-12);
        let next = flow_step(&current, if last { remaining } else { dt })?;
        current = next;
        if last {
            current.t = target;
        }
    }
    Ok(current)
}

/// Evolves to `horizon`, returning the initial state, one state every
/// `checkpoint_every`, and the final state.
pub fn evolve(
    initial: &FlowState,
    horizon: f64,
    checkpoint_every: f64,
    max_dt: Option<f64>,
) -> Result<Vec<FlowState>, RicciError> {
    if !(horizon > 0.0) {
        return Err(RicciError::BadHorizon(horizon));
    }
    let cadence = if checkpoint_every > 0.0 { checkpoint_every } else { horizon };
    let mut out = vec![initial.clone()];
    let mut k = 1;
    loop {
        let target = (initial.t + cadence * k as f64).min(initial.t + horizon);
        let next = advance_to(out.last().expect("non-empty"), target, max_dt)?;
        out.push(next);
        if target >= initial.t + horizon * (1.0 - 1e-12) {
            break;
        }
        k += 1;
    }
    Ok(out)
}

/// `(t, l(t))` per checkpoint.
pub fn equator_length_series(checkpoints: &[FlowState]) -> Vec<(f64, f64)> {
    checkpoints.iter().map(|s| (s.t, s.equator_length())).collect()
}

/// `l'(0) = -integral_0^{2 pi rho} (K - Kbar) ds = -2 pi rho_eq (K_eq - Kbar)`
/// along the equator. For an area-`4 pi` Zoll profile `rho_eq = 1`.
///
/// For profiles without the reflection the widest parallel is used; it is a
/// closed geodesic there as well.
pub fn lprime_analytic(p: &ProfileMetric) -> Result<f64, RicciError> {
    let (s_eq, rho_eq) = p.widest_parallel();
    let k_eq = profile::curvature_arclength(p, s_eq)?;
    Ok(-TAU * rho_eq * (k_eq - p.average_curvature()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct LprimeEstimate {
    pub value: f64,
    pub residual: f64,
    /// `(dt, (l(dt) - l(0)) / dt)` in decreasing `dt`.
    pub slopes: Vec<(f64, f64)>,
    /// Diagonal of the Richardson table.
    pub diagonal: Vec<f64>,
}

/// Slope of `l(t)` at `t = 0` from forward differences over `dt_list`,
/// extrapolated to zero offset (polynomial in `dt`).
pub fn lprime_numeric(initial: &FlowState, dt_list: &[f64]) -> Result<LprimeEstimate, RicciError> {
    if dt_list.is_empty() {
        return Err(RicciError::NoOffsets);
    }
    let mut offsets: Vec<f64> = dt_list.to_vec();
    offsets.sort_by(|a, b| a.total_cmp(b));
    offsets.dedup();
    if let Some(bad) = offsets.iter().find(|h| !(**h > 0.0)) {
        return Err(RicciError::BadHorizon(*bad));
    }
    let l0 = initial.equator_length();
    let mut state = initial.clone();
    let mut rising = Vec::with_capacity(offsets.len());
    for &h in &offsets {
        state = advance_to(&state, initial.t + h, None)?;
        rising.push((h, (state.equator_length() - l0) / h));
    }
    let slopes: Vec<(f64, f64)> = rising.into_iter().rev().collect();
    let m = slopes.len();
    if m == 1 {
        return Err(RicciError::ExtrapolationResidual { value: slopes[0].1, residual: f64::INFINITY });
    }
    // Neville table at h = 0; row i uses slopes[0..=i]
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(m);
    for i in 0..m {
        let mut row = vec![slopes[i].1];
        for j in 1..=i {
            let ratio = slopes[i - j].0 / slopes[i].0;
            let prev = row[j - 1];
            row.push(prev + (prev - table[i - 1][j - 1]) / (ratio - 1.0));
        }
        table.push(row);
    }
    let diagonal: Vec<f64> = (0..m).map(|i| table[i][i]).collect();
    let value = diagonal[m - 1];
    let residual = (value - diagonal[m - 2]).abs();
    let steps: Vec<f64> = diagonal.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    // below the rounding floor the table has converged and its steps are noise
    let floor = 1e-9 * value.abs().max(1.0);
    let monotone = steps.windows(2).all(|w| w[1] < w[0] || w[1] <= floor);
    if !monotone || residual > RESIDUAL_TOL * value.abs().max(1.0) {
        return Err(RicciError::ExtrapolationResidual { value, residual });
    }
    Ok(LprimeEstimate { value, residual, slopes, diagonal })
}
