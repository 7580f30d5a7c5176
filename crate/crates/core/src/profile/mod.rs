//! Axisymmetric metrics in three gauges and the conversions between them.
//!
//! * [`MeridianCurve`]: embedded profile `r(z)`.
//! * [`ProfileMetric`]: arc-length gauge `ds^2 + rho(s)^2 dphi^2`.
//! * [`ConformalProfile`]: `e^{2u}` times the round metric, on a uniform
//!   `theta` grid.

mod conformal;
mod meridian;
mod metric;

use std::f64::consts::PI;

pub use conformal::{ConformalProfile, IsothermalMap};
pub use meridian::{AngleEvaluator, Evaluator, MeridianCurve, PolarChart};
pub(crate) use meridian::quarter_turn;
pub use metric::{ParamChart, ProfileMetric};

use crate::quad::{self, QuadError};

/// Area of the unit round sphere.
pub const ROUND_AREA: f64 = 4.0 * PI;

const AREA_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("z = {z} lies outside the meridian domain [{lo}, {hi}]")]
    OutsideDomain { z: f64, lo: f64, hi: f64 },
    #[error("z = {z} is within {guard:e} of a pole; use the arc-length or conformal gauge there")]
    NearPole { z: f64, guard: f64 },
    #[error("arc length {s} lies outside the open interval (0, {total})")]
    OutsideArclength { s: f64, total: f64 },
    #[error("invalid meridian: {0}")]
    InvalidMeridian(String),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("target area must be positive, got {0}")]
    NonPositiveArea(f64),
    #[error("profile is not reflection symmetric (defect {0:e})")]
    NotSymmetric(f64),
    #[error("profile area {0} is not normalized to 4 pi")]
    NotNormalized(f64),
    #[error("arc-length map is not monotone (minimum speed {0})")]
    NotMonotone(f64),
    #[error("Chebyshev fit of the {0} did not converge")]
    Resolution(&'static str),
    #[error("conformal grid needs at least {min} nodes, got {0}", min = ConformalProfile::MIN_NODES)]
    GridTooSmall(usize),
    #[error("non-finite conformal value {0}")]
    NonFinite(f64),
}

/// `K(z) = -r''(z) / (r(z) (r'(z)^2 + 1)^2)`.
pub fn curvature_meridian(m: &MeridianCurve, z: f64) -> Result<f64, ProfileError> {
    let (lo, hi) = m.domain();
    if !(z >= lo && z <= hi) {
        return Err(ProfileError::OutsideDomain { z, lo, hi });
    }
    let guard = m.pole_guard();
    if z - lo < guard || hi - z < guard {
        return Err(ProfileError::NearPole { z, guard });
    }
    let slope = m.dr(z);
    let bend = 1.0 + slope * slope;
    Ok(-m.d2r(z) / (m.r(z) * bend * bend))
}

/// `K(s) = -rho''(s) / rho(s)`.
pub fn curvature_arclength(p: &ProfileMetric, s: f64) -> Result<f64, ProfileError> {
    let total = p.total_length();
    if !(s > 0.0 && s < total) {
        return Err(ProfileError::OutsideArclength { s, total });
    }
    Ok(-p.d2rho(s) / p.rho(s))
}

/// `A = integral 2 pi r sqrt(1 + r'^2) dz`, integrated in the polar angle
/// where the integrand is bounded.
pub fn area(m: &MeridianCurve) -> Result<f64, ProfileError> {
    let half_pi = 0.5 * PI;
    let res = quad::integrate(|chi| 2.0 * PI * m.r_chi(chi) * m.speed_chi(chi), -half_pi, half_pi, AREA_TOL)?;
    Ok(res.value)
}

/// `(1/A) integral K dA`. The integrand `K dA = -2 pi r''/(1+r'^2)^{3/2} dz`
/// is finite up to the poles.
pub fn average_curvature(m: &MeridianCurve) -> Result<f64, ProfileError> {
    let half_pi = 0.5 * PI;
    let total = quad::integrate(
        |chi| {
            let z = m.z_of_chi(chi);
            let slope = m.dr(z);
            let bend = 1.0 + slope * slope;
            let v = -2.0 * PI * m.d2r(z) / (bend * bend.sqrt()) * m.half_width() * chi.cos();
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        -half_pi,
        half_pi,
        AREA_TOL,
    )?;
    Ok(total.value / area(m)?)
}

/// Homothety onto the requested area.
pub fn normalize_to_volume(m: &MeridianCurve, target_area: f64) -> Result<MeridianCurve, ProfileError> {
    if !(target_area > 0.0 && target_area.is_finite()) {
        return Err(ProfileError::NonPositiveArea(target_area));
    }
    let current = area(m)?;
    let lambda = (target_area / current).sqrt();
    if (lambda - 1.0).abs() < 1e-15 {
        return Ok(m.clone());
    }
    Ok(m.scaled(lambda))
}

/// Arc-length gauge of a meridian, parametrized by `y = 2 chi / pi`.
pub fn to_arclength(m: &MeridianCurve) -> Result<ProfileMetric, ProfileError> {
    let chart = m.clone();
    let speed = m.clone();
    ProfileMetric::from_chart(
        -1.0,
        1.0,
        move |y| chart.polar_point(y).0,
        move |y| speed.polar_point(y).1,
        m.is_symmetric(),
    )
}

/// Conformal exponent on `n_nodes` uniform `theta` nodes, equator at `pi/2`.
pub fn to_conformal(p: &ProfileMetric, n_nodes: usize) -> Result<ConformalProfile, ProfileError> {
    if !p.is_symmetric() {
        return Err(ProfileError::NotSymmetric(f64::NAN));
    }
    let a = p.area();
    if (a - ROUND_AREA).abs() > 1e-6 {
        return Err(ProfileError::NotNormalized(a));
    }
    if n_nodes < ConformalProfile::MIN_NODES {
        return Err(ProfileError::GridTooSmall(n_nodes));
    }
    conformal::build_conformal(p, n_nodes)
}

/// Discrete curvature at grid node `j`.
pub fn conformal_curvature(c: &ConformalProfile, j: usize) -> f64 {
    let n = c.n_nodes();
    assert!(j < n, "node {j} outside a {n}-node grid");
    let u = c.values();
    let lap = conformal::laplacian_at(u, c.spacing(), j);
    (-2.0 * u[j]).exp() * (1.0 - lap)
}

#[cfg(test)]
mod tests;
