//! Conformal gauge `g = e^{2u} (d theta^2 + sin^2 theta d phi^2)`.
//!
//! The discrete Laplacian is the flux form of
//! `(1/sin th) d/dth (sin th du/dth)`: central differences with face weights
//! `sin th_{j +- 1/2}`, and the pole rows reduce to the regularity limit
//! `4 (u_1 - u_0)/dth^2 = 2 u_thth`. Paired with the exact zone areas as
//! quadrature weights its area integral telescopes to zero, so the discrete
//! Gauss–Bonnet identity holds to rounding.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use super::metric::ProfileMetric;
use super::{quarter_turn, ProfileError};
use crate::cheb::{self, Chebyshev};
use crate::roots;

/// Conformal exponent sampled on `n` uniform nodes `theta_j = j pi/(n-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalProfile {
    u: Vec<f64>,
}

impl ConformalProfile {
    pub const MIN_NODES: usize = 8;

    pub fn new(u: Vec<f64>) -> Result<Self, ProfileError> {
        if u.len() < Self::MIN_NODES {
            return Err(ProfileError::GridTooSmall(u.len()));
        }
        if let Some(bad) = u.iter().find(|v| !v.is_finite()) {
            return Err(ProfileError::NonFinite(*bad));
        }
        Ok(Self { u })
    }

    pub fn round(n_nodes: usize) -> Result<Self, ProfileError> {
        Self::new(vec![0.0; n_nodes])
    }

    pub fn n_nodes(&self) -> usize {
        self.u.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.u
    }

    pub fn spacing(&self) -> f64 {
        PI / (self.u.len() - 1) as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        j as f64 * self.spacing()
    }

    pub fn equator_index(&self) -> Option<usize> {
        let n = self.u.len();
        (n % 2 == 1).then_some(n / 2)
    }

    /// `u(pi/2)`; interpolated between the two central nodes for even grids.
    pub fn equator_value(&self) -> f64 {
        match self.equator_index() {
            Some(j) => self.u[j],
            None => cosine_series(&self.u).eval_theta(0.5 * PI),
        }
    }

    pub fn symmetry_defect(&self) -> f64 {
        let n = self.u.len();
        (0..n / 2).map(|j| (self.u[j] - self.u[n - 1 - j]).abs()).fold(0.0, f64::max)
    }

    pub(crate) fn symmetrize(&mut self) {
        let n = self.u.len();
        for j in 0..n / 2 {
            let avg = 0.5 * (self.u[j] + self.u[n - 1 - j]);
            self.u[j] = avg;
            self.u[n - 1 - j] = avg;
        }
    }

    /// Discrete `Delta_0 u` at every node.
    pub fn laplacian(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.u.len()).map(|j| laplacian_at(&self.u, h, j)).collect()
    }

    /// Gaussian curvature `e^{-2u} (1 - Delta_0 u)` at every node.
    pub fn curvatures(&self) -> Vec<f64> {
        self.laplacian()
            .into_iter()
            .zip(&self.u)
            .map(|(lap, u)| (-2.0 * u).exp() * (1.0 - lap))
            .collect()
    }

    /// Round-sphere area of each node's zone; they sum to `4 pi`.
    pub fn zone_areas(&self) -> Vec<f64> {
        let n = self.u.len();
        let h = self.spacing();
        (0..n)
            .map(|j| {
                let top = (j as f64 * h - 0.5 * h).max(0.0);
                let bottom = (j as f64 * h + 0.5 * h).min(PI);
                2.0 * PI * (top.cos() - bottom.cos())
            })
            .collect()
    }

    pub fn area(&self) -> f64 {
        self.zone_areas().iter().zip(&self.u).map(|(w, u)| w * (2.0 * u).exp()).sum()
    }

    /// Returns to the arc-length gauge: `rho = e^u sin th`, `ds = e^u dth`,
    /// with `u` continued between nodes by its cosine interpolant. The chart
    /// parameter is `x = 2 th / pi - 1`.
    pub fn to_profile_metric(&self) -> Result<ProfileMetric, ProfileError> {
        let series = Arc::new(cosine_series(&self.u));
        let symmetric = self.symmetry_defect() <= 1e-12;
        let for_rho = series.clone();
        ProfileMetric::from_chart(
            -1.0,
            1.0,
            move |x| {
                let (s, c) = quarter_turn(x);
                for_rho.eval_cos(-s).exp() * c
            },
            move |x| FRAC_PI_2 * series.eval_cos(-quarter_turn(x).0).exp(),
            symmetric,
        )
    }
}

pub(crate) fn laplacian_at(u: &[f64], h: f64, j: usize) -> f64 {
    let n = u.len();
    let h2 = h * h;
    if j == 0 || j == n - 1 {
        let inner = if j == 0 { u[1] } else { u[n - 2] };
        return 4.0 * (0.25 * h).cos().powi(2) / h2 * (inner - u[j]);
    }
    let th = j as f64 * h;
    let up = (th + 0.5 * h).sin();
    let down = (th - 0.5 * h).sin();
    (up * (u[j + 1] - u[j]) - down * (u[j] - u[j - 1])) / (th.sin() * h2)
}

/// `u(theta) = sum a_k cos(k theta)`, exact at the grid nodes. Written in
/// `x = cos theta` this is a Chebyshev series.
pub(crate) struct CosineSeries(Vec<f64>);

impl CosineSeries {
    pub fn eval_theta(&self, theta: f64) -> f64 {
        self.eval_cos(theta.cos())
    }

    pub fn eval_cos(&self, cos_theta: f64) -> f64 {
        cheb::clenshaw(&self.0, cos_theta)
    }
}

pub(crate) fn cosine_series(u: &[f64]) -> CosineSeries {
    let n = u.len() - 1;
    let table: Vec<f64> = (0..2 * n).map(|m| (PI * m as f64 / n as f64).cos()).collect();
    let mut a = vec![0.0; n + 1];
    for (k, ak) in a.iter_mut().enumerate() {
        let mut acc = 0.5 * (u[0] + if k % 2 == 0 { u[n] } else { -u[n] });
        for (j, uj) in u.iter().enumerate().take(n).skip(1) {
            acc += uj * table[(k * j) % (2 * n)];
        }
        *ak = 2.0 * acc / n as f64;
    }
    a[0] *= 0.5;
    a[n] *= 0.5;
    CosineSeries(a)
}

/// Isothermal coordinate of a profile matched to the Mercator coordinate
/// `q = ln tan(theta/2)` of the round sphere, anchored at the equator.
pub struct IsothermalMap<'a> {
    metric: &'a ProfileMetric,
    anchor_param: f64,
    // smooth part of dt/dx after removing the two pole logarithms
    regular: Chebyshev,
}

impl<'a> IsothermalMap<'a> {
    pub fn new(metric: &'a ProfileMetric) -> Result<Self, ProfileError> {
        let chart = metric.chart();
        let (lo, hi) = (chart.lo(), chart.hi());
        let smooth = |x: f64| chart.speed(x) / chart.rho(x) - 1.0 / (x - lo) - 1.0 / (hi - x);
        let (fit, ok) = Chebyshev::fit_adaptive(smooth, lo, hi, 1e-13, 4096);
        if !ok {
            return Err(ProfileError::Resolution("isothermal coordinate"));
        }
        let anchor_param = metric.param_of_arclength(0.5 * metric.total_length());
        let mut map = Self { metric, anchor_param, regular: fit.integral() };
        let shift = map.raw(anchor_param);
        let mut c = map.regular.coeffs().to_vec();
        c[0] -= shift;
        map.regular = Chebyshev::from_coeffs(lo, hi, c);
        Ok(map)
    }

    fn raw(&self, x: f64) -> f64 {
        let chart = self.metric.chart();
        self.regular.eval(x) + ((x - chart.lo()) / (chart.hi() - x)).ln()
    }

    /// Isothermal coordinate `t(x)`; zero at the equator.
    pub fn isothermal(&self, x: f64) -> f64 {
        self.raw(x)
    }

    pub fn anchor_param(&self) -> f64 {
        self.anchor_param
    }

    /// Chart parameter whose isothermal coordinate equals `q(theta)`.
    pub fn param_at_theta(&self, theta: f64) -> f64 {
        self.param_at(Colatitude::of(theta))
    }

    fn param_at(&self, at: Colatitude) -> f64 {
        let chart = self.metric.chart();
        let (lo, hi) = (chart.lo(), chart.hi());
        match at {
            Colatitude::North(a) if a <= 0.0 => return lo,
            Colatitude::South(a) if a <= 0.0 => return hi,
            _ => {}
        }
        let q = at.mercator();
        let dt = |x: f64| chart.speed(x) / chart.rho(x);
        roots::newton_bracketed(|x| self.raw(x) - q, dt, lo, hi, 1e-15 * (hi - lo))
    }

    pub fn arclength_at_theta(&self, theta: f64) -> f64 {
        self.metric.arclength_of_param(self.param_at_theta(theta))
    }

    /// `u(theta) = ln(rho / sin theta)`, with the pole limits in closed form.
    pub fn conformal_exponent(&self, theta: f64) -> f64 {
        self.exponent_at(Colatitude::of(theta))
    }

    fn exponent_at(&self, at: Colatitude) -> f64 {
        let chart = self.metric.chart();
        let (lo, hi) = (chart.lo(), chart.hi());
        let width = hi - lo;
        match at {
            Colatitude::North(a) if a <= 0.0 => (0.5 * chart.speed(lo) * width).ln() - self.regular.eval(lo),
            Colatitude::South(a) if a <= 0.0 => (0.5 * chart.speed(hi) * width).ln() + self.regular.eval(hi),
            Colatitude::North(a) | Colatitude::South(a) => {
                let x = self.param_at(at);
                (chart.rho(x) / a.sin()).ln()
            }
        }
    }
}

/// A colatitude held as its distance from the nearer pole, so that
/// `sin theta` and `ln tan(theta/2)` keep full relative accuracy.
#[derive(Debug, Clone, Copy)]
enum Colatitude {
    North(f64),
    South(f64),
}

impl Colatitude {
    fn of(theta: f64) -> Self {
        if theta <= FRAC_PI_2 {
            Colatitude::North(theta.max(0.0))
        } else {
            Colatitude::South((PI - theta).max(0.0))
        }
    }

    fn node(j: usize, n: usize) -> Self {
        let h = PI / (n - 1) as f64;
        if 2 * j < n {
            Colatitude::North(j as f64 * h)
        } else {
            Colatitude::South((n - 1 - j) as f64 * h)
        }
    }

    fn mercator(self) -> f64 {
        match self {
            Colatitude::North(a) => (0.5 * a).tan().ln(),
            Colatitude::South(a) => -(0.5 * a).tan().ln(),
        }
    }
}

pub(crate) fn build_conformal(metric: &ProfileMetric, n_nodes: usize) -> Result<ConformalProfile, ProfileError> {
    let map = IsothermalMap::new(metric)?;
    let mut u: Vec<f64> = (0..n_nodes).map(|j| map.exponent_at(Colatitude::node(j, n_nodes))).collect();
    // the reflection is exact in the continuum; remove rounding asymmetry
    for j in 0..n_nodes / 2 {
        let avg = 0.5 * (u[j] + u[n_nodes - 1 - j]);
        u[j] = avg;
        u[n_nodes - 1 - j] = avg;
    }
    ConformalProfile::new(u)
}
