use std::f64::consts::PI;
use std::fmt;

use super::meridian::Evaluator;
use super::ProfileError;
use crate::cheb::{self, Chebyshev};
use crate::roots;

const FIT_TOL: f64 = 1e-14;
const MAX_NODES: usize = 4096;

/// A parametrization `x in [lo, hi]` of the meridian with the parallel radius
/// `rho(x)` and arc-length speed `ds/dx`. Both ends are poles.
#[derive(Clone)]
pub struct ParamChart {
    lo: f64,
    hi: f64,
    rho: Evaluator,
    speed: Chebyshev,
    arclength: Chebyshev,
}

impl ParamChart {
    pub fn lo(&self) -> f64 {
        self.lo
    }
    pub fn hi(&self) -> f64 {
        self.hi
    }
    pub fn rho(&self, x: f64) -> f64 {
        (self.rho)(x)
    }
    pub fn speed(&self, x: f64) -> f64 {
        self.speed.eval(x)
    }
    pub fn arclength(&self, x: f64) -> f64 {
        self.arclength.eval(x)
    }
}

/// Intrinsic axisymmetric metric `ds^2 + rho(s)^2 dphi^2` on `s in [0, S]`.
///
/// `rho` is held as a Chebyshev series in `s`; the series is built once from a
/// chart by inverting the arc-length map at the Chebyshev nodes.
#[derive(Clone)]
pub struct ProfileMetric {
    total_length: f64,
    rho: Chebyshev,
    drho: Chebyshev,
    d2rho: Chebyshev,
    grid_s: Vec<f64>,
    grid_rho: Vec<f64>,
    symmetric: bool,
    chart: ParamChart,
}

impl fmt::Debug for ProfileMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProfileMetric")
            .field("total_length", &self.total_length)
            .field("symmetric", &self.symmetric)
            .field("degree", &self.rho.len())
            .finish()
    }
}

impl ProfileMetric {
    /// Builds the arc-length gauge from a chart. `speed` must be strictly
    /// positive on `[lo, hi]`.
    pub fn from_chart<R, V>(lo: f64, hi: f64, rho: R, speed: V, symmetric: bool) -> Result<Self, ProfileError>
    where
        R: Fn(f64) -> f64 + Send + Sync + 'static,
        V: Fn(f64) -> f64,
    {
        Self::from_chart_limited(lo, hi, rho, speed, symmetric, MAX_NODES)
    }

    /// As [`ProfileMetric::from_chart`] with at most `max_nodes` Chebyshev
    /// nodes per fit.
    pub fn from_chart_limited<R, V>(
        lo: f64,
        hi: f64,
        rho: R,
        speed: V,
        symmetric: bool,
        max_nodes: usize,
    ) -> Result<Self, ProfileError>
    where
        R: Fn(f64) -> f64 + Send + Sync + 'static,
        V: Fn(f64) -> f64,
    {
        let rho: Evaluator = std::sync::Arc::new(rho);
        let (speed_fit, ok) = Chebyshev::fit_adaptive(&speed, lo, hi, FIT_TOL, max_nodes);
        if !ok {
            return Err(ProfileError::Resolution("arc-length speed"));
        }
        let min_speed = cheb::nodes(lo, hi, 4 * speed_fit.len().max(64))
            .into_iter()
            .map(|x| speed_fit.eval(x))
            .fold(f64::INFINITY, f64::min);
        if !(min_speed > 0.0) {
            return Err(ProfileError::NotMonotone(min_speed));
        }
        let arclength = speed_fit.integral();
        let total_length = arclength.eval(hi);
        let chart = ParamChart { lo, hi, rho, speed: speed_fit, arclength };

        let (rho_s, ok) = Chebyshev::fit_adaptive(
            |s| chart.rho(invert_arclength(&chart, s)),
            0.0,
            total_length,
            FIT_TOL,
            max_nodes,
        );
        if !ok {
            return Err(ProfileError::Resolution("parallel radius"));
        }
        let grid_s = cheb::nodes(0.0, total_length, rho_s.len());
        let grid_rho = grid_s.iter().map(|&s| rho_s.eval(s)).collect();
        let drho = rho_s.derivative();
        let d2rho = drho.derivative();
        let metric = Self { total_length, rho: rho_s, drho, d2rho, grid_s, grid_rho, symmetric, chart };
        if symmetric {
            metric.check_symmetry()?;
        }
        Ok(metric)
    }

    fn check_symmetry(&self) -> Result<(), ProfileError> {
        let len = self.total_length;
        let scale = self.grid_rho.iter().fold(0.0_f64, |m, r| m.max(r.abs()));
        let worst = (1..100)
            .map(|k| {
                let s = len * k as f64 / 200.0;
                (self.rho(s) - self.rho(len - s)).abs()
            })
            .fold(0.0, f64::max);
        if worst > 1e-9 * scale {
            return Err(ProfileError::NotSymmetric(worst));
        }
        Ok(())
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn rho(&self, s: f64) -> f64 {
        self.rho.eval(s)
    }

    pub fn drho(&self, s: f64) -> f64 {
        self.drho.eval(s)
    }

    pub fn d2rho(&self, s: f64) -> f64 {
        self.d2rho.eval(s)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn chart(&self) -> &ParamChart {
        &self.chart
    }

    /// Chebyshev nodes in `s` with the cached radii.
    pub fn grid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid_s.iter().copied().zip(self.grid_rho.iter().copied())
    }

    pub fn arclength_of_param(&self, x: f64) -> f64 {
        self.chart.arclength(x)
    }

    pub fn param_of_arclength(&self, s: f64) -> f64 {
        invert_arclength(&self.chart, s)
    }

    /// `2 pi integral rho ds`.
    pub fn area(&self) -> f64 {
        2.0 * PI * self.rho.definite_integral()
    }

    /// Area average of `K = -rho''/rho`; `K dA = -2 pi rho'' ds` integrates in
    /// closed form to the end slopes.
    pub fn average_curvature(&self) -> f64 {
        let total = 2.0 * PI * (self.drho(0.0) - self.drho(self.total_length));
        total / self.area()
    }

    /// Arc position and radius of the widest parallel.
    pub fn widest_parallel(&self) -> (f64, f64) {
        if self.symmetric {
            let s = 0.5 * self.total_length;
            return (s, self.rho(s));
        }
        let (mut best_s, mut best) = (0.0, f64::NEG_INFINITY);
        for (s, r) in self.grid() {
            if r > best {
                best = r;
                best_s = s;
            }
        }
        // refine on the slope; rho is concave near its maximum
        let h = self.total_length / self.grid_s.len() as f64 * 4.0;
        let lo = (best_s - h).max(0.0);
        let hi = (best_s + h).min(self.total_length);
        if let Some(s) = roots::bisect(|s| self.drho(s), lo, hi, 1e-14) {
            best_s = s;
        }
        (best_s, self.rho(best_s))
    }
}

fn invert_arclength(chart: &ParamChart, s: f64) -> f64 {
    roots::newton_bracketed(
        |x| chart.arclength(x) - s,
        |x| chart.speed(x),
        chart.lo,
        chart.hi,
        1e-15 * (chart.hi - chart.lo).max(1.0),
    )
}
