//! Named surfaces of revolution.
//!
//! The Michel family uses the explicit metric
//! `(1 + h(cos th))^2 dth^2 + sin^2 th dphi^2` from the Besse monograph on
//! manifolds with closed geodesics, with `h` an odd function on `[-1, 1]`
//! of sup norm below one.

use std::f64::consts::{FRAC_PI_2, SQRT_2};
use std::sync::Arc;

use crate::profile::{quarter_turn, Evaluator, MeridianCurve, PolarChart, ProfileError, ProfileMetric};
use crate::roots;

/// Constant `c = sqrt 2 - 1` of the explicit rescaled gong.
pub fn gong_scale() -> f64 {
    SQRT_2 - 1.0
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CatalogError {
    #[error("odd function needs at least one coefficient")]
    Empty,
    #[error("odd function does not vanish at x = 1 (sum of coefficients {0:e})")]
    NonVanishingEnds(f64),
    #[error("odd function reaches |h| = {0} >= 1 on [-1, 1]")]
    TooLarge(f64),
    #[error("non-finite coefficient")]
    NonFinite,
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// Odd polynomial `h(x) = sum a_k x^(2k+1)` with `h(+-1) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct OddFunction {
    coeffs: Vec<f64>,
}

impl OddFunction {
    pub fn new(coeffs: Vec<f64>) -> Result<Self, CatalogError> {
        if coeffs.is_empty() {
            return Err(CatalogError::Empty);
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(CatalogError::NonFinite);
        }
        let scale = coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        let sum: f64 = coeffs.iter().sum();
        if sum.abs() > 1e-12 * scale.max(1.0) {
            return Err(CatalogError::NonVanishingEnds(sum));
        }
        let h = Self { coeffs };
        let peak = h.sup_norm();
        if peak >= 1.0 {
            return Err(CatalogError::TooLarge(peak));
        }
        Ok(h)
    }

    /// `amplitude * x (1 - x^2)`.
    pub fn cubic(amplitude: f64) -> Result<Self, CatalogError> {
        Self::new(vec![amplitude, -amplitude])
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![0.0] }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x2 = x * x;
        self.coeffs.iter().rev().fold(0.0, |acc, a| acc * x2 + a) * x
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let x2 = x * x;
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(0.0, |acc, (k, a)| acc * x2 + (2 * k + 1) as f64 * a)
    }

    /// `max |h|` on `[-1, 1]`: dense samples plus every interior critical
    /// point located from sign changes of `h'`. Oddness means `[0, 1]`
    /// suffices.
    pub fn sup_norm(&self) -> f64 {
        const SAMPLES: usize = 2000;
        let mut best = 0.0_f64;
        let mut prev_x = 0.0;
        let mut prev_d = self.derivative(0.0);
        for k in 1..=SAMPLES {
            let x = k as f64 / SAMPLES as f64;
            best = best.max(self.eval(x).abs());
            let d = self.derivative(x);
            if d.signum() != prev_d.signum() {
                if let Some(root) = roots::bisect(|t| self.derivative(t), prev_x, x, 1e-15) {
                    best = best.max(self.eval(root).abs());
                }
            }
            prev_x = x;
            prev_d = d;
        }
        best
    }
}

/// Unit sphere, `r(z) = sqrt(1 - z^2)`.
pub fn round_sphere() -> MeridianCurve {
    let r: Evaluator = Arc::new(|z: f64| ((1.0 - z) * (1.0 + z)).max(0.0).sqrt());
    let dr: Evaluator = Arc::new(|z: f64| -z / ((1.0 - z) * (1.0 + z)).sqrt());
    let d2r: Evaluator = Arc::new(|z: f64| {
        let w2 = (1.0 - z) * (1.0 + z);
        -1.0 / (w2 * w2.sqrt())
    });
    MeridianCurve::new(r, dr, d2r, (-1.0, 1.0), true).with_polar_chart(PolarChart {
        r: Arc::new(|_, c| c),
        dr: Arc::new(|s, _| -s),
    })
}

/// Arc-length gauge of the unit sphere, `rho(s) = sin s`.
pub fn round_profile() -> ProfileMetric {
    ProfileMetric::from_chart(-1.0, 1.0, |x| quarter_turn(x).1, |_| FRAC_PI_2, true)
        .expect("round profile is well posed")
}

// Gong meridian (sqrt(1 + sqrt(1 - 16 c^2 z^2)) - 1) / c. In y = 4 c z on
// [-1, 1], with w = sqrt(1 - y^2) and q = sqrt(1 + w), r = (q - 1) / c.
fn gong_family(c: f64) -> MeridianCurve {
    let scale = 0.25 / c;
    let w_of = |y: f64| ((1.0 - y) * (1.0 + y)).max(0.0).sqrt();
    // q - 1 = w / (q + 1) avoids the cancellation near the poles
    let radius = move |w: f64| {
        let q = (1.0 + w).sqrt();
        if w > 0.5 {
            (q - 1.0) / c
        } else {
            w / ((q + 1.0) * c)
        }
    };
    let r: Evaluator = Arc::new(move |z: f64| radius(w_of(z / scale)));
    let dr: Evaluator = Arc::new(move |z: f64| {
        let y = z / scale;
        let w = w_of(y);
        -2.0 * y / ((1.0 + w).sqrt() * w)
    });
    let d2r: Evaluator = Arc::new(move |z: f64| {
        let y = z / scale;
        let w = w_of(y);
        let q = (1.0 + w).sqrt();
        let q2 = q * q;
        -2.0 / scale * (1.0 / (q * w) + y * y * (w + 2.0 * q2) / (2.0 * q2 * q * w * w * w))
    });
    MeridianCurve::new(r, dr, d2r, (-scale, scale), true).with_polar_chart(PolarChart {
        r: Arc::new(move |_, w| radius(w)),
        dr: Arc::new(move |s, w| -0.5 * s / ((1.0 + w).sqrt() * c)),
    })
}

/// Gambier's gong, `r(z) = 4 (sqrt(1 + sqrt(1 - z^2)) - 1)` on `[-1, 1]`.
pub fn gong_raw() -> MeridianCurve {
    gong_family(0.25)
}

/// The gong shrunk by `4c`, `c = sqrt 2 - 1`, so that the equator radius is 1:
/// `r(z) = (sqrt(1 + sqrt(1 - 16 (c z)^2)) - 1) / c` on `|z| <= 1/(4c)`.
///
/// Its area is `(176 pi/3 - 16 pi^2) / (16 c^2)`, about 9.614, not `4 pi`;
/// [`crate::profile::normalize_to_volume`] gives the area-`4 pi` gong.
pub fn gong_normalized() -> MeridianCurve {
    gong_family(gong_scale())
}

/// Michel–Besse Zoll surface generated by `h`.
///
/// `n_nodes` caps the size of the arc-length sampling grid.
pub fn michel_surface(h: &OddFunction, n_nodes: usize) -> Result<ProfileMetric, CatalogError> {
    let for_speed = h.clone();
    let symmetric = h.coeffs.iter().all(|c| *c == 0.0);
    // theta = pi (x + 1)/2, so sin theta = cos(pi x/2) and cos theta = -sin(pi x/2)
    let metric = ProfileMetric::from_chart_limited(
        -1.0,
        1.0,
        |x| quarter_turn(x).1,
        move |x| FRAC_PI_2 * (1.0 + for_speed.eval(-quarter_turn(x).0)),
        symmetric,
        n_nodes.max(64),
    )?;
    Ok(metric)
}
