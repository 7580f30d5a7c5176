use std::fmt;
use std::sync::Arc;

use super::ProfileError;

/// Pure scalar evaluator shared between threads.
pub type Evaluator = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
/// Function of an angle given as `(sin, cos)`.
pub type AngleEvaluator = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// `(sin, cos)` of `pi x / 2`, with relative accuracy kept near `x = +-1`
/// where the cosine vanishes.
pub(crate) fn quarter_turn(x: f64) -> (f64, f64) {
    use std::f64::consts::FRAC_PI_2;
    if x > 0.5 {
        let (s, c) = (FRAC_PI_2 * (1.0 - x)).sin_cos();
        (c, s)
    } else if x < -0.5 {
        let (s, c) = (FRAC_PI_2 * (1.0 + x)).sin_cos();
        (-c, s)
    } else {
        (FRAC_PI_2 * x).sin_cos()
    }
}

/// The meridian expressed in the angle `chi` with `z = mid + half * sin(chi)`.
///
/// Near the poles `z` is a poor coordinate: `1 - z^2` loses every significant
/// digit. Analytic surfaces provide `r` and `dr/dchi` in this chart directly,
/// as functions of `(sin chi, cos chi)`.
#[derive(Clone)]
pub struct PolarChart {
    pub r: AngleEvaluator,
    pub dr: AngleEvaluator,
}

/// Embedded profile `r(z)` of a surface of revolution
/// `(r(z) cos th, r(z) sin th, z)`.
#[derive(Clone)]
pub struct MeridianCurve {
    r: Evaluator,
    dr: Evaluator,
    d2r: Evaluator,
    domain: (f64, f64),
    symmetric: bool,
    polar: Option<PolarChart>,
}

impl fmt::Debug for MeridianCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeridianCurve")
            .field("domain", &self.domain)
            .field("symmetric", &self.symmetric)
            .field("polar_chart", &self.polar.is_some())
            .finish()
    }
}

impl MeridianCurve {
    /// Curve with analytic first and second derivatives.
    pub fn new(r: Evaluator, dr: Evaluator, d2r: Evaluator, domain: (f64, f64), symmetric: bool) -> Self {
        assert!(domain.1 > domain.0, "degenerate meridian domain");
        Self { r, dr, d2r, domain, symmetric, polar: None }
    }

    /// Curve given only by its radius; derivatives come from second-order
    /// central differences with step `1e-6 * width`.
    pub fn from_radius(r: Evaluator, domain: (f64, f64), symmetric: bool) -> Self {
        let h = 1e-6 * (domain.1 - domain.0);
        let r1 = r.clone();
        let r2 = r.clone();
        let dr: Evaluator = Arc::new(move |z| (r1(z + h) - r1(z - h)) / (2.0 * h));
        let d2r: Evaluator = Arc::new(move |z| (r2(z + h) - 2.0 * r2(z) + r2(z - h)) / (h * h));
        Self::new(r, dr, d2r, domain, symmetric)
    }

    pub fn with_polar_chart(mut self, chart: PolarChart) -> Self {
        self.polar = Some(chart);
        self
    }

    pub fn r(&self, z: f64) -> f64 {
        (self.r)(z)
    }

    pub fn dr(&self, z: f64) -> f64 {
        (self.dr)(z)
    }

    pub fn d2r(&self, z: f64) -> f64 {
        (self.d2r)(z)
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.domain.0 + self.domain.1)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.domain.1 - self.domain.0)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Minimum distance from a pole at which the z-gauge curvature formula is
    /// evaluated.
    pub fn pole_guard(&self) -> f64 {
        1e-6 * (self.domain.1 - self.domain.0)
    }

    pub fn z_of_chi(&self, chi: f64) -> f64 {
        self.mid() + self.half_width() * chi.sin()
    }

    pub fn chi_of_z(&self, z: f64) -> f64 {
        ((z - self.mid()) / self.half_width()).clamp(-1.0, 1.0).asin()
    }

    /// Radius in the polar chart.
    pub fn r_chi(&self, chi: f64) -> f64 {
        let (s, c) = chi.sin_cos();
        self.r_angle(s, c)
    }

    /// `dr/dchi`; finite at the poles for a smoothly capped meridian.
    pub fn dr_chi(&self, chi: f64) -> f64 {
        let (s, c) = chi.sin_cos();
        self.dr_angle(s, c)
    }

    /// Arc-length speed `ds/dchi`.
    pub fn speed_chi(&self, chi: f64) -> f64 {
        let (s, c) = chi.sin_cos();
        (self.half_width() * c).hypot(self.dr_angle(s, c))
    }

    fn r_angle(&self, s: f64, c: f64) -> f64 {
        match &self.polar {
            Some(p) => (p.r)(s, c),
            None => self.r(self.mid() + self.half_width() * s),
        }
    }

    fn dr_angle(&self, s: f64, c: f64) -> f64 {
        match &self.polar {
            Some(p) => (p.dr)(s, c),
            None => self.dr(self.mid() + self.half_width() * s) * self.half_width() * c,
        }
    }

    /// Radius and arc-length speed at `chi = pi y / 2`, `y in [-1, 1]`.
    pub(crate) fn polar_point(&self, y: f64) -> (f64, f64) {
        let (s, c) = quarter_turn(y);
        let speed = (self.half_width() * c).hypot(self.dr_angle(s, c));
        (self.r_angle(s, c), std::f64::consts::FRAC_PI_2 * speed)
    }

    /// Homothety `(r, z) -> (lambda r, lambda z)`.
    pub fn scaled(&self, lambda: f64) -> Self {
        assert!(lambda > 0.0 && lambda.is_finite(), "scale factor must be positive");
        let (r, dr, d2r) = (self.r.clone(), self.dr.clone(), self.d2r.clone());
        let polar = self.polar.clone().map(|p| {
            let (pr, pdr) = (p.r, p.dr);
            PolarChart {
                r: Arc::new(move |s, c| lambda * pr(s, c)) as AngleEvaluator,
                dr: Arc::new(move |s, c| lambda * pdr(s, c)) as AngleEvaluator,
            }
        });
        Self {
            r: Arc::new(move |z| lambda * r(z / lambda)),
            dr: Arc::new(move |z| dr(z / lambda)),
            d2r: Arc::new(move |z| d2r(z / lambda) / lambda),
            domain: (lambda * self.domain.0, lambda * self.domain.1),
            symmetric: self.symmetric,
            polar,
        }
    }

    /// Checks the pole, positivity, smooth-cap and symmetry conditions on a
    /// sample of the domain.
    pub fn validate(&self) -> Result<(), ProfileError> {
        let (lo, hi) = self.domain;
        let width = hi - lo;
        let scale = self.r_chi(0.0).abs().max(width);
        for (name, rz) in [("lower", self.r(lo)), ("upper", self.r(hi))] {
            if !(rz.abs() <= 1e-8 * scale) {
                return Err(ProfileError::InvalidMeridian(format!("{name} pole radius {rz} is not zero")));
            }
        }
        for k in 1..200 {
            let z = lo + width * k as f64 / 200.0;
            let rz = self.r(z);
            if !(rz > 0.0) {
                return Err(ProfileError::InvalidMeridian(format!("radius {rz} at z = {z} is not positive")));
            }
            if self.symmetric {
                let mirror = self.r(2.0 * self.mid() - z);
                if (mirror - rz).abs() > 1e-10 * scale {
                    return Err(ProfileError::InvalidMeridian(format!("r({z}) differs from its reflection")));
                }
            }
        }
        let near = 1e-4 * width;
        for z in [lo + near, hi - near] {
            let slope = self.dr(z).abs();
            if !(slope > 10.0) {
                return Err(ProfileError::InvalidMeridian(format!(
                    "slope {slope} near z = {z} does not blow up; the cap is not smooth"
                )));
            }
        }
        Ok(())
    }
}
