//! Chebyshev series on a finite interval.
//!
//! Interpolation uses first-kind (Gauss) nodes, which never touch the
//! interval endpoints. That matters here: most of the functions being fitted
//! are singular or ill-conditioned exactly at a pole.

use std::f64::consts::PI;

/// Truncated Chebyshev expansion `sum c_k T_k(x')` with `x'` the affine image
/// of `[lo, hi]` onto `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chebyshev {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

impl Chebyshev {
    pub fn from_coeffs(lo: f64, hi: f64, coeffs: Vec<f64>) -> Self {
        assert!(hi > lo, "empty Chebyshev interval [{lo}, {hi}]");
        assert!(!coeffs.is_empty());
        Self { lo, hi, coeffs }
    }

    /// Interpolates `f` at `n` first-kind nodes.
    pub fn fit<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, n: usize) -> Self {
        let values: Vec<f64> = nodes(lo, hi, n).into_iter().map(f).collect();
        Self::from_node_values(lo, hi, &values)
    }

    /// Builds the interpolant from values sampled at [`nodes`]`(lo, hi, n)`.
    pub fn from_node_values(lo: f64, hi: f64, values: &[f64]) -> Self {
        let n = values.len();
        // cos(j (2k+1) pi / 2n) reduced through a table of size 4n
        let table: Vec<f64> = (0..4 * n).map(|m| (PI * m as f64 / (2 * n) as f64).cos()).collect();
        let mut coeffs = vec![0.0; n];
        for (j, c) in coeffs.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (k, v) in values.iter().enumerate() {
                acc += v * table[(j * (2 * k + 1)) % (4 * n)];
            }
            *c = 2.0 * acc / n as f64;
        }
        coeffs[0] *= 0.5;
        Self::from_coeffs(lo, hi, coeffs)
    }

    /// Doubles the degree until the trailing eighth of the coefficients is
    /// below `tol` relative to the largest one. Returns the last fit and
    /// whether it converged before `max_n`.
    pub fn fit_adaptive<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64, max_n: usize) -> (Self, bool) {
        let mut n = 32;
        loop {
            let fit = Self::fit(&f, lo, hi, n);
            if fit.tail_ratio() <= tol {
                return (fit.trimmed((tol * 1e-2).max(8.0 * f64::EPSILON)), true);
            }
            if n >= max_n {
                return (fit, false);
            }
            n *= 2;
        }
    }

    fn tail_ratio(&self) -> f64 {
        let n = self.coeffs.len();
        let scale = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let tail = self.coeffs[n - n / 8..].iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        tail / scale
    }

    fn trimmed(mut self, rel: f64) -> Self {
        let scale = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        while self.coeffs.len() > 2 && self.coeffs.last().is_some_and(|c| c.abs() <= rel * scale) {
            self.coeffs.pop();
        }
        self
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Clenshaw evaluation. Arguments outside `[lo, hi]` are extrapolated.
    pub fn eval(&self, x: f64) -> f64 {
        let t = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        clenshaw(&self.coeffs, t)
    }

    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        if n == 1 {
            return Self::from_coeffs(self.lo, self.hi, vec![0.0]);
        }
        let mut d = vec![0.0; n + 1];
        for k in (1..n).rev() {
            d[k - 1] = d[k + 1] + 2.0 * k as f64 * self.coeffs[k];
        }
        d.truncate(n - 1);
        d[0] *= 0.5;
        let scale = 2.0 / (self.hi - self.lo);
        d.iter_mut().for_each(|v| *v *= scale);
        Self::from_coeffs(self.lo, self.hi, d)
    }

    /// Antiderivative vanishing at `lo`.
    pub fn integral(&self) -> Self {
        let n = self.coeffs.len();
        let c = |k: usize| if k < n { self.coeffs[k] } else { 0.0 };
        let half = 0.5 * (self.hi - self.lo);
        let mut out = vec![0.0; n + 1];
        out[1] = (2.0 * c(0) - c(2)) * 0.5 * half;
        for (k, o) in out.iter_mut().enumerate().skip(2) {
            *o = (c(k - 1) - c(k + 1)) / (2.0 * k as f64) * half;
        }
        // T_k(-1) = (-1)^k
        let at_lo: f64 = out
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, v)| if k % 2 == 0 { *v } else { -*v })
            .sum();
        out[0] = -at_lo;
        Self::from_coeffs(self.lo, self.hi, out)
    }

    /// Definite integral over `[lo, hi]`.
    pub fn definite_integral(&self) -> f64 {
        let half = 0.5 * (self.hi - self.lo);
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == 0)
            .map(|(k, c)| c * 2.0 / (1.0 - (k * k) as f64))
            .sum::<f64>()
            * half
    }
}

/// First-kind Chebyshev nodes on `[lo, hi]`, in decreasing order.
pub fn nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let t = (PI * (k as f64 + 0.5) / n as f64).cos();
            0.5 * (lo + hi) + 0.5 * (hi - lo) * t
        })
        .collect()
}

pub fn clenshaw(coeffs: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + c;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + coeffs[0]
}
