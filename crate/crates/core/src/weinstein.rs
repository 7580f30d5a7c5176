//! Weinstein's integer `i = vol(M, g) / (L^n vol(S^n, can))` of a manifold
//! all of whose geodesics close with period `2 pi L`, and the discreteness of
//! admissible periods it forces on area-`4 pi` spheres: `2 / L^2` is an
//! integer.

use std::f64::consts::{PI, TAU};

use crate::geodesics::PeriodReport;
use crate::profile::ROUND_AREA;

/// Period spread above which a sweep does not certify a common period.
pub const CERTIFY_SPREAD: f64 = 1e-4;
/// Distance from an integer accepted by the discreteness check.
pub const INTEGER_TOL: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum WeinsteinError {
    #[error("only surfaces (n = 2) are supported, got n = {0}")]
    UnsupportedDimension(u32),
    #[error("volume and period parameter must be positive (volume {volume}, L {l})")]
    NonPositive { volume: f64, l: f64 },
    #[error("period spread {spread:e} exceeds {limit:e}; no common period")]
    SpreadTooLarge { spread: f64, limit: f64 },
    #[error("{0} sampled geodesics did not close")]
    Unclosed(usize),
    #[error("volume {0} is not normalized to 4 pi")]
    NotNormalized(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeinsteinDatum {
    pub volume: f64,
    pub l: f64,
    pub n: u32,
    pub i_value: f64,
    pub nearest: i64,
    pub residual: f64,
}

pub fn weinstein_integer(volume: f64, l: f64, n: u32) -> Result<WeinsteinDatum, WeinsteinError> {
    if n != 2 {
        return Err(WeinsteinError::UnsupportedDimension(n));
    }
    if !(volume > 0.0 && l > 0.0) {
        return Err(WeinsteinError::NonPositive { volume, l });
    }
    let i_value = volume / (l * l * 4.0 * PI);
    let nearest = i_value.round();
    Ok(WeinsteinDatum { volume, l, n, i_value, nearest: nearest as i64, residual: (i_value - nearest).abs() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommonPeriod {
    pub l: f64,
    pub uncertainty: f64,
}

/// `L = mean period / 2 pi` of a certified sweep.
pub fn common_period(report: &PeriodReport) -> Result<CommonPeriod, WeinsteinError> {
    let unclosed = report.entries.iter().filter(|e| e.flagged).count();
    let spread = report.summary.spread;
    if !(spread < CERTIFY_SPREAD) {
        return Err(WeinsteinError::SpreadTooLarge { spread, limit: CERTIFY_SPREAD });
    }
    if unclosed > 0 {
        return Err(WeinsteinError::Unclosed(unclosed));
    }
    Ok(CommonPeriod { l: report.summary.mean / TAU, uncertainty: spread / TAU })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discreteness {
    pub value: f64,
    pub nearest: i64,
    pub pass: bool,
}

/// Checks `2 / L^2` against the nearest integer.
pub fn discreteness_check(volume: f64, l: f64) -> Result<Discreteness, WeinsteinError> {
    if (volume - ROUND_AREA).abs() >= 1e-6 {
        return Err(WeinsteinError::NotNormalized(volume));
    }
    if !(l > 0.0) {
        return Err(WeinsteinError::NonPositive { volume, l });
    }
    let value = 2.0 / (l * l);
    let nearest = value.round();
    Ok(Discreteness { value, nearest: nearest as i64, pass: (value - nearest).abs() <= INTEGER_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesics::{PeriodEntry, PeriodReport};

    #[test]
    fn integer_examples() {
        let one = weinstein_integer(4.0 * PI, 1.0, 2).unwrap();
        assert_eq!(one.nearest, 1);
        assert!(one.residual < 1e-15);
        assert_eq!(weinstein_integer(16.0 * PI, 2.0, 2).unwrap().nearest, 1);
        let two = weinstein_integer(8.0 * PI, 1.0, 2).unwrap();
        assert_eq!(two.nearest, 2);
        assert!(two.residual < 1e-15);
        assert!(matches!(weinstein_integer(4.0 * PI, 1.0, 3), Err(WeinsteinError::UnsupportedDimension(3))));
    }

    #[test]
    fn discreteness_examples() {
        let a = discreteness_check(ROUND_AREA, 1.0).unwrap();
        assert!(a.pass && a.nearest == 2);
        let b = discreteness_check(ROUND_AREA, 0.5f64.sqrt()).unwrap();
        assert!(b.pass && b.nearest == 4);
        let c = discreteness_check(ROUND_AREA, 0.9).unwrap();
        assert!(!c.pass);
        assert!((c.value - 2.0 / 0.81).abs() < 1e-15);
        assert!(matches!(discreteness_check(5.0, 1.0), Err(WeinsteinError::NotNormalized(_))));
    }

    #[test]
    fn common_period_rejects_spread() {
        let entry = |c: f64, period: f64| PeriodEntry { clairaut_c: c, period, closure_error: 0.0, flagged: false };
        let tight = PeriodReport::from_entries(vec![entry(0.0, TAU), entry(0.5, TAU + 1e-7)]);
        let l = common_period(&tight).unwrap();
        assert!((l.l - 1.0).abs() < 1e-7);
        let loose = PeriodReport::from_entries(vec![entry(0.0, TAU), entry(0.5, TAU + 1e-2)]);
        assert!(matches!(common_period(&loose), Err(WeinsteinError::SpreadTooLarge { .. })));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn ratio_is_scale_invariant(v in 0.1f64..100.0, l in 0.1f64..10.0, lambda in 0.1f64..10.0) {
                let a = weinstein_integer(v, l, 2).unwrap().i_value;
                let b = weinstein_integer(lambda * lambda * v, lambda * l, 2).unwrap().i_value;
                prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
            }
        }
    }
}
