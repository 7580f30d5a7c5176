use std::f64::consts::{FRAC_PI_2, PI, SQRT_2, TAU};
use super::*;
use crate::catalog::{self, OddFunction};

// Closed forms of the raw gong, paired with an independent high-precision
// quadrature in the polar angle:
//   area = 176 pi / 3 - 16 pi^2, meridian length = 2 pi - 2.
fn raw_gong_area() -> f64 {
    176.0 * PI / 3.0 - 16.0 * PI * PI
}

fn raw_gong_meridian_length() -> f64 {
    TAU - 2.0
}

fn radius_sphere(radius: f64) -> MeridianCurve {
    catalog::round_sphere().scaled(radius)
}

fn area_normalized_gong() -> MeridianCurve {
    normalize_to_volume(&catalog::gong_raw(), ROUND_AREA).unwrap()
}

// five-point stencils on the raw radius only
fn fd_curvature(m: &MeridianCurve, z: f64) -> f64 {
    let h = 1e-3;
    let r = |x: f64| m.r(x);
    let d1 = (r(z - 2.0 * h) - 8.0 * r(z - h) + 8.0 * r(z + h) - r(z + 2.0 * h)) / (12.0 * h);
    let d2 = (-r(z - 2.0 * h) + 16.0 * r(z - h) - 30.0 * r(z) + 16.0 * r(z + h) - r(z + 2.0 * h)) / (12.0 * h * h);
    -d2 / (r(z) * (1.0 + d1 * d1).powi(2))
}

/// Arc position of the meridian point at height `z`.
fn arclength_at_z(m: &MeridianCurve, p: &ProfileMetric, z: f64) -> f64 {
    p.arclength_of_param(m.chi_of_z(z) / FRAC_PI_2)
}

#[test]
fn unit_sphere_has_unit_curvature() {
    let m = catalog::round_sphere();
    assert!((curvature_meridian(&m, 0.3).unwrap() - 1.0).abs() < 1e-14);
    assert!((curvature_meridian(&m, -0.9).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn gong_equator_curvature() {
    let kappa = curvature_meridian(&catalog::gong_normalized(), 0.0).unwrap();
    assert!((kappa - 4.0 * (2.0 - SQRT_2)).abs() < 1e-12);
    assert!((kappa - 2.3431458).abs() < 1e-7);

    let raw = catalog::gong_raw();
    let oracle = fd_curvature(&raw, 0.0);
    assert!((oracle - (2.0 + SQRT_2) / 4.0).abs() < 1e-8, "oracle {oracle}");
    assert!((curvature_meridian(&raw, 0.0).unwrap() - oracle).abs() < 1e-8);
}

#[test]
fn analytic_second_derivatives_match_finite_differences() {
    for m in [catalog::gong_raw(), catalog::gong_normalized()] {
        let (lo, hi) = m.domain();
        for k in 1..20 {
            let z = lo + (hi - lo) * (0.1 + 0.8 * k as f64 / 20.0);
            let exact = curvature_meridian(&m, z).unwrap();
            assert!((exact - fd_curvature(&m, z)).abs() < 1e-6 * exact.abs().max(1.0), "z = {z}");
        }
    }
}

#[test]
fn meridian_curvature_rejects_poles_and_outside_points() {
    let m = catalog::gong_normalized();
    let (lo, hi) = m.domain();
    assert!(matches!(curvature_meridian(&m, hi + 0.1), Err(ProfileError::OutsideDomain { .. })));
    assert!(matches!(curvature_meridian(&m, lo), Err(ProfileError::NearPole { .. })));
    assert!(matches!(curvature_meridian(&m, hi - 1e-9), Err(ProfileError::NearPole { .. })));
    assert!(curvature_meridian(&m, hi - 1e-3).is_ok());
}

#[test]
fn areas_of_catalog_meridians() {
    assert!((area(&catalog::round_sphere()).unwrap() - ROUND_AREA).abs() < 1e-10);
    assert!((area(&catalog::gong_raw()).unwrap() - raw_gong_area()).abs() < 1e-9);
    // the explicit rescaled meridian is the raw one shrunk by 4(sqrt 2 - 1)
    let c = catalog::gong_scale();
    let expected = raw_gong_area() / (16.0 * c * c);
    assert!((area(&catalog::gong_normalized()).unwrap() - expected).abs() < 1e-9);
    assert!((expected - 9.614390734158817).abs() < 1e-12);
}

#[test]
fn gauss_bonnet_through_the_averaged_curvature() {
    for m in [catalog::round_sphere(), catalog::gong_raw(), catalog::gong_normalized(), radius_sphere(2.0)] {
        let a = area(&m).unwrap();
        let kbar = average_curvature(&m).unwrap();
        assert!((kbar * a - ROUND_AREA).abs() < 1e-6 * ROUND_AREA, "K dA integrates to {}", kbar * a);
    }
    let raw = average_curvature(&catalog::gong_raw()).unwrap();
    assert!((raw - ROUND_AREA / raw_gong_area()).abs() < 1e-8);
}

#[test]
fn normalization_of_spheres_and_the_gong() {
    let unit = normalize_to_volume(&radius_sphere(2.0), ROUND_AREA).unwrap();
    assert!((unit.half_width() - 1.0).abs() < 1e-12);
    for k in 1..20 {
        let z = -1.0 + 2.0 * k as f64 / 20.0;
        assert!((unit.r(z) - (1.0 - z * z).sqrt()).abs() < 1e-12);
    }

    let g = area_normalized_gong();
    assert!((area(&g).unwrap() - ROUND_AREA).abs() < 1e-9);
    let again = normalize_to_volume(&g, ROUND_AREA).unwrap();
    for k in 0..=50 {
        let z = g.domain().0 + (g.domain().1 - g.domain().0) * k as f64 / 50.0;
        assert!((again.r(z) - g.r(z)).abs() < 1e-12);
    }
    assert!(matches!(normalize_to_volume(&g, 0.0), Err(ProfileError::NonPositiveArea(_))));
    assert!(matches!(normalize_to_volume(&g, f64::NAN), Err(ProfileError::NonPositiveArea(_))));
}

#[test]
fn explicit_rescaled_gong_is_a_homothety_of_the_raw_one() {
    let raw = catalog::gong_raw();
    let target = area(&catalog::gong_normalized()).unwrap();
    let scaled = normalize_to_volume(&raw, target).unwrap();
    let formula = catalog::gong_normalized();
    let (lo, hi) = formula.domain();
    for k in 0..1000 {
        let z = lo + (hi - lo) * (k as f64 + 0.5) / 1000.0;
        assert!((scaled.r(z) - formula.r(z)).abs() < 1e-10, "z = {z}");
    }
}

#[test]
fn arclength_gauge_of_catalog_meridians() {
    let round = to_arclength(&catalog::round_sphere()).unwrap();
    assert!((round.total_length() - PI).abs() < 1e-12);
    assert!((round.area() - ROUND_AREA).abs() < 1e-12);

    let raw = to_arclength(&catalog::gong_raw()).unwrap();
    assert!((raw.total_length() - raw_gong_meridian_length()).abs() < 1e-10);
    assert!((raw.area() - raw_gong_area()).abs() < 1e-9);

    let norm = to_arclength(&catalog::gong_normalized()).unwrap();
    let c = catalog::gong_scale();
    assert!((norm.total_length() - raw_gong_meridian_length() / (4.0 * c)).abs() < 1e-10);

    for p in [&round, &raw, &norm] {
        let len = p.total_length();
        assert!((p.drho(0.0) - 1.0).abs() < 1e-9);
        assert!((p.drho(len) + 1.0).abs() < 1e-9);
        assert!(p.rho(0.0).abs() < 1e-12 && p.rho(len).abs() < 1e-12);
        for k in 0..=200 {
            let s = len * k as f64 / 200.0;
            assert!(p.drho(s).abs() <= 1.0 + 1e-9);
        }
    }
}

#[test]
fn arclength_radius_matches_the_embedded_radius() {
    let m = catalog::gong_normalized();
    let p = to_arclength(&m).unwrap();
    let (lo, hi) = m.domain();
    for k in 1..100 {
        let z = lo + (hi - lo) * k as f64 / 100.0;
        let s = arclength_at_z(&m, &p, z);
        assert!((p.rho(s) - m.r(z)).abs() < 1e-12, "z = {z}");
    }
}

#[test]
fn gauges_agree_on_curvature() {
    for m in [catalog::round_sphere(), catalog::gong_raw(), catalog::gong_normalized()] {
        let p = to_arclength(&m).unwrap();
        let (lo, hi) = m.domain();
        let mut worst = 0.0_f64;
        for k in 1..=100 {
            let z = lo + (hi - lo) * (0.005 + 0.99 * k as f64 / 101.0);
            let s = arclength_at_z(&m, &p, z);
            let diff = curvature_arclength(&p, s).unwrap() - curvature_meridian(&m, z).unwrap();
            worst = worst.max(diff.abs());
        }
        assert!(worst < 1e-6, "max gauge disagreement {worst:e}");
    }
}

#[test]
fn curvature_arclength_is_open_interval_only() {
    let p = catalog::round_profile();
    assert!((curvature_arclength(&p, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-12);
    assert!(matches!(curvature_arclength(&p, 0.0), Err(ProfileError::OutsideArclength { .. })));
    assert!(matches!(curvature_arclength(&p, 4.0), Err(ProfileError::OutsideArclength { .. })));
}

#[test]
fn arclength_gauge_gauss_bonnet() {
    let p = to_arclength(&area_normalized_gong()).unwrap();
    assert!((p.area() - ROUND_AREA).abs() < 1e-9);
    assert!((p.average_curvature() - 1.0).abs() < 1e-9);
}

#[test]
fn round_sphere_is_conformally_flat_over_itself() {
    let c = to_conformal(&catalog::round_profile(), 65).unwrap();
    assert!(c.values().iter().all(|u| u.abs() < 1e-12));
    for j in 0..c.n_nodes() {
        assert!((conformal_curvature(&c, j) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn conformal_curvature_of_constant_exponents() {
    let flat = ConformalProfile::round(32).unwrap();
    let doubled = ConformalProfile::new(vec![2f64.ln(); 32]).unwrap();
    for j in [0, 7, 15, 31] {
        assert!((conformal_curvature(&flat, j) - 1.0).abs() < 1e-14);
        assert!((conformal_curvature(&doubled, j) - 0.25).abs() < 1e-14);
    }
}

#[test]
fn conversion_preconditions() {
    let gong = to_arclength(&catalog::gong_normalized()).unwrap();
    assert!(matches!(to_conformal(&gong, 129), Err(ProfileError::NotNormalized(_))));
    let lopsided = catalog::michel_surface(&OddFunction::cubic(0.3).unwrap(), 256).unwrap();
    assert!(matches!(to_conformal(&lopsided, 129), Err(ProfileError::NotSymmetric(_))));
    assert!(matches!(to_conformal(&catalog::round_profile(), 4), Err(ProfileError::GridTooSmall(4))));
    assert!(matches!(ConformalProfile::new(vec![0.0, f64::NAN, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]), Err(ProfileError::NonFinite(_))));
}

#[test]
fn gong_conformal_profile_is_regular_and_symmetric() {
    let p = to_arclength(&area_normalized_gong()).unwrap();
    let (_, rho_eq) = p.widest_parallel();
    let mut previous_slope = f64::INFINITY;
    for n in [257, 513, 1025] {
        let c = to_conformal(&p, n).unwrap();
        assert_eq!(c.symmetry_defect(), 0.0);
        assert!((c.equator_value() - rho_eq.ln()).abs() < 1e-12);
        // one-sided slope at the pole vanishes at first order
        let u = c.values();
        let slope = ((u[1] - u[0]) / c.spacing()).abs();
        assert!(slope < 0.6 * previous_slope, "pole slope {slope:e}");
        previous_slope = slope;
    }
}

#[test]
fn conformal_equator_curvature_is_second_order() {
    let p = to_arclength(&area_normalized_gong()).unwrap();
    let kappa = curvature_arclength(&p, 0.5 * p.total_length()).unwrap();
    let errors: Vec<f64> = [257, 513, 1025]
        .iter()
        .map(|&n| {
            let c = to_conformal(&p, n).unwrap();
            (conformal_curvature(&c, n / 2) - kappa).abs()
        })
        .collect();
    for w in errors.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order > 1.9, "observed order {order}");
    }
}

#[test]
fn curvature_survives_a_round_trip_through_the_conformal_grid() {
    let p = to_arclength(&area_normalized_gong()).unwrap();
    let c = to_conformal(&p, 257).unwrap();
    let back = c.to_profile_metric().unwrap();
    assert!(back.is_symmetric());
    assert!((back.total_length() - p.total_length()).abs() < 1e-9);
    let map = IsothermalMap::new(&p).unwrap();
    let mut worst = 0.0_f64;
    // -rho''/rho is ill conditioned next to the poles in either gauge
    let n = c.n_nodes();
    for j in n / 10..n - n / 10 {
        let s = map.arclength_at_theta(c.theta(j));
        let s_back = back.arclength_of_param(2.0 * c.theta(j) / PI - 1.0);
        assert!((s - s_back).abs() < 1e-9, "node {j}");
        let diff = curvature_arclength(&back, s_back).unwrap() - curvature_arclength(&p, s).unwrap();
        worst = worst.max(diff.abs());
    }
    assert!(worst < 1e-6, "round-trip curvature error {worst:e}");
}

#[test]
fn discrete_gauss_bonnet_is_exact() {
    let p = to_arclength(&area_normalized_gong()).unwrap();
    let c = to_conformal(&p, 200).unwrap();
    let k = c.curvatures();
    let total: f64 = c.zone_areas().iter().zip(c.values()).zip(&k).map(|((w, u), k)| w * (2.0 * u).exp() * k).sum();
    assert!((total - ROUND_AREA).abs() < 1e-11, "discrete total curvature {total}");
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn homothety_scales_area_and_curvature(lambda in 0.2f64..5.0, z in -0.8f64..0.8) {
            let m = catalog::gong_raw();
            let scaled = m.scaled(lambda);
            let a0 = area(&m).unwrap();
            let a1 = area(&scaled).unwrap();
            prop_assert!((a1 / (lambda * lambda * a0) - 1.0).abs() < 1e-10);
            let k0 = curvature_meridian(&m, z).unwrap();
            let k1 = curvature_meridian(&scaled, lambda * z).unwrap();
            prop_assert!((k1 * lambda * lambda / k0 - 1.0).abs() < 1e-10);
        }

        #[test]
        fn normalization_is_idempotent(radius in 0.3f64..3.0, target in 1.0f64..30.0) {
            let once = normalize_to_volume(&radius_sphere(radius), target).unwrap();
            prop_assert!((area(&once).unwrap() / target - 1.0).abs() < 1e-9);
            let twice = normalize_to_volume(&once, target).unwrap();
            let (lo, hi) = once.domain();
            for k in 1..10 {
                let z = lo + (hi - lo) * k as f64 / 10.0;
                prop_assert!((twice.r(z) - once.r(z)).abs() < 1e-12);
            }
        }
    }
}
