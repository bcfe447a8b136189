use std::f64::consts::PI;

use pbessel::fractional::{EKParams, default_spec, derivative_multiplier, ek_integral, integral_multiplier};
use pbessel::lattice::{count_lattice_points, p_power_sum};
use pbessel::pbessel_series::{PlanePoint, pbessel_series, pbessel_xy_series};
use pbessel::phi_coeffs::{phi_beta_form, phi_gamma_form};
use pbessel::router::method_router;
use pbessel::special_core::{beta, classical_bessel_j, gamma, log_gamma};
use pbessel::{DistortedAngle, PExponent};
use proptest::prelude::*;

fn pe(q: u32) -> PExponent {
    PExponent::from_q(q).unwrap()
}

fn close(a: f64, b: f64, rel: f64, abs: f64) -> bool {
    (a - b).abs() <= abs + rel * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gamma_recursion(x in 0.1f64..30.0) {
        let d = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap() - x.ln();
        prop_assert!(d.abs() <= 1e-12, "{d}");
        let (a, b) = (gamma(x + 1.0).unwrap(), x * gamma(x).unwrap());
        prop_assert!(close(a, b, 1e-12, 0.0), "{a} {b}");
    }

    #[test]
    fn beta_is_symmetric(a in 0.05f64..20.0, b in 0.05f64..20.0) {
        let (x, y) = (beta(a, b).unwrap(), beta(b, a).unwrap());
        prop_assert!(close(x, y, 1e-14, 0.0));
        let via_gamma = gamma(a).unwrap() * gamma(b).unwrap() / gamma(a + b).unwrap();
        prop_assert!(close(x, via_gamma, 1e-12, 0.0));
    }

    #[test]
    fn phi_forms_agree_and_mirror(q in 1u32..6, k in 0usize..40, phi in 0.0f64..(2.0 * PI)) {
        let p = pe(q);
        let a = DistortedAngle::new(p, phi).unwrap();
        let m = DistortedAngle::new(p, PI / 2.0 - phi).unwrap();
        let (bf, gf) = (phi_beta_form(p, k, &a), phi_gamma_form(p, k, &a));
        prop_assert!(close(bf, gf, 1e-11, 1e-300), "{bf} {gf}");
        prop_assert!(close(bf, phi_beta_form(p, k, &m), 1e-11, 1e-300));
    }

    #[test]
    fn p2_reduces_to_bessel_j(omega in 0.0f64..5.0, phi in 0.0f64..(2.0 * PI), r in 0.0f64..30.0) {
        let p = pe(1);
        let v = method_router(p, omega, &DistortedAngle::new(p, phi).unwrap(), r, 1e-12).unwrap();
        prop_assert!((v.value - classical_bessel_j(omega, r)).abs() <= 1e-10);
    }

    #[test]
    fn cartesian_and_polar_series_agree(q in 1u32..5, omega in 0.0f64..3.0, phi in 0.0f64..(2.0 * PI), r in 0.0f64..12.0) {
        let p = pe(q);
        let a = DistortedAngle::new(p, phi).unwrap();
        let polar = pbessel_series(p, omega, &a, r, 1e-13).unwrap();
        let xy = pbessel_xy_series(p, omega, PlanePoint::from_polar(r, &a), 1e-13).unwrap();
        prop_assert!(close(polar.value, xy.value, 1e-10, 1e-11), "{} {}", polar.value, xy.value);
    }

    #[test]
    fn quadrant_symmetry(q in 1u32..5, omega in 0.0f64..3.0, phi in 0.0f64..(PI / 2.0), r in 0.0f64..15.0) {
        let p = pe(q);
        let base = pbessel_series(p, omega, &DistortedAngle::new(p, phi).unwrap(), r, 1e-13).unwrap().value;
        for reflected in [PI - phi, PI + phi, 2.0 * PI - phi] {
            let v = pbessel_series(p, omega, &DistortedAngle::new(p, reflected).unwrap(), r, 1e-13).unwrap().value;
            prop_assert!(close(v, base, 1e-12, 1e-13));
        }
    }

    #[test]
    fn monomial_semigroup_and_round_trip(
        q in 1u32..5, eta in 0.0f64..2.0, g1 in 0.05f64..2.0, g2 in 0.05f64..2.0, a in 0.0f64..6.0
    ) {
        let p = pe(q);
        let first = integral_multiplier(EKParams::new(p, g1, eta).unwrap(), a).unwrap();
        let second = integral_multiplier(EKParams::new(p, g2, eta + g1).unwrap(), a).unwrap();
        let joint = integral_multiplier(EKParams::new(p, g1 + g2, eta).unwrap(), a).unwrap();
        prop_assert!(close(first * second, joint, 1e-12, 0.0));
        let back = derivative_multiplier(EKParams::new(p, g1, eta).unwrap(), a).unwrap();
        prop_assert!(close(first * back, 1.0, 1e-12, 0.0));
    }

    #[test]
    fn counts_are_scan_order_free(q in 1u32..5, r in 0.3f64..12.0) {
        let p = pe(q);
        let rp = r.powf(p.p());
        let m = r.floor() as i64;
        let inside = |a: i64, b: i64| p_power_sum(p, a, b) <= rp * (1.0 + 1e-12);
        let rows: u64 = (-m..=m).map(|a| (-m..=m).filter(|&b| inside(a, b)).count() as u64).sum();
        let cols: u64 = (-m..=m).map(|b| (-m..=m).filter(|&a| inside(a, b)).count() as u64).sum();
        let rep = count_lattice_points(p, r).unwrap();
        prop_assert_eq!(rows, cols);
        prop_assert_eq!(rep.count, rows);
        prop_assert_eq!(rep.discrepancy, rep.count as f64 - rep.area_term);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn quadrature_integral_matches_monomial_multiplier(
        q in 1u32..5, eta in 0.0f64..1.5, g in 0.1f64..1.5, a in 0.0f64..4.0, r in 0.5f64..4.0
    ) {
        let params = EKParams::new(pe(q), g, eta).unwrap();
        let v = ek_integral(&|x: f64| x.powf(a), params, r, &default_spec()).unwrap();
        let want = integral_multiplier(params, a).unwrap() * r.powf(a);
        prop_assert!(close(v.value, want, 1e-10, 1e-14), "{} {want}", v.value);
    }
}
