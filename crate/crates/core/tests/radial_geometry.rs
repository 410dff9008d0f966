use std::f64::consts::PI;

use approx::assert_relative_eq;
use partial_bergman::radial::{scalar_curvature_from_jet, to_log_jet};
use partial_bergman::{
    curvature_invariants, is_positive_metric, make_family, metric_determinant, radial_completeness,
    scalar_curvature, Completeness, Endpoint, Error, RadialPotential,
};
use proptest::prelude::*;

fn grid() -> Vec<f64> {
    (0..20).map(|i| 0.05 + 0.9 * i as f64 / 19.0).collect()
}

#[test]
fn determinant_of_phi_star_at_half() {
    let d = metric_determinant(&RadialPotential::punctured_disk(), 0.5, 2).unwrap();
    assert_relative_eq!(d, 2880.0 / 343.0, max_relative = 1e-14);
}

#[test]
fn constant_scalar_curvatures() {
    let star = RadialPotential::punctured_disk();
    let fs = RadialPotential::fubini_study();
    for r in grid() {
        assert_relative_eq!(
            scalar_curvature(&star, r, 2).unwrap(),
            -24.0 * PI,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            scalar_curvature(&fs, r, 1).unwrap(),
            8.0 * PI,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            scalar_curvature(&fs, 10.0 * r, 1).unwrap(),
            8.0 * PI,
            max_relative = 1e-12
        );
    }
}

#[test]
fn whole_family_is_csc() {
    for (m, lambda, xi) in [(1, 2.0, 1.0), (2, 1.0, 1.0), (3, 4.0, 2.0), (1, 2.0, 8.0)] {
        let pot = make_family(m, lambda, xi).unwrap();
        let end = pot.domain_end();
        for t in [0.1, 0.4, 0.8] {
            let s = scalar_curvature(&pot, t * end, 2).unwrap();
            assert_relative_eq!(s, -24.0 * PI / m as f64, max_relative = 1e-11);
        }
    }
}

#[test]
fn scaled_family_member() {
    let s = scalar_curvature(&make_family(3, 2.0, 1.0).unwrap(), 0.4, 2).unwrap();
    assert_relative_eq!(s, -8.0 * PI, max_relative = 1e-12);
}

// Oracle: the same potential as an opaque closure, differentiated numerically.
#[test]
fn finite_difference_oracle_for_scalar_curvature() {
    let opaque = RadialPotential::custom(1.0, |r: f64| r.ln() - (-r.powi(3)).ln_1p()).unwrap();
    for r in [0.2, 0.35, 0.5, 0.65, 0.8, 0.95] {
        let s = scalar_curvature(&opaque, r, 2).unwrap();
        assert!((s + 24.0 * PI).abs() < 1e-6 * 24.0 * PI, "r = {r}: {s}");
    }
}

// Oracle: hand-derived r-derivatives of ln r - ln(1 - r³) against the closed-form t-jet.
#[test]
fn builtin_derivatives_agree_with_log_jet() {
    let star = RadialPotential::punctured_disk();
    for r in [0.1, 0.3, 0.6, 0.9] {
        let from_r = to_log_jet(r, &star.derivatives(r).unwrap());
        let jet = star.log_jet(r).unwrap();
        for k in 1..5 {
            assert_relative_eq!(from_r[k], jet[k], max_relative = 1e-9);
        }
    }
}

#[test]
fn invariants_of_phi_star() {
    let star = RadialPotential::punctured_disk();
    for r in grid() {
        let rep = curvature_invariants(&star, r, 2).unwrap();
        assert_relative_eq!(rep.combo, -960.0 * PI * PI, max_relative = 1e-10);
        assert_relative_eq!(rep.s, -24.0 * PI, max_relative = 1e-10);
        assert!(rep.riem_sq > 0.0 && rep.ric_sq > 0.0);
    }
}

#[test]
fn flat_plane_invariants_vanish() {
    let rep = curvature_invariants(&RadialPotential::flat(), 0.7, 2).unwrap();
    assert_eq!(rep.combo, 0.0);
}

#[test]
fn positivity_scan() {
    let rep = is_positive_metric(&RadialPotential::punctured_disk(), &grid());
    assert!(rep.pass);
    let rep = is_positive_metric(&RadialPotential::punctured_disk(), &[0.5, 1.5]);
    assert_eq!(rep.out_of_domain, 1);
    assert!(!rep.pass);
}

#[test]
fn completeness_of_models() {
    let star = RadialPotential::punctured_disk();
    assert_eq!(
        radial_completeness(&star, Endpoint::Inner).unwrap(),
        Completeness::FiniteDistance
    );
    assert_eq!(
        radial_completeness(&star, Endpoint::Outer).unwrap(),
        Completeness::InfiniteDistance
    );
    let fam = make_family(2, 2.0, 8.0).unwrap();
    assert_eq!(
        radial_completeness(&fam, Endpoint::Outer).unwrap(),
        Completeness::InfiniteDistance
    );
}

#[test]
fn domain_errors() {
    let star = RadialPotential::punctured_disk();
    assert!(matches!(
        scalar_curvature(&star, 1.2, 2),
        Err(Error::Domain { .. })
    ));
    assert!(matches!(
        curvature_invariants(&star, 0.5, 1),
        Err(Error::UnsupportedDimension(1))
    ));
}

proptest! {
    #[test]
    fn scale_law(c in 1u32..12, t in 0.02f64..0.98) {
        let base = scalar_curvature(&make_family(1, 2.0, 1.0).unwrap(), t, 2).unwrap();
        let scaled = scalar_curvature(&make_family(c, 2.0, 1.0).unwrap(), t, 2).unwrap();
        prop_assert!((scaled - base / c as f64).abs() < 1e-10 * base.abs());
    }

    #[test]
    fn family_scalar_is_constant(lambda in 0.2f64..6.0, xi in 0.1f64..10.0, t in 0.2f64..0.95) {
        let pot = make_family(1, lambda, xi).unwrap();
        let s = scalar_curvature(&pot, t * pot.domain_end(), 2).unwrap();
        prop_assert!((s + 24.0 * PI).abs() < 1e-9 * 24.0 * PI, "s = {}", s);
    }

    #[test]
    fn determinant_positive(t in 0.01f64..0.99, n in 1u32..6) {
        let d = metric_determinant(&RadialPotential::punctured_disk(), t, n).unwrap();
        prop_assert!(d > 0.0);
    }

    #[test]
    fn flat_jet_has_zero_curvature(r in 0.01f64..100.0, n in 1u32..8) {
        prop_assert_eq!(scalar_curvature_from_jet(&[r; 5], n), 0.0);
    }
}
