use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::potential::{LogJet, RadialPotential};
use crate::{Error, Result};

/// Pointwise curvature of a radial metric in complex dimension two.
///
/// Norms are Hermitian norms of the Kähler curvature tensors, normalized so
/// that the scalar curvature of `ln(1 + r)` on the line is `8π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub r: f64,
    pub n: u32,
    pub det_h: f64,
    pub s: f64,
    pub riem_sq: f64,
    pub ric_sq: f64,
    pub combo: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    /// Minimum of `φ'` over the in-domain grid points.
    pub min_first_derivative: f64,
    /// Minimum of `(r φ')' = φ' + r φ''`.
    pub min_radial_derivative: f64,
    pub out_of_domain: usize,
    pub pass: bool,
}

fn positive_jet(pot: &RadialPotential, r: f64) -> Result<LogJet> {
    let q = pot.log_jet(r)?;
    if !(q[1] > 0.0 && q[2] > 0.0) {
        return Err(Error::Positivity {
            r,
            first: q[1] / r,
            radial: q[2] / r,
        });
    }
    Ok(q)
}

fn check_dim(n: u32) -> Result<()> {
    if n == 0 {
        Err(Error::Parameter(
            "complex dimension must be at least 1".into(),
        ))
    } else {
        Ok(())
    }
}

/// `det H = (φ')^(n-1) (r φ')'` for the complex Hessian of a radial potential.
pub fn metric_determinant(pot: &RadialPotential, r: f64, n: u32) -> Result<f64> {
    check_dim(n)?;
    let q = positive_jet(pot, r)?;
    Ok((q[1] / r).powi(n as i32 - 1) * (q[2] / r))
}

/// Scalar curvature from a log-radius jet.
///
/// With `u = ln det H` and `U1 = du/dt`, `U2 = d²u/dt²`:
/// `s = -4π [ (n-1) U1 / ψ' + U2 / ψ'' ]`.
pub fn scalar_curvature_from_jet(q: &LogJet, n: u32) -> f64 {
    let nm1 = n as f64 - 1.0;
    let (q1, q2, q3, q4) = (q[1], q[2], q[3], q[4]);
    let u1 = nm1 * (q2 / q1 - 1.0) + q3 / q2 - 1.0;
    let u2 = nm1 * (q3 / q1 - (q2 / q1).powi(2)) + q4 / q2 - (q3 / q2).powi(2);
    -4.0 * PI * (nm1 * u1 / q1 + u2 / q2)
}

pub fn scalar_curvature(pot: &RadialPotential, r: f64, n: u32) -> Result<f64> {
    check_dim(n)?;
    let q = positive_jet(pot, r)?;
    if q[2] < f64::MIN_POSITIVE * 1e16 {
        return Err(Error::Numerical(format!(
            "(r phi')' = {:e} underflows at r = {r}",
            q[2] / r
        )));
    }
    let s = scalar_curvature_from_jet(&q, n);
    if !s.is_finite() {
        return Err(Error::Numerical(format!(
            "non-finite scalar curvature at r = {r}"
        )));
    }
    Ok(s)
}

/// Curvature components at the axis point `(√r, 0)`, where `H` is diagonal,
/// each multiplied by the matching inverse-metric weights:
/// `a` (all radial), `b` (two radial, two tangential), `c` (all tangential).
fn normalized_components(q: &LogJet) -> (f64, f64, f64) {
    let (q1, q2, q3, q4) = (q[1], q[2], q[3], q[4]);
    let a = -(q2 * q4 - q3 * q3) / q2.powi(3);
    let b = -(q1 * q3 - q2 * q2) / (q1 * q1 * q2);
    let c = 2.0 * (q1 - q2) / (q1 * q1);
    (a, b, c)
}

pub fn curvature_invariants(pot: &RadialPotential, r: f64, n: u32) -> Result<CurvatureReport> {
    if n != 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    let q = positive_jet(pot, r)?;
    let (a, b, c) = normalized_components(&q);
    let riem = a * a + 4.0 * b * b + c * c;
    let ric = (a + b).powi(2) + (b + c).powi(2);
    let norm = 16.0 * PI * PI;
    let riem_sq = norm * riem;
    let ric_sq = norm * ric;
    Ok(CurvatureReport {
        r,
        n,
        det_h: (q[1] / r) * (q[2] / r),
        s: 4.0 * PI * (a + 2.0 * b + c),
        riem_sq,
        ric_sq,
        combo: norm * (riem - 4.0 * ric),
    })
}

/// Report-only positivity scan; out-of-domain grid points fail the report.
pub fn is_positive_metric(pot: &RadialPotential, grid: &[f64]) -> PositivityReport {
    let mut min_first = f64::INFINITY;
    let mut min_radial = f64::INFINITY;
    let mut out_of_domain = 0;
    for &r in grid {
        match pot.log_jet(r) {
            Ok(q) => {
                min_first = min_first.min(q[1] / r);
                min_radial = min_radial.min(q[2] / r);
            }
            Err(_) => out_of_domain += 1,
        }
    }
    PositivityReport {
        min_first_derivative: min_first,
        min_radial_derivative: min_radial,
        out_of_domain,
        pass: !grid.is_empty() && out_of_domain == 0 && min_first > 0.0 && min_radial > 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_examples() {
        let star = RadialPotential::punctured_disk();
        let d = metric_determinant(&star, 0.5, 2).unwrap();
        assert!((d - 5.625 / 0.669_921_875).abs() < 1e-13 * d);
        assert_eq!(
            metric_determinant(&RadialPotential::flat(), 3.7, 4).unwrap(),
            1.0
        );
        let fs = metric_determinant(&RadialPotential::fubini_study(), 1.0, 1).unwrap();
        assert!((fs - 0.25).abs() < 1e-16);
    }

    #[test]
    fn flat_has_no_curvature() {
        let rep = curvature_invariants(&RadialPotential::flat(), 0.5, 2).unwrap();
        assert_eq!(
            (rep.s, rep.riem_sq, rep.ric_sq, rep.combo),
            (0.0, 0.0, 0.0, 0.0)
        );
        assert_eq!(
            scalar_curvature(&RadialPotential::flat(), 1.0, 3).unwrap(),
            0.0
        );
    }

    #[test]
    fn invariants_need_dimension_two() {
        let star = RadialPotential::punctured_disk();
        assert!(matches!(
            curvature_invariants(&star, 0.3, 3),
            Err(Error::UnsupportedDimension(3))
        ));
    }

    #[test]
    fn negative_profile_is_rejected() {
        let neg = RadialPotential::custom(10.0, |r| -r).unwrap();
        assert!(matches!(
            scalar_curvature(&neg, 1.0, 2),
            Err(Error::Positivity { .. })
        ));
        let rep = is_positive_metric(&neg, &[0.5, 1.0, 2.0]);
        assert!(!rep.pass);
        assert!((rep.min_first_derivative + 1.0).abs() < 1e-8);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(metric_determinant(&RadialPotential::flat(), 1.0, 0).is_err());
    }
}
