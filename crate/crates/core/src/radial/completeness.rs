use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use super::potential::RadialPotential;
use crate::quadrature::{integrate, QuadOptions};
use crate::{Endpoint, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Completeness {
    FiniteDistance,
    InfiniteDistance,
}

/// Absolute change below which the dyadic sequence is considered settled.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-10;
/// Partial arc length beyond which the endpoint is declared at infinite distance.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;
/// Increment ratios at or above `1 - RATIO_SLACK` count as non-decaying.
const RATIO_SLACK: f64 = 1e-3;
const MAX_REFINEMENTS: usize = 200;

/// Classifies the radial arc length `∫ sqrt((r φ')'(x²)) dx` toward an
/// endpoint of the domain.
///
/// The ray is cut into dyadic pieces approaching the endpoint. Geometrically
/// shrinking increments are extrapolated and declare a finite distance;
/// increments that stop shrinking, or a partial sum above
/// [`DIVERGENCE_THRESHOLD`], declare an infinite distance.
pub fn radial_completeness(pot: &RadialPotential, endpoint: Endpoint) -> Result<Completeness> {
    let end = pot.domain_end();
    let opts = QuadOptions {
        abs_tol: 1e-15,
        rel_tol: 1e-10,
        max_subdivisions: 500,
    };
    // arc-length density in τ = ln x, so that r = e^{2τ}
    let density_log = |tau: f64| -> f64 {
        let r = (2.0 * tau).exp();
        match pot.log_jet(r) {
            Ok(q) => q[2].max(0.0).sqrt(),
            Err(_) => f64::NAN,
        }
    };
    let x0 = if end.is_finite() {
        0.5 * end.sqrt()
    } else {
        1.0
    };
    let tau0 = x0.ln();

    let mut dyadic = DyadicTest::default();
    for k in 0..MAX_REFINEMENTS {
        let piece = match (endpoint, end.is_finite()) {
            (Endpoint::Inner, _) => {
                let hi = tau0 - k as f64 * LN_2;
                integrate(density_log, hi - LN_2, hi, &opts)
            }
            (Endpoint::Outer, false) => {
                let lo = tau0 + k as f64 * LN_2;
                integrate(density_log, lo, lo + LN_2, &opts)
            }
            (Endpoint::Outer, true) => {
                let xe = end.sqrt();
                let gap = (xe - x0) / 2f64.powi(k as i32);
                let (a, b) = (xe - gap, xe - 0.5 * gap);
                if gap < 1e-12 * xe || b * b >= end {
                    break;
                }
                let density = |x: f64| density_log(x.ln()) / x;
                integrate(density, a, b, &opts)
            }
        }
        .map_err(|e| Error::Numerical(format!("arc-length piece {k}: {e}")))?;
        if !piece.value.is_finite() {
            break;
        }
        if let Some(verdict) = dyadic.push(piece.value) {
            return Ok(verdict);
        }
    }
    Err(Error::Inconclusive {
        endpoint,
        steps: dyadic.increments.len(),
    })
}

#[derive(Default)]
struct DyadicTest {
    total: f64,
    increments: Vec<f64>,
}

impl DyadicTest {
    fn push(&mut self, inc: f64) -> Option<Completeness> {
        self.total += inc;
        self.increments.push(inc);
        if self.total > DIVERGENCE_THRESHOLD {
            return Some(Completeness::InfiniteDistance);
        }
        let n = self.increments.len();
        if n < 4 {
            return None;
        }
        let ratio = |i: usize| {
            let (prev, cur) = (self.increments[i - 1], self.increments[i]);
            if cur == 0.0 {
                0.0
            } else {
                cur / prev
            }
        };
        let q = (n - 3..n).map(ratio).fold(0.0f64, f64::max);
        if q < 1.0 - RATIO_SLACK {
            let tail = inc * q / (1.0 - q);
            if inc < CONVERGENCE_THRESHOLD && tail < CONVERGENCE_THRESHOLD {
                return Some(Completeness::FiniteDistance);
            }
        }
        if n >= 8 && (n - 6..n).all(|i| ratio(i) >= 1.0 - RATIO_SLACK) {
            return Some(Completeness::InfiniteDistance);
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn punctured_disk_boundaries() {
        let star = RadialPotential::punctured_disk();
        assert_eq!(
            radial_completeness(&star, Endpoint::Inner).unwrap(),
            Completeness::FiniteDistance
        );
        assert_eq!(
            radial_completeness(&star, Endpoint::Outer).unwrap(),
            Completeness::InfiniteDistance
        );
    }

    #[test]
    fn euclidean_ray() {
        let flat = RadialPotential::flat();
        assert_eq!(
            radial_completeness(&flat, Endpoint::Outer).unwrap(),
            Completeness::InfiniteDistance
        );
        assert_eq!(
            radial_completeness(&flat, Endpoint::Inner).unwrap(),
            Completeness::FiniteDistance
        );
    }

    #[test]
    fn borderline_decay_is_inconclusive() {
        // increments shrink by about 1% per dyadic step: too slow to settle
        // within the budget, too fast to call divergent
        let p = 0.0145;
        let slow = RadialPotential::custom(f64::INFINITY, move |r: f64| r.powf(p) / p).unwrap();
        assert!(matches!(
            radial_completeness(&slow, Endpoint::Inner),
            Err(Error::Inconclusive { .. })
        ));
    }
}
