//! Weighted `L^2` norms `‖z₁ʲ z₂ᵏ‖²_m` of monomial sections over the
//! punctured unit ball with weight `e^{-m Φ}` and the volume form of the
//! metric.
//!
//! After the angular reduction every norm equals
//!
//! ```text
//! (3/4) j! k! / (j+k+1)! · ∫₀¹ x^(α-1) (1 + 2x) (1 - x)^(m-3) dx,   α = (j+k-m)/3 + 1,
//! ```
//!
//! which converges iff `m ≥ 3` and `j + k > m - 3`. The integral is a sum of
//! two Beta functions; on the graded lattice `j + k = m + 3i` the whole
//! norm is rational.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::{Serialize, Serializer};

use crate::quadrature::{integrate, QuadOptions, QuadResult};
use crate::special::{binomial, factorial, log_gamma, ratio, rational_to_f64};
use crate::{Error, Result};

/// Largest total degree `j + k` accepted by the exact routines by default.
pub const DEFAULT_MAX_DEGREE: u64 = 10_000;

/// A monomial exponent pair at tensor level `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct GradedIndex {
    pub m: u32,
    pub j: u32,
    pub k: u32,
}

impl GradedIndex {
    pub fn new(m: u32, j: u32, k: u32) -> Self {
        GradedIndex { m, j, k }
    }

    /// Index `(m, j, m + 3i - j)` on the graded lattice.
    pub fn graded(m: u32, i: u32, j: u32) -> Result<Self> {
        let total = m + 3 * i;
        if j > total {
            return Err(Error::Range(format!("j = {j} exceeds m + 3i = {total}")));
        }
        Ok(GradedIndex { m, j, k: total - j })
    }

    pub fn degree(&self) -> u32 {
        self.j + self.k
    }

    pub fn is_convergent(&self) -> bool {
        self.m >= 3 && self.degree() + 3 > self.m
    }

    /// The grading `i` with `j + k = m + 3i`, when the index lies in the
    /// graded subspace.
    pub fn grade(&self) -> Option<u32> {
        let d = self.degree();
        (d >= self.m && (d - self.m) % 3 == 0).then(|| (d - self.m) / 3)
    }

    /// `α = (j + k - m)/3 + 1`.
    pub fn alpha(&self) -> f64 {
        (self.degree() as f64 - self.m as f64) / 3.0 + 1.0
    }

    pub fn check_convergent(&self) -> Result<()> {
        let GradedIndex { m, j, k } = *self;
        if m < 3 {
            return Err(Error::DivergentIndex {
                m,
                j,
                k,
                reason: "m < 3",
            });
        }
        if !self.is_convergent() {
            return Err(Error::DivergentIndex {
                m,
                j,
                k,
                reason: "j + k <= m - 3",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormSource {
    ClosedForm,
    ExactGraded,
    Quadrature,
}

impl fmt::Display for NormSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormSource::ClosedForm => "closed-form",
            NormSource::ExactGraded => "exact-graded",
            NormSource::Quadrature => "quadrature",
        })
    }
}

/// A section norm, exact when the source allows it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormValue {
    #[serde(serialize_with = "serialize_rational")]
    pub exact: Option<BigRational>,
    pub approx: f64,
    pub abs_error_bound: f64,
    pub source: NormSource,
}

fn serialize_rational<S: Serializer>(q: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_str(&format!("{}/{}", q.numer(), q.denom())),
        None => s.serialize_none(),
    }
}

/// `∫₀^{π/2} cos^{2j+1}θ sin^{2k+1}θ dθ = j! k! / (2 (j+k+1)!)`.
pub fn angular_factor(j: u32, k: u32) -> Result<BigRational> {
    angular_factor_bounded(j, k, DEFAULT_MAX_DEGREE)
}

pub fn angular_factor_bounded(j: u32, k: u32, max_degree: u64) -> Result<BigRational> {
    let degree = j as u64 + k as u64;
    if degree > max_degree {
        return Err(Error::Overflow {
            degree,
            budget: max_degree,
        });
    }
    let num = factorial(j as u64) * factorial(k as u64);
    let den = BigUint::from(2u32) * factorial(degree + 1);
    Ok(ratio(num, den))
}

/// `ln ‖z₁ʲ z₂ᵏ‖²_m` from the Gamma closed form.
pub fn ln_norm_closed(m: u32, j: u32, k: u32) -> Result<f64> {
    let idx = GradedIndex::new(m, j, k);
    idx.check_convergent()?;
    let alpha = idx.alpha();
    let beta = m as f64 - 2.0;
    let (jf, kf) = (j as f64, k as f64);
    let ln_angular = log_gamma(jf + 1.0)? + log_gamma(kf + 1.0)? - log_gamma(jf + kf + 2.0)?;
    let ln_beta = log_gamma(alpha)? + log_gamma(beta)? - log_gamma(alpha + beta)?;
    let bracket = 1.0 + 2.0 * alpha / (alpha + beta);
    Ok(0.75f64.ln() + ln_angular + ln_beta + bracket.ln())
}

/// `‖z₁ʲ z₂ᵏ‖²_m = 3 j! k! / (4 (j+k+1)!) · B(α, m-2) · [1 + 2α/(α + m - 2)]`,
/// evaluated in log space.
pub fn norm_closed(m: u32, j: u32, k: u32) -> Result<NormValue> {
    let approx = ln_norm_closed(m, j, k)?.exp();
    Ok(NormValue {
        exact: None,
        approx,
        // log-gamma error budget over the seven log terms
        abs_error_bound: 64.0 * f64::EPSILON * (1.0 + (j + k) as f64) * approx,
        source: NormSource::ClosedForm,
    })
}

/// Exact norm on the graded lattice `j + k = m + 3i`:
/// `3 / (4 (m-1)(m-2)) · C(m+3i, j)⁻¹ · C(m+i-1, i)⁻¹`.
pub fn norm_exact_graded(m: u32, i: u32, j: u32) -> Result<NormValue> {
    let q = exact_graded_rational(m, i, j)?;
    let approx = rational_to_f64(&q);
    Ok(NormValue {
        exact: Some(q),
        approx,
        abs_error_bound: 0.5 * f64::EPSILON * approx,
        source: NormSource::ExactGraded,
    })
}

pub fn exact_graded_rational(m: u32, i: u32, j: u32) -> Result<BigRational> {
    if m < 3 {
        return Err(Error::DivergentIndex {
            m,
            j,
            k: (m + 3 * i).saturating_sub(j),
            reason: "m < 3",
        });
    }
    let total = m as u64 + 3 * i as u64;
    if j as u64 > total {
        return Err(Error::Range(format!("j = {j} exceeds m + 3i = {total}")));
    }
    if total > DEFAULT_MAX_DEGREE {
        return Err(Error::Overflow {
            degree: total,
            budget: DEFAULT_MAX_DEGREE,
        });
    }
    let (m64, i64_) = (m as u64, i as u64);
    let den = BigUint::from(4u32)
        * BigUint::from(m64 - 1)
        * BigUint::from(m64 - 2)
        * binomial(total, j as u64)
        * binomial(m64 + i64_ - 1, i64_);
    Ok(ratio(BigUint::from(3u32), den))
}

/// Quadrature options used for norms, with a subdivision budget.
pub fn norm_quadrature_options(max_subdivisions: usize) -> QuadOptions {
    QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-13,
        max_subdivisions,
    }
}

pub fn norm_quadrature(m: u32, j: u32, k: u32) -> Result<NormValue> {
    norm_quadrature_with(m, j, k, &norm_quadrature_options(2000))
}

/// Adaptive Gauss–Kronrod on the reduced integral after `x = u³`, which
/// turns `x^(α-1) dx` into `3 u^(j+k-m+2) du`, a polynomial for every
/// convergent index.
pub fn norm_quadrature_with(m: u32, j: u32, k: u32, opts: &QuadOptions) -> Result<NormValue> {
    let idx = GradedIndex::new(m, j, k);
    idx.check_convergent()?;
    let power = (j + k + 2 - m) as i32;
    let tail_power = m as i32 - 3;
    let integrand = |u: f64| {
        let u3 = u * u * u;
        3.0 * u.powi(power) * (1.0 + 2.0 * u3) * (1.0 - u3).powi(tail_power)
    };
    let res = integrate(integrand, 0.0, 1.0, opts)?;
    let prefactor = 0.75 * angular_prefactor(j, k)?;
    Ok(NormValue {
        exact: None,
        approx: prefactor * res.value,
        abs_error_bound: prefactor * res.abs_error,
        source: NormSource::Quadrature,
    })
}

/// `j! k! / (j+k+1)!` as a double.
fn angular_prefactor(j: u32, k: u32) -> Result<f64> {
    let (jf, kf) = (j as f64, k as f64);
    Ok((log_gamma(jf + 1.0)? + log_gamma(kf + 1.0)? - log_gamma(jf + kf + 2.0)?).exp())
}

/// The reduced norm integral restricted to `x ∈ [e^{-T}, 1 - e^{-T}]`.
///
/// Defined for every index, convergent or not. Both halves are integrated
/// in logarithmic variables (`x = e^{-t}` near 0, `1 - x = e^{-t}` near 1),
/// so the cutoff can go far below the smallest double.
pub fn truncated_norm_integral(m: u32, j: u32, k: u32, cutoff: f64) -> Result<QuadResult> {
    if !(cutoff > std::f64::consts::LN_2) {
        return Err(Error::Parameter(format!(
            "cutoff must exceed ln 2, got {cutoff}"
        )));
    }
    let alpha = GradedIndex::new(m, j, k).alpha();
    let tail_power = m as f64 - 3.0;
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-12,
        max_subdivisions: 4000,
    };
    let lo = std::f64::consts::LN_2;
    // x = e^{-t}: x^(α-1) dx = x^α dt
    let near_zero = integrate(
        |t: f64| {
            let x = (-t).exp();
            (-alpha * t).exp() * (1.0 + 2.0 * x) * (-x).ln_1p().mul_add(tail_power, 0.0).exp()
        },
        lo,
        cutoff,
        &opts,
    )?;
    // y = 1 - x = e^{-t}: (1-x)^(m-3) dx = y^(m-2) dt
    let near_one = integrate(
        |t: f64| {
            let y = (-t).exp();
            ((alpha - 1.0) * (-y).ln_1p()).exp() * (3.0 - 2.0 * y) * (-(tail_power + 1.0) * t).exp()
        },
        lo,
        cutoff,
        &opts,
    )?;
    let prefactor = 0.75 * angular_prefactor(j, k)?;
    Ok(QuadResult {
        value: prefactor * (near_zero.value + near_one.value),
        abs_error: prefactor * (near_zero.abs_error + near_one.abs_error),
        subdivisions: near_zero.subdivisions + near_one.subdivisions,
    })
}

/// Numerical evidence that an index diverges: partial integrals with a
/// doubling cutoff, compared against the closest convergent index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceWitness {
    pub index: GradedIndex,
    pub neighbor: GradedIndex,
    pub neighbor_norm: f64,
    pub cutoffs: Vec<f64>,
    pub partials: Vec<f64>,
    /// Last partial integral over the neighbour norm.
    pub growth: f64,
    pub exceeded: bool,
}

/// Nearest convergent index: lift `m` to at least 3, then raise `j` until
/// `j + k = m - 2` if needed.
pub fn nearest_convergent(idx: GradedIndex) -> GradedIndex {
    let m = idx.m.max(3);
    let mut j = idx.j;
    if idx.j + idx.k + 3 <= m {
        j = m - 2 - idx.k;
    }
    GradedIndex::new(m, j, idx.k)
}

/// Doubles the cutoff `T` (from 8) until the partial integral exceeds
/// `factor` times the neighbour norm or `max_doublings` is used up.
pub fn divergence_witness(
    m: u32,
    j: u32,
    k: u32,
    factor: f64,
    max_doublings: u32,
) -> Result<DivergenceWitness> {
    let index = GradedIndex::new(m, j, k);
    let neighbor = nearest_convergent(index);
    let neighbor_norm = norm_closed(neighbor.m, neighbor.j, neighbor.k)?.approx;
    let mut cutoffs = Vec::new();
    let mut partials = Vec::new();
    let mut cutoff = 8.0;
    let mut exceeded = false;
    for _ in 0..=max_doublings {
        let partial = truncated_norm_integral(m, j, k, cutoff)?.value;
        cutoffs.push(cutoff);
        partials.push(partial);
        if !partial.is_finite() || partial > factor * neighbor_norm {
            exceeded = true;
            break;
        }
        cutoff *= 2.0;
    }
    let last = *partials.last().expect("at least one partial");
    Ok(DivergenceWitness {
        index,
        neighbor,
        neighbor_norm,
        cutoffs,
        partials,
        growth: last / neighbor_norm,
        exceeded,
    })
}

/// Exact rational as `(numerator, denominator)` integers.
pub fn rational_parts(q: &BigRational) -> (BigInt, BigInt) {
    (q.numer().clone(), q.denom().clone())
}
