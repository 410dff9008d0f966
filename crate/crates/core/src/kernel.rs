//! Truncated partial Bergman kernel series for the punctured-disk metric
//! and the standard factors, with certified tail bounds.
//!
//! All kernels are evaluated on the diagonal and depend only on the moduli
//! `(|z₁|², |z₂|²)`. The graded kernel collapses to
//!
//! ```text
//! T(r) = (1 - r³)^m / c_m · Σ_i C(m+i-1, i) r^{3i},   c_m = 3 / (4 (m-1)(m-2)),
//! ```
//!
//! a series whose term ratio `r³ (m+i)/(i+1)` decreases in `i`, so the
//! remainder after any term with ratio `q < 1` is at most `term · q/(1-q)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::special::{binomial, ln_beta, log_gamma, ratio, rational_to_f64};
use crate::{Error, Result};
use num_bigint::BigUint;

/// Hard cap on the number of series terms.
pub const DEFAULT_MAX_TERMS: usize = 1_000_000;

/// A point of the punctured ball given by its squared moduli.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x1: f64,
    pub x2: f64,
}

impl Point {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        if !(x1.is_finite() && x2.is_finite() && x1 >= 0.0 && x2 >= 0.0) {
            return Err(Error::Parameter(format!(
                "squared moduli must be finite and non-negative, got ({x1}, {x2})"
            )));
        }
        Ok(Point { x1, x2 })
    }

    /// The point `(√r, 0)`.
    pub fn radial(r: f64) -> Self {
        Point { x1: r, x2: 0.0 }
    }

    /// Splits `r` as `(t r, (1 - t) r)`.
    pub fn split(r: f64, t: f64) -> Self {
        Point {
            x1: t * r,
            x2: (1.0 - t) * r,
        }
    }

    pub fn r(&self) -> f64 {
        self.x1 + self.x2
    }
}

/// Which monomials enter the kernel.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subspace {
    /// `j + k - m ∈ 3ℕ`.
    Graded,
    /// Every square-integrable monomial, `j + k > m - 3`.
    Full,
    /// Convergent monomials with `(j + k - m) mod 3` in the given set.
    Residues(Vec<u8>),
}

impl Subspace {
    pub fn residues(&self) -> Vec<u8> {
        match self {
            Subspace::Graded => vec![0],
            Subspace::Full => vec![0, 1, 2],
            Subspace::Residues(r) => {
                let mut r: Vec<u8> = r.iter().copied().filter(|&x| x < 3).collect();
                r.sort_unstable();
                r.dedup();
                r
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            Subspace::Graded => "graded".into(),
            Subspace::Full => "full".into(),
            Subspace::Residues(_) => {
                let parts: Vec<String> = self.residues().iter().map(|r| r.to_string()).collect();
                format!("residues-{}", parts.join(""))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelOptions {
    /// Truncation stops once `tail_bound < tol · min(1, value)`.
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for KernelOptions {
    fn default() -> Self {
        KernelOptions {
            tol: 1e-10,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

impl KernelOptions {
    pub fn with_tol(tol: f64) -> Self {
        KernelOptions {
            tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Parameter(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::Parameter("max_terms must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelEvaluation {
    pub model: String,
    /// Level requested by the caller.
    pub level: u32,
    /// Level actually used on the underlying potential (differs for scaled factors).
    pub base_level: u32,
    pub r: Option<f64>,
    pub point: Option<Point>,
    pub subspace: Subspace,
    pub value: f64,
    /// Certified bound on the discarded remainder of the series.
    pub tail_bound: f64,
    /// Estimated floating-point error of the retained partial sum.
    pub rounding_bound: f64,
    pub terms_used: usize,
}

impl KernelEvaluation {
    pub fn total_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }
}

/// `c_m = 3 / (4 (m-1)(m-2))`, the norm of `z₂^m` (and `z₁^m`) at level `m`.
pub fn graded_norm_constant(m: u32) -> f64 {
    let m = m as f64;
    3.0 / (4.0 * (m - 1.0) * (m - 2.0))
}

/// `(4/3)(m-1)(m-2)`.
pub fn graded_constant(m: u32) -> f64 {
    1.0 / graded_norm_constant(m)
}

fn check_level(m: u32) -> Result<()> {
    if m < 3 {
        Err(Error::LevelTooSmall { m, min: 3 })
    } else {
        Ok(())
    }
}

fn check_unit(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain { r, end: 1.0 })
    }
}

fn rounding(terms: usize, value: f64) -> f64 {
    (2.0 * terms as f64 + 16.0) * f64::EPSILON * value
}

/// Compensated running sum.
#[derive(Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sums a positive series `t₀ + t₁ + …` given `t₀` and the ratios
/// `t_{i+1}/t_i`, which must be non-increasing in `i`.
fn ratio_series(
    first: f64,
    ratio: impl Fn(u64) -> f64,
    opts: &KernelOptions,
) -> Result<(f64, f64, usize)> {
    let mut sum = Neumaier::default();
    let mut term = first;
    let mut tail = f64::INFINITY;
    for i in 0..opts.max_terms as u64 {
        sum.add(term);
        let q = ratio(i);
        tail = if q < 1.0 {
            term * q / (1.0 - q)
        } else {
            f64::INFINITY
        };
        let value = sum.value();
        if tail < opts.tol * value.min(1.0) {
            return Ok((value, tail, i as usize + 1));
        }
        term *= q;
        if term == 0.0 {
            return Ok((sum.value(), 0.0, i as usize + 1));
        }
    }
    Err(Error::ToleranceUnreachable {
        tol: opts.tol,
        budget: opts.max_terms,
        tail,
    })
}

/// Partial Bergman kernel of `g*` on the graded subspace at level `m`,
/// computed from the collapsed radial series.
pub fn graded_kernel(m: u32, point: Point, opts: &KernelOptions) -> Result<KernelEvaluation> {
    opts.validate()?;
    check_level(m)?;
    let r = point.r();
    check_unit(r)?;
    let r3 = r * r * r;
    let mf = m as f64;
    let first = (mf * (-r3).ln_1p()).exp() / graded_norm_constant(m);
    let (value, tail, terms) =
        ratio_series(first, |i| r3 * (mf + i as f64) / (i as f64 + 1.0), opts)?;
    Ok(KernelEvaluation {
        model: "punctured-disk".into(),
        level: m,
        base_level: m,
        r: Some(r),
        point: Some(point),
        subspace: Subspace::Graded,
        value,
        tail_bound: tail,
        rounding_bound: rounding(terms, value) + 4.0 * mf * f64::EPSILON * value,
        terms_used: terms,
    })
}

/// The graded kernel as an explicit double sum over the monomial lattice,
/// `Σ_i Σ_j |z₁|^{2j} |z₂|^{2k} / ‖z₁ʲ z₂ᵏ‖²_m` times the weight, with the
/// exact graded norms. Slow; meant as an oracle for the collapsed series.
pub fn graded_kernel_lattice(
    m: u32,
    point: Point,
    opts: &KernelOptions,
) -> Result<KernelEvaluation> {
    opts.validate()?;
    check_level(m)?;
    let r = point.r();
    check_unit(r)?;
    let mf = m as f64;
    let r3 = r * r * r;
    let ln_weight = mf * (-r3).ln_1p() - mf * r.ln() - graded_norm_constant(m).ln();
    let (lx1, lx2) = (point.x1.ln(), point.x2.ln());
    let mut total = Neumaier::default();
    let mut terms = 0usize;
    let mut tail = f64::INFINITY;
    for i in 0..opts.max_terms as u64 {
        let n = m as u64 + 3 * i;
        let ln_outer = ln_binomial(m as u64 + i - 1, i)?;
        let mut row = Neumaier::default();
        for j in 0..=n {
            let k = n - j;
            let pw = power_term(j, lx1) + power_term(k, lx2);
            if pw == f64::NEG_INFINITY {
                continue;
            }
            row.add((ln_weight + ln_outer + ln_binomial(n, j)? + pw).exp());
            terms += 1;
        }
        let row = row.value();
        total.add(row);
        let q = r3 * (mf + i as f64) / (i as f64 + 1.0);
        tail = if q < 1.0 {
            row * q / (1.0 - q)
        } else {
            f64::INFINITY
        };
        let value = total.value();
        if tail < opts.tol * value.min(1.0) {
            return Ok(KernelEvaluation {
                model: "punctured-disk".into(),
                level: m,
                base_level: m,
                r: Some(r),
                point: Some(point),
                subspace: Subspace::Graded,
                value,
                tail_bound: tail,
                // log-gamma binomials carry ~1e-15 relative error per unit of magnitude
                rounding_bound: rounding(terms, value)
                    + 64.0 * f64::EPSILON * (n as f64).ln().max(1.0) * n as f64 * value,
                terms_used: i as usize + 1,
            });
        }
    }
    Err(Error::ToleranceUnreachable {
        tol: opts.tol,
        budget: opts.max_terms,
        tail,
    })
}

/// `e·ln x` with the convention `0·ln 0 = 0`.
fn power_term(e: u64, lx: f64) -> f64 {
    if e == 0 {
        0.0
    } else {
        e as f64 * lx
    }
}

fn ln_binomial(n: u64, k: u64) -> Result<f64> {
    if k == 0 || k == n {
        return Ok(0.0);
    }
    let (nf, kf) = (n as f64, k as f64);
    Ok(log_gamma(nf + 1.0)? - log_gamma(kf + 1.0)? - log_gamma(nf - kf + 1.0)?)
}

/// Kernel over every convergent monomial at level `m`.
pub fn full_kernel(m: u32, point: Point, opts: &KernelOptions) -> Result<KernelEvaluation> {
    residue_kernel(m, point, &Subspace::Full, opts)
}

/// Kernel over the convergent monomials whose total degree `s` has
/// `(s - m) mod 3` in the residue set of `subspace`.
///
/// Each total degree contributes the single radial term
/// `4 r^s (α + β) / (3 B(α, β))` with `α = (s - m)/3 + 1`, `β = m - 2`.
/// Within one residue class the ratio of consecutive terms is
/// `r³ (α + β + 1)/α`, decreasing in `α`, which bounds each class's tail.
pub fn residue_kernel(
    m: u32,
    point: Point,
    subspace: &Subspace,
    opts: &KernelOptions,
) -> Result<KernelEvaluation> {
    opts.validate()?;
    check_level(m)?;
    let r = point.r();
    check_unit(r)?;
    let residues = subspace.residues();
    if residues.is_empty() {
        return Err(Error::Parameter(
            "residue set must contain 0, 1 or 2".into(),
        ));
    }
    let mf = m as f64;
    let beta = mf - 2.0;
    let (lr, r3) = (r.ln(), r * r * r);
    let ln_weight = mf * (-r3).ln_1p() + (4.0f64 / 3.0).ln();

    let mut sum = Neumaier::default();
    // per residue class: (last term, ratio to the next one)
    let mut last: [Option<(f64, f64)>; 3] = [None; 3];
    let mut tail = f64::INFINITY;
    let mut terms = 0usize;
    let s0 = m.saturating_sub(2) as u64;
    for s in s0..s0 + 3 * opts.max_terms as u64 {
        let class = ((s as i64 - m as i64).rem_euclid(3)) as u8;
        if !residues.contains(&class) {
            continue;
        }
        let alpha = (s as f64 - mf) / 3.0 + 1.0;
        let t =
            (ln_weight + (s as f64 - mf) * lr + (alpha + beta).ln() - ln_beta(alpha, beta)?).exp();
        sum.add(t);
        terms += 1;
        last[class as usize] = Some((t, r3 * (alpha + beta + 1.0) / alpha));
        if residues.iter().all(|&c| last[c as usize].is_some()) {
            tail = residues
                .iter()
                .map(|&c| {
                    let (t, q) = last[c as usize].expect("class seen");
                    if q < 1.0 {
                        t * q / (1.0 - q)
                    } else {
                        f64::INFINITY
                    }
                })
                .sum();
            let value = sum.value();
            if tail < opts.tol * value.min(1.0) {
                return Ok(KernelEvaluation {
                    model: "punctured-disk".into(),
                    level: m,
                    base_level: m,
                    r: Some(r),
                    point: Some(point),
                    subspace: subspace.clone(),
                    value,
                    tail_bound: tail,
                    rounding_bound: rounding(terms, value)
                        + 64.0 * f64::EPSILON * (s as f64).max(mf) * (s as f64 + 2.0).ln() * value,
                    terms_used: terms,
                });
            }
        }
        if terms >= opts.max_terms {
            break;
        }
    }
    Err(Error::ToleranceUnreachable {
        tol: opts.tol,
        budget: opts.max_terms,
        tail,
    })
}

/// Kernel of the family member `(λ/2) ln r - ln(1 - ξ r^{λ+1})` at level `level`,
/// evaluated at the point with `x = ξ r^{λ+1}` in `(0, 1)`.
///
/// In the variable `x` a monomial of total degree `s` has norm
/// `(λ+1)/4 · ξ^{-a} · j!k!/(j+k+1)! · (s+1) Γ(a+1) Γ(b+1) / Γ(a+b+3)` with
/// `a = (s - Lλ/2)/(λ+1)` and `b = L - 3`, so the kernel is
/// `4/(λ+1) · (1-x)^L · Σ_s x^a Γ(a+b+3) / (Γ(a+1) Γ(b+1))`.
/// `Full` sums every degree with `a > -1`; `Graded` keeps the integer degrees
/// with `a ∈ ℕ`, which may be few or none when `λ` or `Lλ/2` is not an
/// integer. Consecutive-term ratios are non-increasing in `a`, so the tail
/// bound holds for every parameter choice.
pub fn family_kernel(
    level: u32,
    lambda: f64,
    x: f64,
    subspace: &Subspace,
    opts: &KernelOptions,
) -> Result<KernelEvaluation> {
    opts.validate()?;
    check_level(level)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Parameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    check_unit(x)?;
    let l = level as f64;
    let p = lambda + 1.0;
    let c = 0.5 * l * lambda;
    let b = l - 3.0;
    let ln_x = x.ln();
    let ln_prefactor = (4.0 / p).ln() + l * (-x).ln_1p() - log_gamma(b + 1.0)?;
    let ln_term = |a: f64| -> Result<f64> {
        Ok(ln_prefactor + a * ln_x + log_gamma(a + b + 3.0)? - log_gamma(a + 1.0)?)
    };
    let (s0, step) = match subspace {
        Subspace::Full => ((c - p).floor() + 1.0, 1.0),
        Subspace::Graded => (c, p),
        Subspace::Residues(_) => {
            return Err(Error::Unsupported(
                "residue classes are defined for lambda = 2 only".into(),
            ))
        }
    };
    let mut sum = Neumaier::default();
    let mut tail = f64::INFINITY;
    let mut terms = 0usize;
    for i in 0..opts.max_terms as u64 {
        let s = s0 + step * i as f64;
        let a = (s - c) / p;
        let ln_t = ln_term(a)?;
        if (s - s.round()).abs() < 1e-9 {
            sum.add(ln_t.exp());
            terms += 1;
        }
        let q = (ln_term(a + step / p)? - ln_t).exp();
        tail = if q < 1.0 {
            ln_t.exp() * q / (1.0 - q)
        } else {
            f64::INFINITY
        };
        let value = sum.value();
        let target = if value > 0.0 {
            opts.tol * value.min(1.0)
        } else {
            opts.tol
        };
        if tail < target {
            return Ok(KernelEvaluation {
                model: format!("family(lambda={lambda})"),
                level,
                base_level: level,
                r: Some(x),
                point: None,
                subspace: subspace.clone(),
                value,
                tail_bound: tail,
                rounding_bound: rounding(terms, value)
                    + 64.0 * f64::EPSILON * (a + b + 3.0) * (a + b + 5.0).ln() * value,
                terms_used: terms,
            });
        }
    }
    Err(Error::ToleranceUnreachable {
        tol: opts.tol,
        budget: opts.max_terms,
        tail,
    })
}

/// Bergman kernel of the flat metric on `ℂ^k` at level `level`, evaluated
/// at a point with squared moduli `coords`. The norms are
/// `‖wʲ‖² = j!/L^{j+1}`, so each coordinate contributes the Poisson sum
/// `L e^{-Lx} Σ (Lx)ʲ/j! = L`.
pub fn flat_kernel(level: u32, coords: &[f64], opts: &KernelOptions) -> Result<KernelEvaluation> {
    opts.validate()?;
    if level == 0 {
        return Err(Error::LevelTooSmall { m: 0, min: 1 });
    }
    if coords.is_empty() {
        return Err(Error::Parameter(
            "flat factor needs at least one coordinate".into(),
        ));
    }
    let l = level as f64;
    let mut parts = Vec::with_capacity(coords.len());
    for &x in coords {
        if !(x >= 0.0 && x.is_finite()) {
            return Err(Error::Domain {
                r: x,
                end: f64::INFINITY,
            });
        }
        let lx = l * x;
        if lx == 0.0 {
            parts.push(KernelEvaluation {
                value: l,
                tail_bound: 0.0,
                rounding_bound: 0.0,
                terms_used: 1,
                ..blank("flat", level, level, Subspace::Full)
            });
            continue;
        }
        let ln_lx = lx.ln();
        let mut sum = Neumaier::default();
        let mut err = 0.0;
        let mut tail = f64::INFINITY;
        let mut done = None;
        for j in 0..opts.max_terms as u64 {
            let jf = j as f64;
            let ln_t = l.ln() - lx + jf * ln_lx - log_gamma(jf + 1.0)?;
            let t = ln_t.exp();
            sum.add(t);
            err += t * f64::EPSILON * (8.0 + 2.0 * (lx + jf * ln_lx.abs() + log_gamma(jf + 1.0)?));
            let q = lx / (jf + 1.0);
            tail = if q < 1.0 {
                t * q / (1.0 - q)
            } else {
                f64::INFINITY
            };
            if tail < opts.tol * sum.value().min(1.0) {
                done = Some(j as usize + 1);
                break;
            }
        }
        let Some(terms) = done else {
            return Err(Error::ToleranceUnreachable {
                tol: opts.tol,
                budget: opts.max_terms,
                tail,
            });
        };
        parts.push(KernelEvaluation {
            value: sum.value(),
            tail_bound: tail,
            rounding_bound: err + rounding(terms, sum.value()),
            terms_used: terms,
            ..blank("flat", level, level, Subspace::Full)
        });
    }
    let mut out = product_kernel(&parts)?;
    out.model = "flat".into();
    out.subspace = Subspace::Full;
    out.r = Some(coords.iter().sum());
    Ok(out)
}

/// Bergman kernel of the Fubini–Study metric on `ℂP¹` at level `level`, in
/// the affine chart at `|w|² = x`. The norms are `j!(L-j)!/(L+1)!`, so the
/// kernel is `(L+1)` times a binomial probability sum.
pub fn fubini_study_kernel(level: u32, x: f64) -> Result<KernelEvaluation> {
    if level == 0 {
        return Err(Error::LevelTooSmall { m: 0, min: 1 });
    }
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::Domain {
            r: x,
            end: f64::INFINITY,
        });
    }
    let l = level as u64;
    let lf = l as f64;
    // p = x/(1+x), 1 - p = 1/(1+x)
    let ln_p = x.ln() - x.ln_1p();
    let ln_q = -x.ln_1p();
    let mut sum = Neumaier::default();
    let mut err = 0.0;
    for j in 0..=l {
        let a = ln_binomial(l, j)?;
        let b = power_term(j, ln_p);
        let c = power_term(l - j, ln_q);
        if b == f64::NEG_INFINITY {
            continue;
        }
        let t = (a + b + c).exp();
        sum.add(t);
        err += t * f64::EPSILON * (8.0 + 2.0 * (a.abs() + b.abs() + c.abs()));
    }
    let value = (lf + 1.0) * sum.value();
    Ok(KernelEvaluation {
        r: Some(x),
        value,
        tail_bound: 0.0,
        rounding_bound: (lf + 1.0) * err + rounding(l as usize + 1, value),
        terms_used: l as usize + 1,
        ..blank("fubini-study", level, level, Subspace::Full)
    })
}

fn blank(model: &str, level: u32, base_level: u32, subspace: Subspace) -> KernelEvaluation {
    KernelEvaluation {
        model: model.into(),
        level,
        base_level,
        r: None,
        point: None,
        subspace,
        value: 0.0,
        tail_bound: 0.0,
        rounding_bound: 0.0,
        terms_used: 0,
    }
}

/// Kernel of a product metric: the product of the factor kernels, with
/// first-order propagation of the factor bounds.
pub fn product_kernel(factors: &[KernelEvaluation]) -> Result<KernelEvaluation> {
    let first = factors.first().ok_or(Error::EmptyProduct)?;
    if factors.iter().any(|f| f.level != first.level) {
        return Err(Error::LevelMismatch(
            factors.iter().map(|f| f.level).collect(),
        ));
    }
    if factors.len() == 1 {
        return Ok(first.clone());
    }
    let value: f64 = factors.iter().map(|f| f.value).product();
    let rel_tail: f64 = factors.iter().map(|f| f.tail_bound / f.value).sum();
    let rel_round: f64 = factors.iter().map(|f| f.rounding_bound / f.value).sum();
    let models: Vec<&str> = factors.iter().map(|f| f.model.as_str()).collect();
    let subspace = if factors.iter().all(|f| f.subspace == Subspace::Full) {
        Subspace::Full
    } else {
        Subspace::Graded
    };
    Ok(KernelEvaluation {
        model: models.join(" x "),
        level: first.level,
        base_level: first.level,
        r: None,
        point: None,
        subspace,
        value,
        tail_bound: rel_tail * value,
        rounding_bound: rel_round * value + factors.len() as f64 * f64::EPSILON * value,
        terms_used: factors.iter().map(|f| f.terms_used).sum(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstancyReport {
    pub m: u32,
    pub subspace: Subspace,
    /// `(4/3)(m-1)(m-2)`.
    pub reference_constant: f64,
    pub mean: f64,
    pub max_relative_deviation: f64,
    pub max_relative_deviation_from_mean: f64,
    pub max_tail_bound: f64,
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
}

/// Evaluates the punctured-disk kernel on a radius grid and measures how
/// far it strays from `(4/3)(m-1)(m-2)` and from its own mean.
pub fn constancy_report(
    subspace: &Subspace,
    m: u32,
    grid: &[f64],
    opts: &KernelOptions,
) -> Result<ConstancyReport> {
    if grid.len() < 2 {
        return Err(Error::Parameter(
            "constancy needs at least two grid points".into(),
        ));
    }
    check_level(m)?;
    let evals: Vec<KernelEvaluation> = grid
        .par_iter()
        .map(|&r| match subspace {
            Subspace::Graded => graded_kernel(m, Point::radial(r), opts),
            other => residue_kernel(m, Point::radial(r), other, opts),
        })
        .collect::<Result<_>>()?;
    let values: Vec<f64> = evals.iter().map(|e| e.value).collect();
    let reference = graded_constant(m);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let dev = |c: f64| {
        values
            .iter()
            .map(|v| ((v - c) / c).abs())
            .fold(0.0, f64::max)
    };
    Ok(ConstancyReport {
        m,
        subspace: subspace.clone(),
        reference_constant: reference,
        mean,
        max_relative_deviation: dev(reference),
        max_relative_deviation_from_mean: dev(mean),
        max_tail_bound: evals.iter().map(|e| e.tail_bound).fold(0.0, f64::max),
        radii: grid.to_vec(),
        values,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratingCheck {
    pub m: u32,
    pub r: f64,
    pub i_max: u32,
    /// `r^m / (1 - r³)^m`.
    pub closed_form: f64,
    /// `Σ_{i ≤ i_max} C(m+i-1, i) r^{m+3i}`.
    pub partial_sum: f64,
    pub residual: f64,
    /// Bound on the omitted terms `i > i_max`.
    pub tail_bound: f64,
    /// Bound on the floating-point error of `residual`.
    pub rounding_bound: f64,
}

/// Compares the negative-binomial series for `r^m/(1-r³)^m` truncated at
/// `i_max` with its closed form.
///
/// The omitted terms start at `t = C(m+i_max, i_max+1) r^{m+3(i_max+1)}` and
/// have ratios at most `q = r³ (m+i_max+1)/(i_max+2)`, so their sum is at most
/// `t / (1 - q)` when `q < 1`.
pub fn generating_check(m: u32, r: f64, i_max: u32) -> Result<GeneratingCheck> {
    check_unit(r)?;
    if m == 0 {
        return Err(Error::Parameter("m must be at least 1".into()));
    }
    if i_max == 0 {
        return Err(Error::Parameter("i_max must be at least 1".into()));
    }
    let mf = m as f64;
    let r3 = r * r * r;
    let closed = r.powi(m as i32) / (1.0 - r3).powi(m as i32);
    let mut sum = Neumaier::default();
    let mut abs_sum = 0.0;
    for i in 0..=i_max as u64 {
        let c = rational_to_f64(&ratio(binomial(m as u64 + i - 1, i), BigUint::from(1u32)));
        let t = c * r.powi((m as u64 + 3 * i) as i32);
        sum.add(t);
        abs_sum += t;
    }
    let partial = sum.value();
    let next = i_max as u64 + 1;
    let t_next = rational_to_f64(&ratio(
        binomial(m as u64 + next - 1, next),
        BigUint::from(1u32),
    )) * r.powi((m as u64 + 3 * next) as i32);
    let q = r3 * (mf + next as f64) / (next as f64 + 1.0);
    let tail = if q < 1.0 {
        t_next / (1.0 - q)
    } else {
        f64::INFINITY
    };
    let pow_ulps = 2.0 * ((m as f64 + 3.0 * next as f64).log2() + 1.0);
    let rounding_bound = f64::EPSILON
        * ((2.0 * mf + 8.0) * closed + (pow_ulps + 4.0) * abs_sum + 4.0 * closed.max(partial));
    Ok(GeneratingCheck {
        m,
        r,
        i_max,
        closed_form: closed,
        partial_sum: partial,
        residual: (closed - partial).abs(),
        tail_bound: tail,
        rounding_bound,
    })
}

/// Scalar curvature `-24π` of `g*` as a convenience constant.
pub const PUNCTURED_DISK_SCALAR: f64 = -24.0 * PI;
