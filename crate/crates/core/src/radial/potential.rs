use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// `[φ, φ', φ'', φ''', φ'''']` at a radius `r = |z|^2`.
pub type RadialDerivatives = [f64; 5];

/// `[ψ, ψ', ψ'', ψ''', ψ'''']` where `ψ(t) = φ(e^t)` and `t = ln r`.
///
/// Every geometric quantity of a radial metric is a rational expression in
/// these: `r φ' = ψ'` and `(r φ')' = ψ'' / r`. Working in `t` avoids the
/// cancellation between `φ'` and `r φ''` near the puncture.
pub type LogJet = [f64; 5];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PotentialKind {
    /// `m_scale * [(λ/2) ln r - ln(1 - ξ r^(λ+1))]` on `(0, ξ^(-1/(λ+1)))`.
    PuncturedDiskFamily {
        m_scale: u32,
        lambda: f64,
        xi: f64,
    },
    /// `ln(1 + r)` on `(0, ∞)`.
    FubiniStudy,
    /// `r` on `(0, ∞)`.
    Flat,
    CustomProfile,
}

type Profile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Evaluator {
    /// Hand-derived `r`-derivatives of `ln r - ln(1 - r^3)`.
    PuncturedDisk,
    Family {
        lambda: f64,
        xi: f64,
    },
    FubiniStudy,
    Flat,
    Custom(Profile),
}

/// A radial Kähler potential `φ(r)` on `(0, R)` together with its
/// derivatives up to order four.
#[derive(Clone)]
pub struct RadialPotential {
    kind: PotentialKind,
    domain_end: f64,
    scale: f64,
    eval: Evaluator,
}

impl fmt::Debug for RadialPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialPotential")
            .field("kind", &self.kind)
            .field("domain_end", &self.domain_end)
            .field("scale", &self.scale)
            .finish()
    }
}

impl RadialPotential {
    /// `ln r - ln(1 - r^3)` on the punctured unit ball.
    pub fn punctured_disk() -> Self {
        RadialPotential {
            kind: PotentialKind::PuncturedDiskFamily {
                m_scale: 1,
                lambda: 2.0,
                xi: 1.0,
            },
            domain_end: 1.0,
            scale: 1.0,
            eval: Evaluator::PuncturedDisk,
        }
    }

    pub fn family(m_scale: u32, lambda: f64, xi: f64) -> Result<Self> {
        if m_scale == 0 {
            return Err(Error::Parameter(
                "m_scale must be a positive integer".into(),
            ));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Parameter(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        if !(xi > 0.0 && xi.is_finite()) {
            return Err(Error::Parameter(format!("xi must be positive, got {xi}")));
        }
        Ok(RadialPotential {
            kind: PotentialKind::PuncturedDiskFamily {
                m_scale,
                lambda,
                xi,
            },
            domain_end: xi.powf(-1.0 / (lambda + 1.0)),
            scale: m_scale as f64,
            eval: Evaluator::Family { lambda, xi },
        })
    }

    pub fn fubini_study() -> Self {
        RadialPotential {
            kind: PotentialKind::FubiniStudy,
            domain_end: f64::INFINITY,
            scale: 1.0,
            eval: Evaluator::FubiniStudy,
        }
    }

    pub fn flat() -> Self {
        RadialPotential {
            kind: PotentialKind::Flat,
            domain_end: f64::INFINITY,
            scale: 1.0,
            eval: Evaluator::Flat,
        }
    }

    /// Arbitrary profile on `(0, domain_end)`; derivatives come from
    /// Richardson-extrapolated central differences in `t = ln r`.
    pub fn custom<F>(domain_end: f64, profile: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(domain_end > 0.0) {
            return Err(Error::Parameter(format!(
                "domain end must be positive, got {domain_end}"
            )));
        }
        Ok(RadialPotential {
            kind: PotentialKind::CustomProfile,
            domain_end,
            scale: 1.0,
            eval: Evaluator::Custom(Arc::new(profile)),
        })
    }

    /// The potential `c * φ`.
    pub fn scaled(mut self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Parameter(format!("scale must be positive, got {c}")));
        }
        self.scale *= c;
        Ok(self)
    }

    pub fn kind(&self) -> PotentialKind {
        self.kind
    }

    /// Upper end `R` of the radial domain `(0, R)`; may be infinite.
    pub fn domain_end(&self) -> f64 {
        self.domain_end
    }

    /// Overall multiplier applied to the base profile.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn contains(&self, r: f64) -> bool {
        r > 0.0 && r < self.domain_end
    }

    fn check_domain(&self, r: f64) -> Result<()> {
        if self.contains(r) {
            Ok(())
        } else {
            Err(Error::Domain {
                r,
                end: self.domain_end,
            })
        }
    }

    /// `φ(r)` without a domain check; used by difference quotients.
    fn raw_value(&self, r: f64) -> f64 {
        let base = match &self.eval {
            Evaluator::PuncturedDisk => r.ln() - (-r.powi(3)).ln_1p(),
            Evaluator::Family { lambda, xi } => {
                0.5 * lambda * r.ln() - (-xi * r.powf(lambda + 1.0)).ln_1p()
            }
            Evaluator::FubiniStudy => r.ln_1p(),
            Evaluator::Flat => r,
            Evaluator::Custom(f) => f(r),
        };
        self.scale * base
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        self.check_domain(r)?;
        Ok(self.raw_value(r))
    }

    /// Derivatives of `ψ(t) = φ(e^t)` at `t = ln r`.
    pub fn log_jet(&self, r: f64) -> Result<LogJet> {
        self.check_domain(r)?;
        let jet = match &self.eval {
            // the r-derivative route cancels to O(r³) near the puncture
            Evaluator::PuncturedDisk => family_log_jet(r, 2.0, 1.0),
            Evaluator::Family { lambda, xi } => family_log_jet(r, *lambda, *xi),
            Evaluator::FubiniStudy => {
                let s = r / (1.0 + r);
                let c = 1.0 / (1.0 + r);
                let d2 = s * c;
                [
                    r.ln_1p(),
                    s,
                    d2,
                    d2 * (1.0 - 2.0 * s),
                    d2 * (1.0 - 6.0 * s * c),
                ]
            }
            Evaluator::Flat => [r, r, r, r, r],
            Evaluator::Custom(f) => {
                let inner = |t: f64| f(t.exp());
                let t = r.ln();
                // one unit in t, or the log-distance to the outer boundary
                let span = if self.domain_end.is_finite() {
                    (self.domain_end / r).ln().min(1.0)
                } else {
                    1.0
                };
                let h0 = 0.15 * span;
                let mut jet = [f(r), 0.0, 0.0, 0.0, 0.0];
                for (order, slot) in jet.iter_mut().enumerate().skip(1) {
                    *slot = ridders(&inner, t, order, h0);
                }
                jet
            }
        };
        Ok(jet.map(|v| self.scale * v))
    }

    /// `[φ, φ', φ'', φ''', φ'''']` at `r`.
    pub fn derivatives(&self, r: f64) -> Result<RadialDerivatives> {
        self.check_domain(r)?;
        match &self.eval {
            Evaluator::PuncturedDisk => Ok(punctured_disk_derivatives(r).map(|v| self.scale * v)),
            _ => Ok(from_log_jet(r, &self.log_jet(r)?)),
        }
    }
}

fn punctured_disk_derivatives(r: f64) -> RadialDerivatives {
    let r3 = r.powi(3);
    let u = 1.0 - r3;
    let (u2, u3, u4) = (u * u, u * u * u, u * u * u * u);
    [
        r.ln() - (-r3).ln_1p(),
        (1.0 + 2.0 * r3) / (r * u),
        -1.0 / (r * r) + (6.0 * r + 3.0 * r.powi(4)) / u2,
        2.0 / r3 + (6.0 + 12.0 * r3) / u2 + (36.0 * r3 + 18.0 * r3 * r3) / u3,
        -6.0 / r.powi(4)
            + 36.0 * r * r / u2
            + (144.0 * r * r + 180.0 * r.powi(5)) / u3
            + (324.0 * r.powi(5) + 162.0 * r.powi(8)) / u4,
    ]
}

/// `ψ = (λ/2) t - ln(1 - w)` with `w = ξ e^{pt}`, `p = λ + 1`.
///
/// With `ρ = w / (1 - w)` one has `dρ/dt = p ρ (1 + ρ)`, which gives the
/// closed forms below.
fn family_log_jet(r: f64, lambda: f64, xi: f64) -> LogJet {
    let p = lambda + 1.0;
    let w = xi * r.powf(p);
    let rho = w / (1.0 - w);
    let g = rho * (1.0 + rho);
    [
        0.5 * lambda * r.ln() - (-w).ln_1p(),
        0.5 * lambda + p * rho,
        p * p * g,
        p.powi(3) * g * (1.0 + 2.0 * rho),
        p.powi(4) * g * (1.0 + 6.0 * rho * (1.0 + rho)),
    ]
}

/// `r`-derivatives to `t`-derivatives (Stirling numbers of the second kind).
pub fn to_log_jet(r: f64, d: &RadialDerivatives) -> LogJet {
    let a1 = r * d[1];
    let a2 = r * r * d[2];
    let a3 = r.powi(3) * d[3];
    let a4 = r.powi(4) * d[4];
    [
        d[0],
        a1,
        a1 + a2,
        a1 + 3.0 * a2 + a3,
        a1 + 7.0 * a2 + 6.0 * a3 + a4,
    ]
}

/// `t`-derivatives to `r`-derivatives (signed Stirling numbers of the first kind).
pub fn from_log_jet(r: f64, q: &LogJet) -> RadialDerivatives {
    [
        q[0],
        q[1] / r,
        (q[2] - q[1]) / (r * r),
        (q[3] - 3.0 * q[2] + 2.0 * q[1]) / r.powi(3),
        (q[4] - 6.0 * q[3] + 11.0 * q[2] - 6.0 * q[1]) / r.powi(4),
    ]
}

/// Fourth-order central difference for the derivative of the given order.
fn central_stencil<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64, order: usize) -> f64 {
    let v = |i: f64| f(x + i * h);
    match order {
        1 => (-v(2.0) + 8.0 * v(1.0) - 8.0 * v(-1.0) + v(-2.0)) / (12.0 * h),
        2 => (-v(2.0) + 16.0 * v(1.0) - 30.0 * v(0.0) + 16.0 * v(-1.0) - v(-2.0)) / (12.0 * h * h),
        3 => {
            (-v(3.0) + 8.0 * v(2.0) - 13.0 * v(1.0) + 13.0 * v(-1.0) - 8.0 * v(-2.0) + v(-3.0))
                / (8.0 * h.powi(3))
        }
        4 => {
            (-v(3.0) + 12.0 * v(2.0) - 39.0 * v(1.0) + 56.0 * v(0.0) - 39.0 * v(-1.0)
                + 12.0 * v(-2.0)
                - v(-3.0))
                / (6.0 * h.powi(4))
        }
        _ => unreachable!("derivative order {order}"),
    }
}

/// Ridders' extrapolation of the central stencil: shrink the step by a
/// constant factor, build a Neville tableau and keep the entry whose
/// neighbours agree best. Stops once the tableau diagonal starts to grow.
pub(crate) fn ridders<F: Fn(f64) -> f64>(f: &F, x: f64, order: usize, h0: f64) -> f64 {
    const CON: f64 = 1.4;
    const CON2: f64 = CON * CON;
    const NTAB: usize = 12;
    let mut a = [[0.0f64; NTAB]; NTAB];
    let mut h = h0;
    a[0][0] = central_stencil(f, x, h, order);
    let mut best = a[0][0];
    let mut err = f64::INFINITY;
    for i in 1..NTAB {
        h /= CON;
        a[0][i] = central_stencil(f, x, h, order);
        let mut fac = CON2;
        for j in 1..=i {
            a[j][i] = (a[j - 1][i] * fac - a[j - 1][i - 1]) / (fac - 1.0);
            fac *= CON2;
            let e = (a[j][i] - a[j - 1][i])
                .abs()
                .max((a[j][i] - a[j - 1][i - 1]).abs());
            if e <= err {
                err = e;
                best = a[j][i];
            }
        }
        if (a[i][i] - a[i - 1][i - 1]).abs() >= 2.0 * err {
            break;
        }
    }
    best
}
