//! Concrete models: the punctured-disk family, flat space, the
//! Fubini–Study line, and scaled products of them.
//!
//! A factor `c·g` at level `m` is the base metric `g` at level `c·m`, since
//! the potential `cΦ` with weight `m` is the potential `Φ` with weight `cm`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::kernel::{
    family_kernel, flat_kernel, fubini_study_kernel, graded_constant, graded_kernel,
    product_kernel, KernelEvaluation, KernelOptions, Point, Subspace,
};
use crate::radial::{scalar_curvature, RadialPotential};
use crate::special::log_gamma;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    PuncturedDiskFamily,
    FubiniStudy,
    Flat,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::PuncturedDiskFamily => "punctured-disk-family",
            ModelKind::FubiniStudy => "fubini-study",
            ModelKind::Flat => "flat",
        })
    }
}

fn one() -> u32 {
    1
}
fn two() -> f64 {
    2.0
}
fn unit() -> f64 {
    1.0
}

/// One factor `c_α · g_α` of a product metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Factor {
    pub kind: ModelKind,
    #[serde(default = "one")]
    pub m_scale: u32,
    #[serde(default = "two")]
    pub lambda: f64,
    #[serde(default = "unit")]
    pub xi: f64,
    #[serde(default = "one")]
    pub scale: u32,
    pub dim: u32,
}

impl Factor {
    /// `c · g*` on the punctured ball.
    pub fn punctured_disk(scale: u32) -> Self {
        Factor {
            kind: ModelKind::PuncturedDiskFamily,
            m_scale: 1,
            lambda: 2.0,
            xi: 1.0,
            scale,
            dim: 2,
        }
    }

    pub fn family(m_scale: u32, lambda: f64, xi: f64, scale: u32) -> Self {
        Factor {
            m_scale,
            lambda,
            xi,
            ..Factor::punctured_disk(scale)
        }
    }

    pub fn fubini_study(scale: u32) -> Self {
        Factor {
            kind: ModelKind::FubiniStudy,
            m_scale: 1,
            lambda: 2.0,
            xi: 1.0,
            scale,
            dim: 1,
        }
    }

    pub fn flat(dim: u32, scale: u32) -> Self {
        Factor {
            kind: ModelKind::Flat,
            m_scale: 1,
            lambda: 2.0,
            xi: 1.0,
            scale,
            dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scale == 0 {
            return Err(Error::Parameter("factor scale must be at least 1".into()));
        }
        match self.kind {
            ModelKind::PuncturedDiskFamily => {
                RadialPotential::family(self.m_scale, self.lambda, self.xi)?;
                if self.dim != 2 {
                    return Err(Error::Parameter(format!(
                        "punctured-disk factors have dimension 2, got {}",
                        self.dim
                    )));
                }
            }
            ModelKind::FubiniStudy if self.dim != 1 => {
                return Err(Error::Parameter(format!(
                    "fubini-study factors have dimension 1, got {}",
                    self.dim
                )));
            }
            ModelKind::Flat if self.dim == 0 => {
                return Err(Error::Parameter(
                    "flat factors need dimension at least 1".into(),
                ));
            }
            _ => {}
        }
        Ok(())
    }

    /// The radial potential of the scaled factor.
    pub fn potential(&self) -> Result<RadialPotential> {
        let base = match self.kind {
            ModelKind::PuncturedDiskFamily => {
                RadialPotential::family(self.m_scale, self.lambda, self.xi)?
            }
            ModelKind::FubiniStudy => RadialPotential::fubini_study(),
            ModelKind::Flat => RadialPotential::flat(),
        };
        base.scaled(self.scale as f64)
    }

    /// Exact scalar curvature: `-24π/(μ c)`, `8π/c` or `0`.
    pub fn scalar_curvature(&self) -> f64 {
        let c = self.scale as f64;
        match self.kind {
            ModelKind::PuncturedDiskFamily => -24.0 * PI / (self.m_scale as f64 * c),
            ModelKind::FubiniStudy => 8.0 * PI / c,
            ModelKind::Flat => 0.0,
        }
    }

    /// Level of the unscaled base metric that level `m` of this factor uses.
    pub fn base_level(&self, m: u32) -> u32 {
        match self.kind {
            ModelKind::PuncturedDiskFamily => self.scale * self.m_scale * m,
            _ => self.scale * m,
        }
    }

    /// Smallest level at which the scaled factor is partially balanced.
    pub fn minimal_level(&self) -> u32 {
        match self.kind {
            ModelKind::PuncturedDiskFamily => 3u32.div_ceil(self.scale * self.m_scale),
            _ => 1,
        }
    }

    fn known_constant(&self) -> Result<()> {
        if self.kind == ModelKind::PuncturedDiskFamily && self.lambda != 2.0 {
            return Err(Error::Unsupported(format!(
                "kernel constant of the family with lambda = {} is not known",
                self.lambda
            )));
        }
        Ok(())
    }

    /// Kernel constant of the factor at level `m`.
    pub fn expected_constant(&self, m: u32) -> Result<f64> {
        self.known_constant()?;
        let min = self.minimal_level();
        if m < min {
            return Err(Error::LevelTooSmall { m, min });
        }
        let l = self.base_level(m);
        Ok(match self.kind {
            ModelKind::PuncturedDiskFamily => graded_constant(l),
            ModelKind::FubiniStudy => l as f64 + 1.0,
            ModelKind::Flat => (l as f64).powi(self.dim as i32),
        })
    }

    /// Numerical kernel at level `m` and at the point whose squared radius is
    /// `t` times the domain radius (for the disk) or `t` in each coordinate
    /// (for flat space and the Fubini–Study chart). Family members with
    /// `λ ≠ 2` use the graded degrees of [`family_kernel`]; no constant is
    /// known for them.
    pub fn kernel(&self, m: u32, t: f64, opts: &KernelOptions) -> Result<KernelEvaluation> {
        let min = self.minimal_level();
        if m < min {
            return Err(Error::LevelTooSmall { m, min });
        }
        let l = self.base_level(m);
        let mut eval = match self.kind {
            // the map z ↦ ξ^{1/6} z carries the ξ-member onto g*, so the point
            // t·ξ^{-1/3} lands at radius t
            ModelKind::PuncturedDiskFamily if self.lambda == 2.0 => {
                graded_kernel(l, Point::radial(t), opts)?
            }
            ModelKind::PuncturedDiskFamily => family_kernel(
                l,
                self.lambda,
                t.powf(self.lambda + 1.0),
                &Subspace::Graded,
                opts,
            )?,
            ModelKind::FubiniStudy => fubini_study_kernel(l, t)?,
            ModelKind::Flat => flat_kernel(l, &vec![t; self.dim as usize], opts)?,
        };
        eval.level = m;
        eval.base_level = l;
        eval.model = self.label();
        Ok(eval)
    }

    pub fn label(&self) -> String {
        let base = match self.kind {
            ModelKind::PuncturedDiskFamily
                if self.m_scale == 1 && self.lambda == 2.0 && self.xi == 1.0 =>
            {
                "g*".to_string()
            }
            ModelKind::PuncturedDiskFamily => {
                format!(
                    "g(m={}, lambda={}, xi={})",
                    self.m_scale, self.lambda, self.xi
                )
            }
            ModelKind::FubiniStudy => "g_FS".into(),
            ModelKind::Flat => format!("g_0(C^{})", self.dim),
        };
        if self.scale == 1 {
            base
        } else {
            format!("{}{}", self.scale, base)
        }
    }
}

/// A product metric `⊕ c_α g_α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProductModel {
    pub factors: Vec<Factor>,
    pub total_dim: u32,
}

impl ProductModel {
    pub fn from_json(text: &str) -> Result<Self> {
        let model: ProductModel = serde_json::from_str(text)?;
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.factors.is_empty() {
            return Err(Error::EmptyProduct);
        }
        for f in &self.factors {
            f.validate()?;
        }
        let sum: u32 = self.factors.iter().map(|f| f.dim).sum();
        if sum != self.total_dim {
            return Err(Error::Parameter(format!(
                "total_dim {} differs from the sum of factor dimensions {sum}",
                self.total_dim
            )));
        }
        Ok(())
    }

    /// Smallest level at which every factor is partially balanced.
    pub fn minimal_level(&self) -> u32 {
        self.factors
            .iter()
            .map(Factor::minimal_level)
            .max()
            .unwrap_or(1)
    }

    /// `s(⊕ c_α g_α) = Σ s(g_α)/c_α`.
    pub fn scalar_curvature(&self) -> f64 {
        self.factors.iter().map(Factor::scalar_curvature).sum()
    }

    /// Scalar curvature summed from pointwise radial-geometry evaluations of
    /// each factor at the point described in [`Factor::kernel`].
    pub fn scalar_curvature_at(&self, t: f64) -> Result<f64> {
        let mut s = 0.0;
        for f in &self.factors {
            let pot = f.potential()?;
            let r = if pot.domain_end().is_finite() {
                t * pot.domain_end()
            } else {
                t
            };
            s += scalar_curvature(&pot, r, f.dim)?;
        }
        Ok(s)
    }

    /// Product of the factor kernels at level `m`.
    pub fn kernel(&self, m: u32, t: f64, opts: &KernelOptions) -> Result<KernelEvaluation> {
        let min = self.minimal_level();
        if m < min {
            return Err(Error::LevelTooSmall { m, min });
        }
        let parts = self
            .factors
            .iter()
            .map(|f| f.kernel(m, t, opts))
            .collect::<Result<Vec<_>>>()?;
        let mut out = product_kernel(&parts)?;
        out.model = self.label();
        out.r = Some(t);
        Ok(out)
    }

    pub fn label(&self) -> String {
        let parts: Vec<String> = self.factors.iter().map(Factor::label).collect();
        parts.join(" + ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub const ALL: [Sign; 3] = [Sign::Negative, Sign::Zero, Sign::Positive];

    /// Scalar curvature of the matching theorem instance.
    pub fn expected_scalar_curvature(self) -> f64 {
        match self {
            Sign::Negative => -24.0 * PI,
            Sign::Zero => 0.0,
            Sign::Positive => 2.0 * PI,
        }
    }

    pub fn min_dimension(self) -> u32 {
        match self {
            Sign::Negative => 2,
            Sign::Zero | Sign::Positive => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Negative => "negative",
            Sign::Zero => "zero",
            Sign::Positive => "positive",
        }
    }
}

impl FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "negative" => Ok(Sign::Negative),
            "zero" => Ok(Sign::Zero),
            "positive" => Ok(Sign::Positive),
            other => Err(Error::Parameter(format!(
                "sign must be negative, zero or positive, got {other:?}"
            ))),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StandardModel {
    Flat(u32),
    FubiniStudy,
}

/// `m_scale [(λ/2) ln r - ln(1 - ξ r^{λ+1})]`.
pub fn make_family(m_scale: u32, lambda: f64, xi: f64) -> Result<RadialPotential> {
    RadialPotential::family(m_scale, lambda, xi)
}

/// Unscaled flat `ℂ^k` or the Fubini–Study line.
pub fn make_standard(tag: StandardModel) -> Result<Factor> {
    let f = match tag {
        StandardModel::Flat(k) => Factor::flat(k, 1),
        StandardModel::FubiniStudy => Factor::fubini_study(1),
    };
    f.validate()?;
    Ok(f)
}

pub fn make_product(factors: Vec<Factor>) -> Result<ProductModel> {
    let total_dim = factors.iter().map(|f| f.dim).sum();
    let model = ProductModel { factors, total_dim };
    model.validate()?;
    Ok(model)
}

/// Product metrics of dimension `n` realizing each sign of scalar curvature:
/// `g* ⊕ g₀`, `3g* ⊕ g_FS ⊕ g₀` and `4g* ⊕ g_FS ⊕ g₀`. A flat factor of
/// dimension zero is omitted.
pub fn theorem_instance(n: u32, sign: Sign) -> Result<ProductModel> {
    if n < sign.min_dimension() {
        return Err(Error::Dimension {
            n,
            reason: match sign {
                Sign::Negative => "the negative instance needs n >= 2",
                _ => "the zero and positive instances need n >= 3",
            },
        });
    }
    let mut factors = match sign {
        Sign::Negative => vec![Factor::punctured_disk(1)],
        Sign::Zero => vec![Factor::punctured_disk(3), Factor::fubini_study(1)],
        Sign::Positive => vec![Factor::punctured_disk(4), Factor::fubini_study(1)],
    };
    let used: u32 = factors.iter().map(|f| f.dim).sum();
    if n > used {
        factors.push(Factor::flat(n - used, 1));
    }
    make_product(factors)
}

/// Product of the factor kernel constants at level `m`.
pub fn expected_constant(model: &ProductModel, m: u32) -> Result<f64> {
    let min = model.minimal_level();
    if m < min {
        return Err(Error::LevelTooSmall { m, min });
    }
    model
        .factors
        .iter()
        .map(|f| f.expected_constant(m))
        .product()
}

/// `‖wʲ‖²` for the flat metric on `ℂ` at level `level`: `j!/L^{j+1}`.
pub fn flat_norm(level: u32, j: u32) -> Result<f64> {
    let l = level as f64;
    Ok((log_gamma(j as f64 + 1.0)? - (j as f64 + 1.0) * l.ln()).exp())
}

/// `‖wʲ‖²` for the Fubini–Study metric at level `level`: `j!(L-j)!/(L+1)!`.
pub fn fubini_study_norm(level: u32, j: u32) -> Result<f64> {
    if j > level {
        return Err(Error::Range(format!("j = {j} exceeds the level {level}")));
    }
    let (l, jf) = (level as f64, j as f64);
    Ok((log_gamma(jf + 1.0)? + log_gamma(l - jf + 1.0)? - log_gamma(l + 2.0)?).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{integrate, QuadOptions};

    #[test]
    fn instance_shapes() {
        let neg = theorem_instance(2, Sign::Negative).unwrap();
        assert_eq!(neg.factors.len(), 1);
        assert_eq!(neg.total_dim, 2);
        let zero = theorem_instance(3, Sign::Zero).unwrap();
        assert_eq!(zero.factors.len(), 2);
        let pos = theorem_instance(6, Sign::Positive).unwrap();
        assert_eq!(pos.factors[2], Factor::flat(3, 1));
        assert!(matches!(
            theorem_instance(2, Sign::Zero),
            Err(Error::Dimension { n: 2, .. })
        ));
    }

    #[test]
    fn minimal_levels() {
        let m = make_product(vec![Factor::punctured_disk(1), Factor::flat(1, 1)]).unwrap();
        assert_eq!((m.total_dim, m.minimal_level()), (3, 3));
        let m = make_product(vec![
            Factor::punctured_disk(3),
            Factor::fubini_study(1),
            Factor::flat(1, 1),
        ])
        .unwrap();
        assert_eq!((m.total_dim, m.minimal_level()), (4, 1));
        assert!(matches!(make_product(vec![]), Err(Error::EmptyProduct)));
    }

    #[test]
    fn constants() {
        let m = make_product(vec![Factor::punctured_disk(1), Factor::flat(1, 1)]).unwrap();
        assert!((expected_constant(&m, 3).unwrap() - 8.0).abs() < 1e-14);
        let z = theorem_instance(4, Sign::Zero).unwrap();
        assert!((expected_constant(&z, 1).unwrap() - 16.0 / 3.0).abs() < 1e-14);
        let star = make_product(vec![Factor::punctured_disk(1)]).unwrap();
        assert!(matches!(
            expected_constant(&star, 2),
            Err(Error::LevelTooSmall { m: 2, min: 3 })
        ));
    }

    #[test]
    fn json_round_trip() {
        let m = theorem_instance(5, Sign::Positive).unwrap();
        let back = ProductModel::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        let short = r#"{"factors":[{"kind":"fubini-study","dim":1}],"total_dim":1}"#;
        assert_eq!(
            ProductModel::from_json(short).unwrap().factors[0],
            Factor::fubini_study(1)
        );
        let bad = r#"{"factors":[{"kind":"flat","dim":2}],"total_dim":3}"#;
        assert!(ProductModel::from_json(bad).is_err());
    }

    #[test]
    fn standard_norms_match_quadrature() {
        let opts = QuadOptions {
            rel_tol: 1e-13,
            ..Default::default()
        };
        for (level, j) in [(1u32, 0u32), (3, 2), (5, 4), (2, 7)] {
            let l = level as f64;
            let ji = j as i32;
            // ∫₀^∞ ρʲ e^{-Lρ} dρ on ρ = u/(1-u)
            let flat = integrate(
                |u: f64| {
                    if u >= 1.0 {
                        return 0.0;
                    }
                    let rho = u / (1.0 - u);
                    rho.powi(ji) * (-l * rho).exp() / (1.0 - u).powi(2)
                },
                0.0,
                1.0,
                &opts,
            )
            .unwrap();
            let exact = flat_norm(level, j).unwrap();
            assert!(
                (flat.value - exact).abs() < 1e-11 * exact,
                "flat L={level} j={j}"
            );
        }
        for (level, j) in [(1u32, 0u32), (4, 2), (6, 6), (9, 3)] {
            let ji = j as i32;
            let mi = level as i32;
            // ∫₀^∞ ρʲ (1+ρ)^{-L-2} dρ on ρ = u/(1-u): uʲ (1-u)^{L-j}
            let fs = integrate(
                |u: f64| u.powi(ji) * (1.0 - u).powi(mi - ji),
                0.0,
                1.0,
                &opts,
            )
            .unwrap();
            let exact = fubini_study_norm(level, j).unwrap();
            assert!(
                (fs.value - exact).abs() < 1e-12 * exact,
                "fs L={level} j={j}"
            );
        }
    }
}
