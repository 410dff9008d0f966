use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which end of a radial domain an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Endpoint {
    Inner,
    Outer,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("radius {r} outside the domain (0, {end})")]
    Domain { r: f64, end: f64 },

    #[error("metric not positive at r = {r}: phi' = {first}, (r phi')' = {radial}")]
    Positivity { r: f64, first: f64, radial: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("curvature invariants are only implemented for complex dimension 2 (got {0})")]
    UnsupportedDimension(u32),

    #[error("divergent index (m={m}, j={j}, k={k}): {reason}")]
    DivergentIndex {
        m: u32,
        j: u32,
        k: u32,
        reason: &'static str,
    },

    #[error("index out of range: {0}")]
    Range(String),

    #[error("total degree {degree} exceeds the big-integer budget {budget}")]
    Overflow { degree: u64, budget: u64 },

    #[error("quadrature budget exhausted: error estimate {estimate:e} above target {target:e} after {subdivisions} subdivisions")]
    QuadratureBudget {
        estimate: f64,
        target: f64,
        subdivisions: usize,
    },

    #[error("tolerance {tol:e} unreachable within {budget} terms (last tail bound {tail:e})")]
    ToleranceUnreachable { tol: f64, budget: usize, tail: f64 },

    #[error("kernel factors evaluated at different levels: {0:?}")]
    LevelMismatch(Vec<u32>),

    #[error("level {m} is below the minimal balanced level {min}")]
    LevelTooSmall { m: u32, min: u32 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("a product model needs at least one factor")]
    EmptyProduct,

    #[error("dimension {n} too small: {reason}")]
    Dimension { n: u32, reason: &'static str },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(
        "completeness test at the {endpoint:?} endpoint inconclusive after {steps} refinements"
    )]
    Inconclusive { endpoint: Endpoint, steps: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{key} {message}")]
    Validation { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
