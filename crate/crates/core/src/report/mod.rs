//! Run configuration, the verification suite, and JSON/CSV reports.

mod config;
mod export;
mod suite;

pub use config::{geometric_grid, parse_config, parse_config_str, RunConfig};
pub use export::{
    export_report, read_json_report, to_csv_string, to_json_string, ReportFormat, CSV_HEADER,
};
pub use suite::{run_verification_suite, SUITE_NAME};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Outcome class of one check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// A check designed to fail did fail; counts as a pass.
    ExpectedFailure,
    /// A check designed to fail passed; counts as a failure.
    UnexpectedPass,
    /// The check could not be evaluated (budget exhausted or similar).
    Inconclusive,
}

impl CheckStatus {
    pub fn is_pass(self) -> bool {
        matches!(self, CheckStatus::Pass | CheckStatus::ExpectedFailure)
    }
}

/// How `measured` is compared with `expected`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `|measured - expected| <= tolerance`.
    Within,
    /// `measured > expected`.
    Above,
    /// `measured == expected` (labels and exact rationals).
    Equal,
}

/// A measured or expected quantity: a float or a label such as an exact
/// rational or a classification.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure {
    Number(f64),
    Label(String),
}

impl Measure {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Measure::Number(x) => Some(*x),
            Measure::Label(_) => None,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Measure::Number(x) => format_f64(*x),
            Measure::Label(s) => s.clone(),
        }
    }
}

impl From<f64> for Measure {
    fn from(x: f64) -> Self {
        Measure::Number(x)
    }
}

impl From<&str> for Measure {
    fn from(s: &str) -> Self {
        Measure::Label(s.to_string())
    }
}

impl From<String> for Measure {
    fn from(s: String) -> Self {
        Measure::Label(s)
    }
}

impl Serialize for Measure {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Measure::Number(x) => f17::serialize(x, s),
            Measure::Label(l) => s.serialize_str(l),
        }
    }
}

impl<'de> Deserialize<'de> for Measure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        match serde_json::Value::deserialize(d)? {
            serde_json::Value::Null => Ok(Measure::Number(f64::NAN)),
            serde_json::Value::Number(n) => n
                .as_f64()
                .map(Measure::Number)
                .ok_or_else(|| serde::de::Error::custom("number out of range")),
            serde_json::Value::String(s) => Ok(Measure::Label(s)),
            other => Err(serde::de::Error::custom(format!(
                "expected a number or a string, got {other}"
            ))),
        }
    }
}

/// One verified claim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub check_id: String,
    /// The mathematical statement being checked.
    pub anchor: String,
    pub expected: Measure,
    pub measured: Measure,
    #[serde(with = "f17")]
    pub tolerance: f64,
    pub relation: Relation,
    pub pass: bool,
    pub status: CheckStatus,
    /// Error message for inconclusive checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(with = "f17")]
    pub runtime_ms: f64,
}

/// Precision settings and budgets the run used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub crate_version: String,
    #[serde(with = "f17::vec")]
    pub grid: Vec<f64>,
    #[serde(with = "f17")]
    pub kernel_tol: f64,
    #[serde(with = "f17")]
    pub curvature_tol: f64,
    #[serde(with = "f17")]
    pub norm_tol: f64,
    pub max_terms: usize,
    pub quad_subdivisions: usize,
    pub seed: Option<u64>,
    pub float_digits: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    /// Conjunction of the per-check pass flags.
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
    pub environment: Environment,
    #[serde(with = "f17")]
    pub total_runtime_ms: f64,
}

impl VerificationReport {
    pub fn new(
        suite: &str,
        checks: Vec<CheckRecord>,
        environment: Environment,
        total_runtime_ms: f64,
    ) -> Self {
        VerificationReport {
            suite: suite.to_string(),
            pass: checks.iter().all(|c| c.pass),
            checks,
            environment,
            total_runtime_ms,
        }
    }

    /// `0` when every check passes, `1` when any check fails or passes
    /// unexpectedly, `2` when the only problems are inconclusive checks.
    pub fn exit_code(&self) -> i32 {
        if self
            .checks
            .iter()
            .any(|c| matches!(c.status, CheckStatus::Fail | CheckStatus::UnexpectedPass))
        {
            1
        } else if self
            .checks
            .iter()
            .any(|c| c.status == CheckStatus::Inconclusive)
        {
            2
        } else {
            0
        }
    }

    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check_id == id)
    }
}

/// Floats as 17 significant digits, non-finite values as `null`.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

pub(crate) mod f17 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::value::RawValue;

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            let raw =
                RawValue::from_string(format!("{x:.16e}")).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        struct F(f64);

        impl Serialize for F {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                super::serialize(&self.0, s)
            }
        }

        pub fn serialize<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for &x in xs {
                seq.serialize_element(&F(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            Ok(Vec::<Option<f64>>::deserialize(d)?
                .into_iter()
                .map(|x| x.unwrap_or(f64::NAN))
                .collect())
        }
    }
}
