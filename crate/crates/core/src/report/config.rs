use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::ProductModel;
use crate::{Error, Result};

/// Settings for one verification run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Radii in `(0, 1)` for every grid-based check.
    pub grid: Vec<f64>,
    pub kernel_tol: f64,
    pub curvature_tol: f64,
    pub norm_tol: f64,
    pub max_terms: usize,
    pub quad_subdivisions: usize,
    /// Extra model whose kernel and curvature are checked.
    pub model: Option<ProductModel>,
    /// Enables random splittings in the radiality check.
    pub seed: Option<u64>,
    /// Runs the full-space constancy check, which is expected to fail.
    pub full_constancy: bool,
}

pub const DEFAULT_GRID_COUNT: usize = 20;
pub const DEFAULT_GRID_MIN: f64 = 0.05;
pub const DEFAULT_GRID_MAX: f64 = 0.95;

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            grid: geometric_grid(DEFAULT_GRID_COUNT, DEFAULT_GRID_MIN, DEFAULT_GRID_MAX),
            kernel_tol: 1e-10,
            curvature_tol: 1e-9,
            norm_tol: 1e-10,
            max_terms: 1_000_000,
            quad_subdivisions: 2000,
            model: None,
            seed: None,
            full_constancy: true,
        }
    }
}

/// `count` radii from `min` to `max` in geometric progression.
pub fn geometric_grid(count: usize, min: f64, max: f64) -> Vec<f64> {
    if count == 1 {
        return vec![min];
    }
    let ratio = (max / min).ln() / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i == count - 1 {
                max
            } else {
                min * (ratio * i as f64).exp()
            }
        })
        .collect()
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config_str(&text)
}

fn invalid(key: &str, message: impl Into<String>) -> Error {
    Error::Validation {
        key: key.into(),
        message: message.into(),
    }
}

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64> {
    value.parse().map_err(|_| Error::Parse {
        line,
        message: format!("{key}: expected a number, got {value:?}"),
    })
}

fn parse_usize(key: &str, value: &str, line: usize) -> Result<usize> {
    let v = value.replace('_', "");
    v.parse::<usize>()
        .or_else(|_| {
            // accept integral scientific notation such as 1e6
            match v.parse::<f64>() {
                Ok(f) if f >= 0.0 && f.fract() == 0.0 && f <= usize::MAX as f64 => Ok(f as usize),
                _ => Err(()),
            }
        })
        .map_err(|_| Error::Parse {
            line,
            message: format!("{key}: expected a non-negative integer, got {value:?}"),
        })
}

fn positive(key: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(key, "must be positive"))
    }
}

/// Parses the line-based configuration format:
///
/// ```text
/// [grid]
/// radii = 0.1, 0.5, 0.9        # or count / min / max
/// [tolerances]
/// kernel_tol = 1e-10
/// [budgets]
/// max_terms = 1000000
/// [model]
/// json = {"factors": [...], "total_dim": 3}
/// [suite]
/// seed = 7
/// full_constancy = true
/// ```
///
/// Blank lines and lines starting with `#` or `;` are ignored.
pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut section: Option<String> = None;
    let mut seen = HashSet::new();
    let mut radii: Option<Vec<f64>> = None;
    let (mut count, mut min, mut max) = (None, None, None);

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| Error::Parse {
                line: line_no,
                message: format!("malformed section header {line:?}"),
            })?;
            let name = name.trim();
            if !matches!(name, "grid" | "tolerances" | "budgets" | "model" | "suite") {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unknown section [{name}]"),
                });
            }
            section = Some(name.to_string());
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("expected key = value, got {line:?}"),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let Some(sec) = section.as_deref() else {
            return Err(Error::Parse {
                line: line_no,
                message: format!("key {key:?} outside of any section"),
            });
        };
        if !seen.insert(format!("{sec}.{key}")) {
            return Err(Error::Parse {
                line: line_no,
                message: format!("duplicate key {key:?} in [{sec}]"),
            });
        }
        match (sec, key) {
            ("grid", "radii") => {
                let list = value
                    .split(',')
                    .map(|v| parse_f64(key, v.trim(), line_no))
                    .collect::<Result<Vec<_>>>()?;
                radii = Some(list);
            }
            ("grid", "count") => count = Some(parse_usize(key, value, line_no)?),
            ("grid", "min") => min = Some(parse_f64(key, value, line_no)?),
            ("grid", "max") => max = Some(parse_f64(key, value, line_no)?),
            ("tolerances", "kernel_tol") => cfg.kernel_tol = parse_f64(key, value, line_no)?,
            ("tolerances", "curvature_tol") => cfg.curvature_tol = parse_f64(key, value, line_no)?,
            ("tolerances", "norm_tol") => cfg.norm_tol = parse_f64(key, value, line_no)?,
            ("budgets", "max_terms") => cfg.max_terms = parse_usize(key, value, line_no)?,
            ("budgets", "quad_subdivisions") => {
                cfg.quad_subdivisions = parse_usize(key, value, line_no)?
            }
            ("model", "json") => {
                let model = ProductModel::from_json(value)
                    .map_err(|e| invalid("json", format!("is not a valid model: {e}")))?;
                cfg.model = Some(model);
            }
            ("suite", "seed") => {
                let seed = value.parse::<u64>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("seed: expected an unsigned integer, got {value:?}"),
                })?;
                cfg.seed = Some(seed);
            }
            ("suite", "full_constancy") => {
                cfg.full_constancy = match value {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(Error::Parse {
                            line: line_no,
                            message: format!(
                                "full_constancy: expected true or false, got {other:?}"
                            ),
                        })
                    }
                }
            }
            _ => {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("unknown key {key:?} in [{sec}]"),
                })
            }
        }
    }

    positive("kernel_tol", cfg.kernel_tol)?;
    positive("curvature_tol", cfg.curvature_tol)?;
    positive("norm_tol", cfg.norm_tol)?;
    if cfg.max_terms == 0 {
        return Err(invalid("max_terms", "must be at least 1"));
    }
    if cfg.quad_subdivisions == 0 {
        return Err(invalid("quad_subdivisions", "must be at least 1"));
    }

    if let Some(list) = radii {
        if count.is_some() || min.is_some() || max.is_some() {
            return Err(invalid(
                "radii",
                "cannot be combined with count, min or max",
            ));
        }
        cfg.grid = list;
    } else if count.is_some() || min.is_some() || max.is_some() {
        let count = count.unwrap_or(DEFAULT_GRID_COUNT);
        let min = min.unwrap_or(DEFAULT_GRID_MIN);
        let max = max.unwrap_or(DEFAULT_GRID_MAX);
        if count < 2 {
            return Err(invalid("count", "must be at least 2"));
        }
        if !(min > 0.0 && min < 1.0) {
            return Err(invalid("min", "must lie in (0, 1)"));
        }
        if !(max > 0.0 && max < 1.0) {
            return Err(invalid("max", "must lie in (0, 1)"));
        }
        if min >= max {
            return Err(invalid("min", "must be smaller than max"));
        }
        cfg.grid = geometric_grid(count, min, max);
    }
    if cfg.grid.len() < 2 {
        return Err(invalid("radii", "must list at least two radii"));
    }
    if cfg.grid.iter().any(|&r| !(r > 0.0 && r < 1.0)) {
        return Err(invalid("radii", "must lie in (0, 1)"));
    }
    Ok(cfg)
}
