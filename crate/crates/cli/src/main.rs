//! `pbk`: norms, kernels, curvature, model construction and the
//! verification suite from the command line.
//!
//! Every subcommand prints one JSON document to stdout. Diagnostics go to
//! stderr. Exit status is 0 on success, 1 when `verify` finds a failing
//! check, 2 on configuration or evaluation errors.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use partial_bergman::kernel::{family_kernel, residue_kernel};
use partial_bergman::norms::GradedIndex;
use partial_bergman::report::{parse_config, CheckStatus, RunConfig};
use partial_bergman::{
    curvature_invariants, expected_constant, export_report, norm_closed, norm_exact_graded,
    norm_quadrature, run_verification_suite, scalar_curvature, theorem_instance, Error,
    KernelOptions, ModelKind, Point, ProductModel, ReportFormat, Sign, Subspace,
};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "pbk",
    version,
    about = "Partial Bergman kernels of radial Kähler metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weighted L2 norm of z1^j z2^k at level m.
    Norms {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        j: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value_t = Method::Closed)]
        method: Method,
    },
    /// Partial Bergman kernel of a model at level m.
    Kernel {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        m: u32,
        /// Squared radius, as a fraction of the domain radius for disk factors.
        #[arg(long)]
        r: f64,
        #[arg(long, value_enum, default_value_t = SubspaceArg::Graded)]
        subspace: SubspaceArg,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 1_000_000)]
        max_terms: usize,
    },
    /// Scalar curvature of a model, optionally with curvature invariants.
    Curvature {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        r: f64,
        /// Also report |R|^2, |Ric|^2 and |R|^2 - 4|Ric|^2 (dimension 2 only).
        #[arg(long)]
        invariants: bool,
    },
    /// Product model realizing a sign of scalar curvature in dimension N.
    Model {
        #[arg(long, value_enum)]
        instance: SignArg,
        #[arg(long)]
        dim: u32,
    },
    /// Run the verification suite and write a report.
    Verify {
        /// Configuration file; defaults apply when absent.
        #[arg(long, env = "PBK_CONFIG")]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        format: FormatArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Closed,
    Exact,
    Quadrature,
}

#[derive(Clone, Copy, ValueEnum)]
enum SubspaceArg {
    Graded,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum SignArg {
    Negative,
    Zero,
    Positive,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((doc, code)) => {
            let text = serde_json::to_string_pretty(&doc).expect("json output");
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn load_model(path: &Path) -> Result<ProductModel, Error> {
    let text = std::fs::read_to_string(path)?;
    ProductModel::from_json(&text)
}

fn run(cmd: Command) -> Result<(Value, u8), Error> {
    match cmd {
        Command::Norms { m, j, k, method } => {
            let value = match method {
                Method::Closed => norm_closed(m, j, k)?,
                Method::Quadrature => norm_quadrature(m, j, k)?,
                Method::Exact => {
                    let i = GradedIndex::new(m, j, k).grade().ok_or_else(|| {
                        Error::Parameter(
                            "the exact method needs j + k - m to be a non-negative multiple of 3"
                                .into(),
                        )
                    })?;
                    norm_exact_graded(m, i, j)?
                }
            };
            let mut doc = serde_json::to_value(&value)?;
            doc["m"] = json!(m);
            doc["j"] = json!(j);
            doc["k"] = json!(k);
            Ok((doc, 0))
        }
        Command::Kernel {
            model,
            m,
            r,
            subspace,
            tol,
            max_terms,
        } => {
            let model = load_model(&model)?;
            let opts = KernelOptions { tol, max_terms };
            let eval = match subspace {
                SubspaceArg::Graded => model.kernel(m, r, &opts)?,
                SubspaceArg::Full => {
                    let [f] = model.factors.as_slice() else {
                        return Err(Error::Unsupported(
                            "the full kernel is available for a single punctured-disk factor"
                                .into(),
                        ));
                    };
                    if f.kind != ModelKind::PuncturedDiskFamily {
                        return Err(Error::Unsupported(
                            "the full kernel is available for a single punctured-disk factor"
                                .into(),
                        ));
                    }
                    let level = f.base_level(m);
                    let mut eval = if f.lambda == 2.0 {
                        residue_kernel(level, Point::radial(r), &Subspace::Full, &opts)?
                    } else {
                        family_kernel(
                            level,
                            f.lambda,
                            r.powf(f.lambda + 1.0),
                            &Subspace::Full,
                            &opts,
                        )?
                    };
                    eval.level = m;
                    eval.model = f.label();
                    eval
                }
            };
            let mut doc = serde_json::to_value(&eval)?;
            doc["expected_constant"] = match subspace {
                SubspaceArg::Graded => expected_constant(&model, m)
                    .map(|c| json!(c))
                    .unwrap_or(Value::Null),
                SubspaceArg::Full => Value::Null,
            };
            Ok((doc, 0))
        }
        Command::Curvature {
            model,
            r,
            invariants,
        } => {
            let model = load_model(&model)?;
            let mut factors = Vec::new();
            let mut total = 0.0;
            for f in &model.factors {
                let pot = f.potential()?;
                let point = if pot.domain_end().is_finite() {
                    r * pot.domain_end()
                } else {
                    r
                };
                let s = scalar_curvature(&pot, point, f.dim)?;
                total += s;
                factors.push(json!({
                    "factor": f.label(),
                    "r": point,
                    "scalar_curvature": s,
                    "analytic": f.scalar_curvature(),
                }));
            }
            let mut doc = json!({
                "model": model.label(),
                "r": r,
                "scalar_curvature": total,
                "analytic_scalar_curvature": model.scalar_curvature(),
                "factors": factors,
            });
            if invariants {
                let [f] = model.factors.as_slice() else {
                    return Err(Error::UnsupportedDimension(model.total_dim));
                };
                let pot = f.potential()?;
                let point = if pot.domain_end().is_finite() {
                    r * pot.domain_end()
                } else {
                    r
                };
                doc["invariants"] =
                    serde_json::to_value(curvature_invariants(&pot, point, f.dim)?)?;
            }
            Ok((doc, 0))
        }
        Command::Model { instance, dim } => {
            let sign = match instance {
                SignArg::Negative => Sign::Negative,
                SignArg::Zero => Sign::Zero,
                SignArg::Positive => Sign::Positive,
            };
            let model = theorem_instance(dim, sign)?;
            eprintln!(
                "{}: scalar curvature {}, minimal level {}",
                model.label(),
                model.scalar_curvature(),
                model.minimal_level()
            );
            Ok((serde_json::to_value(&model)?, 0))
        }
        Command::Verify {
            config,
            out,
            format,
        } => {
            let cfg = match &config {
                Some(path) => parse_config(path)?,
                None => RunConfig::default(),
            };
            let report = run_verification_suite(&cfg);
            let format = match format {
                FormatArg::Json => ReportFormat::Json,
                FormatArg::Csv => ReportFormat::Csv,
            };
            export_report(&report, format, &out)?;
            for c in &report.checks {
                let status = serde_json::to_value(c.status)?;
                eprintln!("{:<16} {}", status.as_str().unwrap_or("?"), c.check_id);
            }
            let not_passing: Vec<&str> = report
                .checks
                .iter()
                .filter(|c| !c.pass)
                .map(|c| c.check_id.as_str())
                .collect();
            let expected_failures = report
                .checks
                .iter()
                .filter(|c| c.status == CheckStatus::ExpectedFailure)
                .count();
            let code = report.exit_code();
            let doc = json!({
                "suite": report.suite,
                "pass": report.pass,
                "checks": report.checks.len(),
                "expected_failures": expected_failures,
                "not_passing": not_passing,
                "exit_code": code,
                "out": out.display().to_string(),
                "runtime_ms": report.total_runtime_ms,
            });
            Ok((doc, code as u8))
        }
    }
}
