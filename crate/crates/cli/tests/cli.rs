use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pbk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbk"))
        .args(args)
        .env_remove("PBK_CONFIG")
        .output()
        .expect("pbk runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn without_runtime(csv: &str) -> Vec<String> {
    csv.lines()
        .map(|l| l.rsplit_once(',').map_or(l, |(h, _)| h).to_string())
        .collect()
}

#[test]
fn norms_methods() {
    let v = stdout_json(&pbk(&["norms", "--m", "3", "--j", "1", "--k", "2"]));
    assert!((v["approx"].as_f64().unwrap() - 0.125).abs() < 1e-15);
    let v = stdout_json(&pbk(&[
        "norms", "--m", "3", "--j", "0", "--k", "3", "--method", "exact",
    ]));
    assert_eq!(v["exact"], "3/8");
    let v = stdout_json(&pbk(&[
        "norms",
        "--m",
        "4",
        "--j",
        "2",
        "--k",
        "2",
        "--method",
        "quadrature",
    ]));
    assert!(v["abs_error_bound"].as_f64().unwrap() > 0.0);
    let out = pbk(&["norms", "--m", "3", "--j", "0", "--k", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn model_kernel_and_curvature() {
    let dir = tempfile::tempdir().unwrap();
    let model = stdout_json(&pbk(&["model", "--instance", "zero", "--dim", "4"]));
    assert_eq!(model["total_dim"], 4);
    let path = write(dir.path(), "zero.json", &model.to_string());

    let k = stdout_json(&pbk(&[
        "kernel", "--model", &path, "--m", "2", "--r", "0.5",
    ]));
    let c = k["expected_constant"].as_f64().unwrap();
    assert!((k["value"].as_f64().unwrap() - c).abs() < 1e-9 * c);

    let s = stdout_json(&pbk(&["curvature", "--model", &path, "--r", "0.4"]));
    assert!(s["scalar_curvature"].as_f64().unwrap().abs() < 1e-9);

    let neg = stdout_json(&pbk(&["model", "--instance", "negative", "--dim", "2"]));
    let path = write(dir.path(), "neg.json", &neg.to_string());
    let full = stdout_json(&pbk(&[
        "kernel",
        "--model",
        &path,
        "--m",
        "4",
        "--r",
        "0.5",
        "--subspace",
        "full",
    ]));
    assert!(full["value"].as_f64().unwrap() > 8.0);
    assert!(full["expected_constant"].is_null());
    let inv = stdout_json(&pbk(&[
        "curvature",
        "--model",
        &path,
        "--r",
        "0.5",
        "--invariants",
    ]));
    let combo = inv["invariants"]["combo"].as_f64().unwrap();
    assert!((combo + 960.0 * std::f64::consts::PI.powi(2)).abs() < 1e-8 * 960.0 * 10.0);

    assert_eq!(
        pbk(&["model", "--instance", "positive", "--dim", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        pbk(&[
            "kernel",
            "--model",
            "/nonexistent.json",
            "--m",
            "3",
            "--r",
            "0.5"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn verify_default_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = pbk(&["verify", "--out", p.to_str().unwrap(), "--format", "csv"]);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let a = std::fs::read_to_string(a).unwrap();
    let b = std::fs::read_to_string(b).unwrap();
    assert_eq!(without_runtime(&a), without_runtime(&b));
    assert!(a.starts_with("check_id,anchor,expected,measured,tolerance,pass,runtime_ms\n"));
}

#[test]
fn verify_json_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let v = stdout_json(&pbk(&["verify", "--out", out.to_str().unwrap()]));
    assert_eq!(v["pass"], true);
    assert_eq!(v["exit_code"], 0);
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(
        report["checks"].as_array().unwrap().len(),
        v["checks"].as_u64().unwrap() as usize
    );
}

#[test]
fn config_from_environment_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let starved = write(
        dir.path(),
        "starved.cfg",
        "[grid]\nradii = 0.3, 0.99\n[budgets]\nmax_terms = 100\n",
    );
    let plain = write(dir.path(), "plain.cfg", "[suite]\nseed = 3\n");
    let out = dir.path().join("r.json");
    let out = out.to_str().unwrap();

    let run = |env: Option<&str>, args: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_pbk"));
        cmd.env_remove("PBK_CONFIG").args(args);
        if let Some(e) = env {
            cmd.env("PBK_CONFIG", e);
        }
        cmd.output().unwrap()
    };
    assert_eq!(
        run(Some(&starved), &["verify", "--out", out]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(
            Some(&starved),
            &["verify", "--config", &plain, "--out", out]
        )
        .status
        .code(),
        Some(0)
    );
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(report["environment"]["seed"], 3);
}

#[test]
fn bad_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.cfg", "[tolerances]\nkernel_tol = -1\n");
    let out = dir.path().join("r.json");
    let res = pbk(&["verify", "--config", &bad, "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("kernel_tol must be positive"));
    assert!(!out.exists());
}
