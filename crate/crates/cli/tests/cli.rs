//! End-to-end checks of the `nevlab` binary: exit codes, output shapes, and
//! byte-identical reruns.

use std::process::{Command, Output};

fn nevlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nevlab")).args(args).output().expect("binary runs")
}

#[test]
fn tcurve_identity_is_deterministic() {
    let args = ["tcurve", "--curve", "identity", "--radii", "0.5,1"];
    let a = nevlab(&args);
    let b = nevlab(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout, "reruns must be byte-identical");
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("curve,w0_re,w0_im,r,T,quad_error"));
    assert!(text.starts_with("# nevlab"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn fmt_identity_reports_residual() {
    let out = nevlab(&[
        "fmt",
        "--curve",
        "identity",
        "--section",
        "-1,2",
        "--r",
        "1",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["config"]["name"], "identity");
    assert!(value["result"]["residual"].as_f64().unwrap().abs() < 1e-6);
    assert_eq!(value["result"]["zero_count"], 1);
}

#[test]
fn zeros_locates_pullback_zero() {
    let out = nevlab(&["zeros", "--curve", "identity", "--section", "-1,2", "--r", "1"]);
    assert!(out.status.success());
    let value: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let zeros = value["result"]["zeros"].as_array().unwrap();
    assert_eq!(zeros.len(), 1);
    assert!((zeros[0]["re"].as_f64().unwrap() - 0.5).abs() < 1e-7);
}

#[test]
fn cover_respects_cardinality_bound() {
    let out = nevlab(&["cover", "--r", "1", "--epsilon", "1", "--alpha", "0.5"]);
    assert!(out.status.success());
    let value: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    let disks = value["result"]["disks"].as_array().unwrap();
    assert!(disks.len() <= 21);
}

#[test]
fn count_table_on_interp_curve() {
    let out = nevlab(&[
        "count",
        "--curve",
        "interp",
        "--radii",
        "0.8",
        "--budgets",
        "0.7",
        "--epsilon",
        "1",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("r,H,T_r,T_scaled,C,excluded,kappa"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn heights_csv_shape() {
    let out = nevlab(&["heights", "--curve", "interp", "--r", "1", "--h", "1.2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("w_num,w_den"));
    assert!(text.lines().count() > 2, "budget 1.2 admits at least one point");
}

#[test]
fn auxpoly_vanishes_exactly() {
    let out = nevlab(&["auxpoly", "--points", "1,1,1;1,-1,2", "--degree", "2"]);
    assert!(out.status.success());
    let value: serde_json::Value =
        serde_json::from_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert!(value["result"]["log_sup_norm"].as_f64().is_some());
}

#[test]
fn suite_single_criterion_prints_line() {
    let out = nevlab(&["suite", "--only", "6"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[06] covering"));
    assert!(text.contains("PASS"));
}

#[test]
fn unknown_curve_is_an_input_error() {
    let out = nevlab(&["tcurve", "--curve", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown curve"));
}

#[test]
fn config_file_round_trips_through_cli() {
    let dir = std::env::temp_dir().join("nevlab-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("exp.toml");
    std::fs::write(
        &path,
        "name = \"exp\"\nkind = \"projective\"\ndimension = 2\ncomponents = [\"1\", \"z\", \"exp(z)\"]\n",
    )
    .unwrap();
    let out = nevlab(&["tcurve", "--config", path.to_str().unwrap(), "--radii", "1"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("exp,0,0,1,"));
}
