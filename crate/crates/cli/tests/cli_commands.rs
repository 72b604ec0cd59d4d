//! End-to-end checks of the `searchlight` binary: artifact creation, exit
//! codes, and flag handling, driven through real subprocess invocations.

use std::path::Path;
use std::process::{Command, Output};

use searchlight_cli::scenarios::bundled_json;

fn searchlight() -> Command {
    Command::new(env!("CARGO_BIN_EXE_searchlight"))
}

fn write_scenario(dir: &Path, name: &str, json: &str) -> std::path::PathBuf {
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, json).unwrap();
    path
}

fn stderr_of(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn curves_writes_the_advertised_csv() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "example1", bundled_json("example1").unwrap());
    let out = dir.path().join("artifacts");
    let output = searchlight()
        .args(["curves", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));

    let csv = std::fs::read_to_string(out.join("example1_curves.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,P_subjective,P_true"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 81);
    for row in rows {
        let fields: Vec<f64> = row.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields.len(), 3);
        let want = 1.0 - (-fields[0] / 2.0).exp();
        assert!((fields[1] - want).abs() < 1e-12, "row {row}");
        assert!((fields[2] - want).abs() < 1e-12, "row {row}");
    }
}

#[test]
fn alt_plans_add_two_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "example5", bundled_json("example5").unwrap());
    let out = dir.path().join("artifacts");
    let output = searchlight()
        .args(["curves", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let csv = std::fs::read_to_string(out.join("example5_curves.csv")).unwrap();
    assert!(csv.starts_with("t,P_subjective,P_true,P_subjective_alt,P_true_alt\n"));
}

#[test]
fn plan_snapshots_cover_start_middle_and_end() {
    // example5's schedule starts with a positive budget, so even the t = 0
    // snapshot has nonzero rows.
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "example5", bundled_json("example5").unwrap());
    let out = dir.path().join("artifacts");
    let output = searchlight()
        .args(["plan", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let csv = std::fs::read_to_string(out.join("example5_plan.csv")).unwrap();
    let ts: std::collections::BTreeSet<String> = csv
        .lines()
        .skip(1)
        .map(|row| row.split(',').next().unwrap().to_string())
        .collect();
    assert_eq!(ts.len(), 3, "expected three snapshot times:\n{csv}");
}

#[test]
fn validation_failures_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_scenario(
        dir.path(),
        "bad",
        &bundled_json("example1")
            .unwrap()
            .replace("[0.5, 0.5]", "[0.7, 0.5]"),
    );
    let output = searchlight()
        .args(["curves", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2), "stderr: {}", stderr_of(&output));
    assert!(!stderr_of(&output).is_empty());
}

#[test]
fn missing_scenario_file_exits_with_code_one() {
    let output = searchlight()
        .args(["curves", "/no/such/scenario.json"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn compare_demands_a_composite_plan() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "example1", bundled_json("example1").unwrap());
    let output = searchlight()
        .args(["compare", scenario.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2), "stderr: {}", stderr_of(&output));
}

/// A small decaying-core scenario whose mean detection time does not exist.
fn divergent_scenario() -> String {
    r#"{
  "version": 1,
  "name": "decaying_core",
  "space": {"type": "centered_square", "center": [0.0, 0.0], "halfwidth": 6.0, "resolution": 0.1},
  "prior": {"type": "gaussian", "sigma": 2.0},
  "detection": {"type": "exponential", "rate": 1.0},
  "schedule": {"type": "linear", "rate": 1.0},
  "truth": {"point": [0.0, 0.0]},
  "plan": {"type": "core_annulus", "sigma": 2.0, "rate": 1.0},
  "time": {"end": 10.0, "samples": 20}
}"#
    .to_string()
}

#[test]
fn divergent_mean_time_exits_four_unless_allowed() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "decaying_core", &divergent_scenario());
    let out = dir.path().join("artifacts");

    let output = searchlight()
        .args(["mean-time", scenario.to_str().unwrap(), "--out", out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4), "stderr: {}", stderr_of(&output));

    let output = searchlight()
        .args([
            "mean-time",
            scenario.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--allow-divergent",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("decaying_core_mean_time.json")).unwrap())
            .unwrap();
    assert_eq!(summary["true"]["divergent"], serde_json::json!(true));
    assert_eq!(summary["true"]["value"], serde_json::Value::Null);
}

#[test]
fn mean_time_reports_values_and_records_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "example1", bundled_json("example1").unwrap());
    let out = dir.path().join("artifacts");
    let output = searchlight()
        .args([
            "mean-time",
            scenario.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--seed",
            "7",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("example1_mean_time.json")).unwrap())
            .unwrap();
    assert_eq!(summary["seed"], serde_json::json!(7));
    let mu = summary["subjective"]["value"].as_f64().unwrap();
    assert!((mu - 2.0).abs() < 1e-6, "mu = {mu}");
}

#[test]
fn out_dir_env_var_is_the_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path(), "example1", bundled_json("example1").unwrap());
    let out = dir.path().join("from_env");
    let output = searchlight()
        .args(["curves", scenario.to_str().unwrap()])
        .env("SEARCHLIGHT_OUT_DIR", &out)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(output.status.success(), "stderr: {}", stderr_of(&output));
    assert!(out.join("example1_curves.csv").exists());
}
