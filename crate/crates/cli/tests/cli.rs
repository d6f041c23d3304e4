//! End-to-end tests of the `driftpool` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn driftpool(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_driftpool"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

const SCENARIO: &str = r#"
dim = 4
batch_size = 64
anomaly_ratio = 0.05
seed = 42

[[concepts]]
normal_mean = [0.0, 0.0, 0.0, 0.0]
normal_var = [0.25, 0.2, 0.1, 0.05]
anomaly_mean = [2.0, 2.0, 2.0, 2.0]
anomaly_var = [0.1, 0.1, 0.1, 0.1]

[[concepts]]
normal_mean = [4.0, 4.0, 4.0, 4.0]
normal_var = [0.25, 0.2, 0.1, 0.05]
anomaly_mean = [2.0, 2.0, 2.0, 2.0]
anomaly_var = [0.1, 0.1, 0.1, 0.1]

[[schedule]]
concept = 0
duration = 3
transition = "abrupt"

[[schedule]]
concept = 1
duration = 3
transition = "abrupt"
"#;

fn write_scenario(dir: &Path) -> String {
    let path = dir.join("scenario.toml");
    fs::write(&path, SCENARIO).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn generate_then_run_produces_scores_per_point() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path());

    let out = driftpool(&["generate", "--scenario", &scenario, "--out-dir", "gen"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stream = dir.path().join("gen/stream.csv");
    let lines = fs::read_to_string(&stream).unwrap().lines().count();
    assert_eq!(lines, 1 + 6 * 64, "header plus one row per point");

    let out = driftpool(
        &[
            "run",
            "--input",
            stream.to_str().unwrap(),
            "--batch-size",
            "64",
            "--seed",
            "7",
            "--out-dir",
            "run",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let scores = fs::read_to_string(dir.path().join("run/scores.csv")).unwrap();
    let mut lines = scores.lines();
    assert_eq!(lines.next().unwrap(), "batch_index,point_index,score,label");
    assert_eq!(lines.count(), 5 * 64, "one row per scored data point");

    let trace = fs::read_to_string(dir.path().join("run/trace.csv")).unwrap();
    let lines: Vec<&str> = trace.lines().collect();
    assert_eq!(lines[0], "batch_index,pool_reliability,pool_size,event");
    assert!(lines[1].starts_with("0,") && lines[1].ends_with(",init"));
    assert_eq!(lines.len(), 1 + 6, "header, init row, five scored batches");
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("stream AUC"), "summary line: {stdout}");
}

#[test]
fn run_from_scenario_directly() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path());
    let out = driftpool(
        &["run", "--scenario", &scenario, "--seed", "3", "--out-dir", "direct"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("direct/scores.csv").exists());
    assert!(dir.path().join("direct/trace.csv").exists());
}

#[test]
fn missing_source_prints_usage_and_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = driftpool(&["run"], dir.path());
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Usage"), "expected usage message, got: {stderr}");
}

#[test]
fn conflicting_sources_fail() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path());
    fs::write(dir.path().join("input.csv"), "a,b\n1.0,2.0\n").unwrap();
    let out = driftpool(
        &["run", "--input", "input.csv", "--scenario", &scenario],
        dir.path(),
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("cannot be used with"),
        "expected conflict diagnostic, got: {stderr}"
    );
}

#[test]
fn unknown_flag_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = driftpool(&["run", "--mystery-flag"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn identical_command_lines_give_identical_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path());
    for out_dir in ["a", "b"] {
        let out = driftpool(
            &["run", "--scenario", &scenario, "--seed", "9", "--out-dir", out_dir],
            dir.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for file in ["scores.csv", "trace.csv"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
}

#[test]
fn bench_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = write_scenario(dir.path());
    let out = driftpool(
        &[
            "bench",
            "--scenario",
            &scenario,
            "--seeds",
            "2",
            "--out-dir",
            "bench",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(dir.path().join("bench/report.csv")).unwrap();
    let lines: Vec<&str> = report.lines().collect();
    assert_eq!(
        lines[0],
        "variant,seed,auc,mean_pool_size,max_pool_size,major_updates,mean_batch_seconds"
    );
    // Two variants (adaptive, incremental) times two seeds.
    assert_eq!(lines.len(), 1 + 4);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("adaptive") && stdout.contains("incremental"));
}

#[test]
fn missing_label_column_flag_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("plain.csv"), "a,b\n1.0,2.0\n3.0,4.0\n").unwrap();
    let out = driftpool(
        &[
            "run",
            "--input",
            "plain.csv",
            "--label-column",
            "target",
            "--batch-size",
            "1",
        ],
        dir.path(),
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("target"), "diagnostic names the column: {stderr}");
}
