//! End-to-end tests of the `fiberplan` binary: exit-status contract, report
//! files, overrides, exports, and determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fiberplan"))
}

fn write_scenario(dir: &Path, name: &str, body: &serde_json::Value) -> std::path::PathBuf {
    let path = dir.join(format!("{name}.json"));
    fs::write(&path, serde_json::to_string_pretty(body).unwrap()).unwrap();
    path
}

fn circle_scenario(expected: u64) -> serde_json::Value {
    serde_json::json!({
        "name": "circle-cli",
        "space": "S1",
        "planner": { "op": "builtin", "name": "circle" },
        "verification": { "n-samples": 300 },
        "expected-piece-count": expected
    })
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn passing_scenario_exits_zero_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "ok", &circle_scenario(2));
    let out = run_in(dir.path(), &["run", cfg.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("partition"), "{stdout}");
    assert!(stdout.contains("matches the expected 2"), "{stdout}");
    let report_path = dir.path().join("circle-cli-report.json");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["count_ok"], true);
    assert_eq!(report["verification"]["overall_pass"], true);
}

#[test]
fn count_mismatch_exits_one_but_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "mismatch", &circle_scenario(5));
    let out = run_in(dir.path(), &["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("MISMATCH"), "{stdout}");
    // The report is still written, and its checks all pass: only the count
    // expectation failed.
    let report: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("circle-cli-report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["count_ok"], false);
    assert_eq!(report["verification"]["overall_pass"], true);
}

#[test]
fn failing_check_exits_one_and_still_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(
        dir.path(),
        "gap",
        &serde_json::json!({
            "name": "gap-cli",
            "space": "S1",
            "planner": {
                "op": "corrupt",
                "corruption": "gap",
                "inner": { "op": "builtin", "name": "circle" }
            },
            "verification": { "n-samples": 300 }
        }),
    );
    let out = run_in(dir.path(), &["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("gap-cli-report.json")).unwrap())
            .unwrap();
    assert_eq!(report["verification"]["overall_pass"], false);
}

#[test]
fn unparseable_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(&path, "{ not json").unwrap();
    let out = run_in(dir.path(), &["run", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}

#[test]
fn unknown_builtin_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(
        dir.path(),
        "unknown",
        &serde_json::json!({
            "name": "unknown",
            "space": "S1",
            "planner": { "op": "builtin", "name": "mystery" }
        }),
    );
    let out = run_in(dir.path(), &["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown builtin"));
}

#[test]
fn missing_config_file_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["run", "does-not-exist.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_and_samples_overrides_reach_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "override", &circle_scenario(2));
    let report_path = dir.path().join("custom.json");
    let out = run_in(
        dir.path(),
        &[
            "run",
            cfg.to_str().unwrap(),
            "--seed",
            "42",
            "--samples",
            "123",
            "--report",
            report_path.to_str().unwrap(),
        ],
    );
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    let partition = &report["verification"]["checks"][0];
    assert_eq!(partition["name"], "partition");
    assert_eq!(partition["samples"], 123);
}

#[test]
fn reports_are_byte_identical_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_scenario(dir.path(), "det", &circle_scenario(2));
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for (path, _) in [(&a, 0), (&b, 1)] {
        let out = run_in(
            dir.path(),
            &[
                "run",
                cfg.to_str().unwrap(),
                "--report",
                path.to_str().unwrap(),
            ],
        );
        assert!(out.status.success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn export_dir_receives_polyline_files() {
    let dir = tempfile::tempdir().unwrap();
    let exports = dir.path().join("out");
    fs::create_dir(&exports).unwrap();
    let cfg = write_scenario(
        dir.path(),
        "export",
        &serde_json::json!({
            "name": "export-cli",
            "space": "S1",
            "planner": { "op": "builtin", "name": "circle" },
            "verification": { "n-samples": 300 },
            "exports": [
                { "file": "arc.jsonl", "pairs": [ { "x": [1.0, 0.0], "y": [-1.0, 0.0] } ], "samples": 5 }
            ]
        }),
    );
    let out = run_in(
        dir.path(),
        &[
            "run",
            cfg.to_str().unwrap(),
            "--export-dir",
            exports.to_str().unwrap(),
        ],
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(exports.join("arc.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 6);
}
