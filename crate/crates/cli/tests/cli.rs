//! End-to-end CLI behavior: exit codes, file outputs, determinism, and the
//! scripted-predictor replay workflow.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn semnav() -> Command {
    Command::new(env!("CARGO_BIN_EXE_semnav"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    semnav().current_dir(dir).args(args).output().unwrap()
}

#[test]
fn gen_writes_the_stated_dimensions_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        let out = run_in(
            dir.path(),
            &["gen", "--family", "small-h-shape", "--seed", "1", "--out", name],
        );
        assert!(out.status.success());
    }
    let a = fs::read(dir.path().join("a.json")).unwrap();
    let b = fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
    let parsed: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(parsed["rows"], 11);
    assert_eq!(parsed["cols"], 7);
}

#[test]
fn gen_rejects_invalid_params_with_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["gen", "--family", "small-h-shape", "--rooms", "1000", "--out", "x.json"],
    );
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("rooms"), "diagnostic missing: {stderr}");
    assert!(!dir.path().join("x.json").exists());
}

#[test]
fn run_succeeds_and_reports_episode_stats() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "run",
            "--family",
            "small-hallways",
            "--seed",
            "2",
            "--goal",
            "Go to Room 603",
            "--out",
            "episode",
            "--trace",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let line: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("final line is JSON");
    assert_eq!(line["status"], "Success");
    assert!(line["steps"].as_u64().is_some());
    assert!(line["oracle_len"].as_u64().is_some());
    assert!(line["spl"].as_f64().unwrap() > 0.0);
    // Trace exists and has one record per step plus a summary.
    let trace = fs::read_to_string(dir.path().join("episode/trace.ndjson")).unwrap();
    let lines: Vec<&str> = trace.trim_end().lines().collect();
    assert_eq!(lines.len() as u64, line["steps"].as_u64().unwrap() + 1);
}

#[test]
fn run_render_emits_one_frame_per_position() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &[
            "run",
            "--family",
            "small-h-shape",
            "--seed",
            "3",
            "--goal",
            "find room 602",
            "--render",
            "ascii",
            "--out",
            "frames",
        ],
    );
    assert!(out.status.success());
    let line: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let steps = line["steps"].as_u64().unwrap();
    let frames = fs::read_dir(dir.path().join("frames"))
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().starts_with("step_"))
        .count();
    assert_eq!(frames as u64, steps + 1);
}

#[test]
fn run_missing_goal_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["run", "--family", "small-h-shape", "--goal", "Go to Room 999", "--out", "o"],
    );
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("999"));
}

#[test]
fn run_unreachable_goal_reports_failure_status() {
    // Hand-authored environment: the goal door is sealed off from the start.
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("sealed.json"),
        r#"{
            "name": "sealed", "rows": 3, "cols": 5,
            "start": [0, 0],
            "occupancy": ["00100", "00101", "00100"],
            "semantics": [
                {"cell": [0, 2], "label": "Wall"},
                {"cell": [1, 2], "label": "Wall"},
                {"cell": [2, 2], "label": "Wall"},
                {"cell": [1, 4], "label": "Door", "room_number": "9"}
            ]
        }"#,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &["run", "--env", "sealed.json", "--goal", "room 9", "--out", "o"],
    );
    assert_eq!(out.status.code(), Some(1));
    let line: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(line["status"], "Exhausted");
    assert!(line["oracle_len"].is_null());
}

#[test]
fn scripted_predictor_replays_an_oracle_run() {
    let dir = tempfile::tempdir().unwrap();
    // First run with the map-aware oracle and a trace.
    let out = run_in(
        dir.path(),
        &[
            "run",
            "--family",
            "small-h-shape",
            "--seed",
            "6",
            "--goal",
            "Go to Room 601",
            "--predictor",
            "oracle",
            "--trace",
            "--out",
            "oracle-run",
        ],
    );
    assert!(out.status.success());
    // Harvest the region sequence from the trace and write a script file.
    let trace = fs::read_to_string(dir.path().join("oracle-run/trace.ndjson")).unwrap();
    let mut script: Vec<Option<String>> = Vec::new();
    for line in trace.trim_end().lines() {
        let value: serde_json::Value = serde_json::from_str(line).unwrap();
        if let Some(prediction) = value.get("prediction") {
            if prediction.is_null() {
                continue;
            }
            script.push(
                prediction["region"].as_str().map(str::to_string),
            );
        }
    }
    assert!(!script.is_empty());
    fs::write(dir.path().join("script.json"), serde_json::to_vec(&script).unwrap()).unwrap();
    // The scripted replay reproduces the same outcome.
    let replay = run_in(
        dir.path(),
        &[
            "run",
            "--family",
            "small-h-shape",
            "--seed",
            "6",
            "--goal",
            "Go to Room 601",
            "--predictor",
            "scripted:script.json",
            "--out",
            "replay-run",
        ],
    );
    assert!(replay.status.success(), "{}", String::from_utf8_lossy(&replay.stderr));
    let a: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let b: serde_json::Value = serde_json::from_slice(&replay.stdout).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bench_rejects_an_empty_suite() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.json"), r#"{"environments": []}"#).unwrap();
    let out = run_in(dir.path(), &["bench", "--suite", "empty.json", "--out", "o"]);
    assert!(!out.status.success());
}

#[test]
fn bench_table_lists_groups_and_policies() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("suite.json"),
        r#"{"environments": [
            { "family": "small-plaza", "goal_count": 3 },
            { "family": "large-l-shape", "rooms": 24, "goal_count": 1, "horizon": 6000 }
        ]}"#,
    )
    .unwrap();
    let out = run_in(
        dir.path(),
        &[
            "bench",
            "--suite",
            "suite.json",
            "--policies",
            "ours-rule,frontier",
            "--seeds",
            "0..1",
            "--out",
            "o",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = fs::read_to_string(dir.path().join("o/report.txt")).unwrap();
    assert!(table.contains("Small"));
    assert!(table.contains("Large"));
    assert!(table.contains("Overall"));
    assert!(table.contains("ours-rule"));
    assert!(table.contains("frontier"));
    assert!(table.contains("\u{00b1}"));
    let csv = fs::read_to_string(dir.path().join("o/report.csv")).unwrap();
    assert!(csv.starts_with("env,group,policy,seed,goal,status,success,oracle_len,steps,spl,return"));
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("o/report.json")).unwrap()).unwrap();
    assert!(json["episodes"].as_array().unwrap().len() >= 8);
}
