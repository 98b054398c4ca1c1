use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use weakval::table::parse_table;
use weakval_core::contextuality::ContextTable;
use weakval_core::scenarios::{ghz_table, mermin_square_table, ScenarioReport};

fn weakval(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakval"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn report(out: &Output) -> ScenarioReport {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn computed(r: &ScenarioReport, kind: &str, target: &str) -> f64 {
    r.entries
        .iter()
        .find(|e| e.kind == kind && e.target == target)
        .and_then(|e| e.computed)
        .unwrap_or_else(|| panic!("no {kind} entry for {target}"))
}

fn tables_dir() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/tables"))
}

#[test]
fn three_box_report() {
    let out = weakval(&["scenario", "three_box", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert!(r.overall);
    assert_eq!(computed(&r, "weak", "P_C"), -1.0);
}

#[test]
fn ghz_report() {
    let out = weakval(&["scenario", "ghz"]);
    assert_eq!(code(&out), 0);
    assert!((computed(&report(&out), "weak", "N+++") + 0.25).abs() < 1e-12);
}

#[test]
fn failing_scenario_exits_one() {
    let out = weakval(&["scenario", "mermin_nonet_a"]);
    assert_eq!(code(&out), 1);
    let r = report(&out);
    assert!(!r.overall);
    assert!(r.entries.iter().filter(|e| !e.pass).all(|e| e.kind == "sequential"));
}

#[test]
fn unknown_scenario_exits_two() {
    let out = weakval(&["scenario", "nope"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn report_json_round_trips() {
    let out = weakval(&["scenario", "epr_ancilla"]);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let again = serde_json::to_value(report(&out)).unwrap();
    assert_eq!(value, again);
}

#[test]
fn report_csv_has_one_row_per_entry() {
    let out = weakval(&["scenario", "three_box", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("kind,target,expected,computed,error,pass"));
    assert_eq!(text.lines().count(), 11);
}

#[test]
fn weakmeas_zero_coupling_with_samples_exits_three() {
    let out = weakval(&["weakmeas", "three_box", "P_C", "--lambda", "0", "--samples", "10"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn weakmeas_grid_override_out_of_range_exits_three() {
    let out = weakval(&["weakmeas", "three_box", "P_C", "--lambda", "50", "--grid-halfwidth", "10"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn weakmeas_unknown_observable_exits_two() {
    let out = weakval(&["weakmeas", "three_box", "P_Q"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn weakmeas_exact_csv_on_stdout() {
    let out = weakval(&["weakmeas", "three_box", "P_C", "--grid-points", "512"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().next(), Some("P,density"));
    assert_eq!(text.lines().count(), 513);
}

#[test]
fn sampled_csv_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (i, threads) in ["1", "4", "4"].iter().enumerate() {
        let target = dir.path().join(format!("run{i}"));
        let out = Command::new(env!("CARGO_BIN_EXE_weakval"))
            .args(["weakmeas", "three_box", "P_C", "--lambda", "0.1", "--samples", "200000"])
            .args(["--seed", "9", "--output"])
            .arg(&target)
            .env("RAYON_NUM_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
        files.push(fs::read(target.join("sampled.csv")).unwrap());
        let summary: serde_json::Value =
            serde_json::from_slice(&fs::read(target.join("summary.json")).unwrap()).unwrap();
        assert_eq!(summary["estimate"]["samples"], 200000);
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[1], files[2]);
}

#[test]
fn different_seeds_differ() {
    let dir = tempfile::tempdir().unwrap();
    let read = |seed: &str| {
        let target = dir.path().join(seed);
        let out = weakval(&[
            "weakmeas", "three_box", "P_C", "--samples", "1000", "--seed", seed, "--output",
            target.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
        fs::read(target.join("sampled.csv")).unwrap()
    };
    assert_ne!(read("1"), read("2"));
}

#[test]
fn hvt_builtin_summaries() {
    let out = weakval(&["hvt", "mermin_square"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("0 assignments / 512; certificate: 6 contexts"));
    let out = weakval(&["hvt", "ghz"]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("0 assignments / 64"));
}

#[test]
fn hvt_satisfiable_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("free.tbl");
    fs::write(&path, "obs A z@0\nobs B z@1\nobs AB z@0 z@1\nctx +1 A B AB\n").unwrap();
    let out = weakval(&["hvt", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&out), 0);
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["assignments"], 4);
    assert_eq!(r["certificate"], serde_json::Value::Null);
}

#[test]
fn hvt_identity_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.tbl");
    fs::write(&path, "obs Z z@0\nctx +1 Z\n").unwrap();
    let out = weakval(&["hvt", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("verify FAILED"));
}

#[test]
fn hvt_parse_error_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.tbl");
    fs::write(&path, "obs A x@0\n# fine\nctx +1 A B\n").unwrap();
    let out = weakval(&["hvt", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

fn assert_same_table(parsed: &ContextTable, builtin: &ContextTable) {
    assert_eq!(parsed.observables(), builtin.observables());
    assert_eq!(parsed.contexts(), builtin.contexts());
    match (parsed.state(), builtin.state()) {
        (None, None) => {}
        (Some(a), Some(b)) => {
            let diff: f64 = a
                .amplitudes()
                .iter()
                .zip(b.amplitudes())
                .map(|(x, y)| (x - y).norm())
                .sum();
            assert!(diff < 1e-15);
        }
        _ => panic!("state presence differs"),
    }
}

#[test]
fn shipped_tables_match_builtins() {
    let square = fs::read_to_string(tables_dir().join("mermin_square.tbl")).unwrap();
    assert_same_table(&parse_table(&square).unwrap(), &mermin_square_table());
    let ghz = fs::read_to_string(tables_dir().join("ghz.tbl")).unwrap();
    assert_same_table(&parse_table(&ghz).unwrap(), &ghz_table());
}

#[test]
fn list_names_everything() {
    let out = weakval(&["list", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["scenarios"].as_array().unwrap().len(), 5);
    assert_eq!(v["tables"], serde_json::json!(["mermin_square", "ghz"]));
}

#[test]
fn bad_flag_is_usage_error() {
    assert_eq!(code(&weakval(&["scenario", "three_box", "--bogus"])), 2);
    assert_eq!(code(&weakval(&["list", "--format", "csv"])), 2);
}
