//! End-to-end tests of the binary: exit codes, golden output shapes, and
//! reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_coxlab"))
}

fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

fn two_state_file(dir: &Path) -> PathBuf {
    write_file(
        dir,
        "two_state.json",
        r#"{
            "states": [
                {"label": "calm", "lambda": 0.5},
                {"label": "burst", "lambda": 1.5}
            ],
            "Q": [[-1.0, 1.0], [1.0, -1.0]],
            "service": {"type": "exponential", "mu": 2.0}
        }"#,
    )
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn help_lists_defaults_for_every_subcommand() {
    for sub in ["analyze", "sm-check", "sweep", "bounds", "search"] {
        let out = run(bin().args([sub, "--help"]));
        assert!(out.status.success(), "{sub} --help failed");
        let text = stdout_str(&out);
        assert!(
            text.contains("default"),
            "{sub} --help must document defaults:\n{text}"
        );
        assert!(text.contains("--seed"));
        assert!(text.contains("--threads"));
        assert!(text.contains("--out"));
    }
    // Defaults that scripts rely on.
    let sweep = stdout_str(&run(bin().args(["sweep", "--help"])));
    for needle in ["0.05,0.25,1,4,20", "200000", "32", "default: 0.1"] {
        assert!(sweep.contains(needle), "sweep default {needle} missing");
    }
    let search = stdout_str(&run(bin().args(["search", "--help"])));
    for needle in ["exponential:1.0", "default: 100", "default: 2"] {
        assert!(search.contains(needle), "search default {needle} missing");
    }
}

#[test]
fn analyze_two_state_is_reversible_and_doubly_monotone() {
    let dir = tempfile::tempdir().unwrap();
    let input = two_state_file(dir.path());
    let out = run(bin().args(["analyze", "--input", input.to_str().unwrap(), "--seed", "1"]));
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(json["reversible"], true);
    assert_eq!(json["doubly_monotone"], true);
    assert_eq!(json["ccp"]["is_ccp"], true);
    assert_eq!(json["seed"], 1);
    assert!(json["policy"]["numeric"]["row_sum_tol"].is_number());
}

#[test]
fn analyze_cycle_is_not_monotone_not_reversible() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "cycle.json",
        r#"{
            "states": [
                {"label": "a", "lambda": 0.5},
                {"label": "b", "lambda": 1.0},
                {"label": "c", "lambda": 2.0}
            ],
            "Q": [[-1.0, 1.0, 0.0], [0.0, -1.0, 1.0], [1.0, 0.0, -1.0]]
        }"#,
    );
    let out = run(bin().args(["analyze", "--input", input.to_str().unwrap(), "--seed", "1"]));
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(json["reversible"], false);
    assert_eq!(json["monotonicity"]["monotone"], false);
}

#[test]
fn malformed_row_exits_2_and_names_the_row() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "bad.json",
        r#"{
            "states": [
                {"label": "a", "lambda": 0.5},
                {"label": "b", "lambda": 1.5}
            ],
            "Q": [[-1.0, 1.0], [1.0, -0.5]]
        }"#,
    );
    let out = run(bin().args(["analyze", "--input", input.to_str().unwrap(), "--seed", "1"]));
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("row 1"), "stderr must name the row: {err}");
}

#[test]
fn reducible_chain_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "reducible.json",
        r#"{
            "states": [
                {"label": "a", "lambda": 0.5},
                {"label": "b", "lambda": 1.0},
                {"label": "c", "lambda": 2.0}
            ],
            "Q": [[-1.0, 1.0, 0.0], [1.0, -1.0, 0.0], [0.0, 1.0, -1.0]]
        }"#,
    );
    let out = run(bin().args(["analyze", "--input", input.to_str().unwrap(), "--seed", "1"]));
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unstable_sweep_exits_4_without_override() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "unstable.json",
        r#"{
            "states": [
                {"label": "lo", "lambda": 1.5},
                {"label": "hi", "lambda": 4.0}
            ],
            "Q": [[-1.0, 1.0], [1.0, -1.0]],
            "service": {"type": "exponential", "mu": 1.0}
        }"#,
    );
    let out = run(bin().args(["sweep", "--input", input.to_str().unwrap(), "--seed", "1"]));
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn sweep_csv_header_is_pinned_and_exit_0_on_two_state() {
    let dir = tempfile::tempdir().unwrap();
    let input = two_state_file(dir.path());
    let out = run(bin().args(["sweep", "--input", input.to_str().unwrap(), "--seed", "5"]));
    assert_eq!(
        out.status.code(),
        Some(0),
        "proven class must be decreasing"
    );
    let text = stdout_str(&out);
    assert!(text.contains("c,value,half_width,method,verdict_pair_flag\n"));
    assert!(text.contains("# seed=5\n"));
    assert!(text.contains("# spec_hash="));
    assert!(text.contains("# policy="));
    let data_rows = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('c'))
        .count();
    assert_eq!(data_rows, 5);
}

#[test]
fn sm_check_two_state_defaults_exit_0() {
    let dir = tempfile::tempdir().unwrap();
    let input = two_state_file(dir.path());
    let out = run(bin().args([
        "sm-check",
        "--input",
        input.to_str().unwrap(),
        "--seed",
        "1",
    ]));
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(json["scan"]["all_ordered"], true);
    // Stable field names inside cells.
    let cell = &json["scan"]["cells"][0];
    for field in ["c_pair", "grid", "verdict", "lp_optimum", "witness"] {
        assert!(cell.get(field).is_some(), "missing field {field}");
    }
}

#[test]
fn constant_intensity_chain_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "constant.json",
        r#"{
            "states": [
                {"label": "a", "lambda": 1.0},
                {"label": "b", "lambda": 1.0}
            ],
            "Q": [[-2.0, 2.0], [0.5, -0.5]]
        }"#,
    );
    let out = run(bin().args([
        "sm-check",
        "--input",
        input.to_str().unwrap(),
        "--seed",
        "1",
    ]));
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn planted_pmf_violation_exits_10_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let pair = write_file(
        dir.path(),
        "pair.json",
        r#"{
            "levels": [0.0, 1.0],
            "dim": 2,
            "x_pmf": [0.5, 0.0, 0.0, 0.5],
            "y_pmf": [0.25, 0.25, 0.25, 0.25]
        }"#,
    );
    let out = run(bin().args([
        "sm-check",
        "--pmf-pair",
        pair.to_str().unwrap(),
        "--seed",
        "1",
    ]));
    assert_eq!(out.status.code(), Some(10));
    let json: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(json["verdict"], "Violated");
    assert!(json["witness"]["phi"].is_array());
    let optimum = json["lp_optimum"].as_f64().unwrap();
    assert!((optimum - (-1.0)).abs() < 1e-9);
}

#[test]
fn bounds_report_shows_inf_for_frozen_overload() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "overload.json",
        r#"{
            "states": [
                {"label": "lo", "lambda": 0.5},
                {"label": "hi", "lambda": 2.5}
            ],
            "Q": [[-1.0, 1.0], [1.0, -1.0]],
            "service": {"type": "exponential", "mu": 2.0}
        }"#,
    );
    let out = run(bin().args(["bounds", "--input", input.to_str().unwrap(), "--seed", "1"]));
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(json["upper"], "inf");
    assert!(json["lower"].is_number());
}

#[test]
fn bounds_two_state_reference_values() {
    let dir = tempfile::tempdir().unwrap();
    let input = two_state_file(dir.path());
    let out = run(bin().args(["bounds", "--input", input.to_str().unwrap(), "--seed", "1"]));
    let json: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert!((json["lower"].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!((json["upper"].as_f64().unwrap() - 5.0 / 6.0).abs() < 1e-12);
    assert!((json["lambda_bar"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((json["rho"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn search_rerun_is_identical_and_summary_printed() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");
    for path in [&out_a, &out_b] {
        let out = run(bin().args([
            "search",
            "--budget",
            "20",
            "--seed",
            "4242",
            "--out",
            path.to_str().unwrap(),
        ]));
        assert_eq!(
            out.status.code(),
            Some(0),
            "search always exits 0 on success"
        );
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains("samples tried"));
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "same seed must give identical files");
}

#[test]
fn injected_chain_appears_consistently() {
    let dir = tempfile::tempdir().unwrap();
    let cycle = write_file(
        dir.path(),
        "cycle.json",
        r#"{
            "states": [
                {"label": "a", "lambda": 0.5},
                {"label": "b", "lambda": 1.0},
                {"label": "c", "lambda": 2.0}
            ],
            "Q": [[-1.0, 1.0, 0.0], [0.0, -1.0, 1.0], [1.0, 0.0, -1.0]]
        }"#,
    );
    let out = run(bin().args([
        "search",
        "--budget",
        "1",
        "--seed",
        "1",
        "--inject",
        cycle.to_str().unwrap(),
    ]));
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let records = json["report"]["records"].as_array().unwrap();
    // The injected chain is not monotone; it must surface either as a
    // candidate (clean scan) or as a violation record.
    let injected: Vec<_> = records
        .iter()
        .filter(|r| r["sample_index"].is_null())
        .collect();
    assert_eq!(injected.len(), 1);
    assert_eq!(injected[0]["monotone"], false);
    assert!(injected[0]["candidate"] == true || injected[0]["violation"] == true);
}

#[test]
fn seeded_runs_are_byte_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let input = two_state_file(dir.path());
    let mut outputs = Vec::new();
    for threads in ["1", "8"] {
        let out = run(bin().args([
            "sweep",
            "--input",
            input.to_str().unwrap(),
            "--method",
            "sim",
            "--arrivals",
            "20000",
            "--seed",
            "31337",
            "--threads",
            threads,
        ]));
        assert_eq!(out.status.code(), Some(0));
        outputs.push(out.stdout);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn missing_service_block_exits_2_for_queue_commands() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_file(
        dir.path(),
        "no_service.json",
        r#"{
            "states": [
                {"label": "a", "lambda": 0.5},
                {"label": "b", "lambda": 1.5}
            ],
            "Q": [[-1.0, 1.0], [1.0, -1.0]]
        }"#,
    );
    for sub in ["sweep", "bounds"] {
        let out = run(bin().args([sub, "--input", input.to_str().unwrap(), "--seed", "1"]));
        assert_eq!(
            out.status.code(),
            Some(2),
            "{sub} must reject missing service"
        );
    }
}
