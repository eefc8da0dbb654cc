//! End-to-end tests of the command-line interface.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_stationarity")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn failed")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stationarity_cli_{tag}"));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_series(path: &Path, values: impl Iterator<Item = f64>) {
    let body: String = values.map(|v| format!("{v}\n")).collect();
    std::fs::write(path, body).unwrap();
}

#[test]
fn simulate_is_deterministic_and_accepts_both_param_forms() {
    let a = run(&["simulate", "--model", "DS(4,0.7)", "--n", "50", "--seed", "3"]);
    let b = run(&["simulate", "--model", "DS(4,0.7)", "--n", "50", "--seed", "3"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run(&[
        "simulate", "--model", "DS", "--params", "4", "0.7", "--n", "50", "--seed", "3",
    ]);
    assert_eq!(a.stdout, c.stdout);
    assert_eq!(a.stdout.iter().filter(|&&ch| ch == b'\n').count(), 50);

    let bad = run(&["simulate", "--model", "XX", "--n", "50", "--seed", "3"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn test_command_emits_versioned_json_report() {
    let dir = tmp_dir("json");
    let input = dir.join("n1.txt");
    let sim = run(&["simulate", "--model", "N1", "--n", "96", "--seed", "12"]);
    std::fs::write(&input, &sim.stdout).unwrap();

    let out = run(&[
        "test", "--input", input.to_str().unwrap(), "--preset", "dc", "--h", "2",
        "--replicates", "200", "--seed", "7", "--json",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["meta"]["preset"], "dc");
    assert_eq!(report["meta"]["M"], 200);
    assert_eq!(report["meta"]["h"], 2);
    assert_eq!(report["meta"]["n"], 95);
    assert_eq!(report["components"][0]["name"], "d");
    assert_eq!(report["components"][1]["name"], "c");
    let p = report["global"]["p"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p));
    // exit code 0 regardless of the verdict; keys are stable
    let again = run(&[
        "test", "--input", input.to_str().unwrap(), "--preset", "dc", "--h", "2",
        "--replicates", "200", "--seed", "7", "--json",
    ]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn monotone_ramp_is_rejected_by_d() {
    // run-once regression anchor with a fixed seed
    let dir = tmp_dir("ramp");
    let input = dir.join("ramp.txt");
    write_series(
        &input,
        (0..200).map(|i| i as f64 + 0.5 * ((i * 7) % 13) as f64 / 13.0),
    );
    let out = run(&[
        "test", "--input", input.to_str().unwrap(), "--preset", "d", "--replicates", "500",
        "--seed", "1", "--json",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let p = report["global"]["p"].as_f64().unwrap();
    assert!(p < 0.05, "monotone trend must be detected, got p = {p}");
}

#[test]
fn iid_dc_pvalue_regression_anchor() {
    // The exact global p-value for this seeded input is frozen so that
    // refactors cannot silently change the pipeline.
    let dir = tmp_dir("anchor");
    let input = dir.join("n1.txt");
    let sim = run(&["simulate", "--model", "N1", "--n", "128", "--seed", "2024"]);
    std::fs::write(&input, &sim.stdout).unwrap();
    let out = run(&[
        "test", "--input", input.to_str().unwrap(), "--preset", "dc", "--h", "2",
        "--replicates", "250", "--seed", "42", "--json",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let p = report["global"]["p"].as_f64().unwrap();
    assert_eq!(p, 0.288, "frozen regression anchor moved: p = {p}");
}

#[test]
fn csv_column_selection_and_data_errors() {
    let dir = tmp_dir("csv");
    let input = dir.join("table.csv");
    let mut body = String::new();
    for i in 0..64 {
        let x = (i as f64 * 0.7).sin() * 2.0 + (i % 7) as f64;
        body.push_str(&format!("row{i},{x},ignored\n"));
    }
    std::fs::write(&input, body).unwrap();

    let ok = run(&[
        "test", "--input", input.to_str().unwrap(), "--column", "2", "--preset", "d",
        "--replicates", "50", "--seed", "5",
    ]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));

    // without --column the first field is not numeric: bad data, exit 3,
    // and the message names the line
    let bad = run(&[
        "test", "--input", input.to_str().unwrap(), "--preset", "d", "--replicates", "50",
    ]);
    assert_eq!(bad.status.code(), Some(3));
    let msg = String::from_utf8_lossy(&bad.stderr);
    assert!(msg.contains("line 1"), "unexpected message: {msg}");
    assert!(msg.contains("--column"), "should hint at --column: {msg}");

    // column out of range
    let bad = run(&[
        "test", "--input", input.to_str().unwrap(), "--column", "9", "--preset", "d",
        "--replicates", "50",
    ]);
    assert_eq!(bad.status.code(), Some(3));

    // unknown preset: bad arguments, exit 2
    let bad = run(&[
        "test", "--input", input.to_str().unwrap(), "--column", "2", "--preset", "zz",
    ]);
    assert_eq!(bad.status.code(), Some(2));

    // series too short for the requested h
    let short = dir.join("short.txt");
    write_series(&short, (0..5).map(|i| i as f64));
    let bad = run(&[
        "test", "--input", short.to_str().unwrap(), "--preset", "c", "--h", "7",
        "--replicates", "20",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn strict_ties_flag_rejects_tied_input() {
    let dir = tmp_dir("ties");
    let input = dir.join("tied.txt");
    write_series(&input, (0..80).map(|i| (i % 40) as f64));
    let strict = run(&[
        "test", "--input", input.to_str().unwrap(), "--preset", "d", "--replicates", "50",
        "--strict-ties",
    ]);
    assert_eq!(strict.status.code(), Some(3));

    let lenient = run(&[
        "test", "--input", input.to_str().unwrap(), "--preset", "d", "--replicates", "50",
        "--json",
    ]);
    assert!(lenient.status.success());
    let report: serde_json::Value = serde_json::from_slice(&lenient.stdout).unwrap();
    assert_eq!(report["meta"]["ties"], true);
}

#[test]
fn bandwidth_command_reports_diagnostics() {
    let dir = tmp_dir("bw");
    let flat = dir.join("flat.txt");
    write_series(&flat, (0..64).map(|_| 1.5));
    let out = run(&["bandwidth", "--input", flat.to_str().unwrap(), "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["b_n"], 1);
    assert_eq!(v["diagnostics"]["fallback_constant"], true);

    let ar = dir.join("ar.txt");
    let sim = run(&["simulate", "--model", "N2", "--n", "128", "--seed", "4"]);
    std::fs::write(&ar, &sim.stdout).unwrap();
    let out = run(&["bandwidth", "--input", ar.to_str().unwrap(), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["b_n"].as_u64().unwrap() > 4, "strong dependence must enlarge b_n: {v}");
}

#[test]
fn experiment_writes_csv_and_json() {
    let dir = tmp_dir("exp");
    let conf = dir.join("exp.conf");
    std::fs::write(
        &conf,
        "name = mini\nseed = 2\nreps = 4\nreplicates = 40\n\n\
         [cell]\nmodel = S(0.9)\nn = 48\ntests = c@2, dc@2\n",
    )
    .unwrap();
    let out_dir = dir.join("out");
    let st = run(&[
        "experiment", "--config", conf.to_str().unwrap(), "--out", out_dir.to_str().unwrap(),
    ]);
    assert!(st.status.success());
    let csv = std::fs::read_to_string(out_dir.join("mini.csv")).unwrap();
    assert!(csv.starts_with("model,params,n,test,h,rejection_pct,stderr"));
    assert_eq!(csv.lines().count(), 3);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("mini.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
    assert_eq!(json["M"], 40);

    // config errors exit with the argument code
    let bad_conf = dir.join("bad.conf");
    std::fs::write(&bad_conf, "reps = nope\n").unwrap();
    let st = run(&["experiment", "--config", bad_conf.to_str().unwrap()]);
    assert_eq!(st.status.code(), Some(2));
}
