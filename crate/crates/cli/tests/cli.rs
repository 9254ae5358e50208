use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn summa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_summa")).args(args).env_remove("SUMMA_SEED").output().unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::File::create(&path).unwrap().write_all(body.as_bytes()).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn hs_of_identity() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "id2.json", r#"{"rows": 2, "cols": 2, "data": [1, 0, 0, 1]}"#);
    let v = json(&summa(&["hs", "--matrix", &m]));
    assert_eq!(v["result"]["kind"], "exact");
    assert!((v["result"]["value"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-12);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["config"]["command"]["name"], "hs");
    assert!(v["version"].is_string());
}

#[test]
fn grothendieck_ratio_of_hadamard() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "had2.csv", "1, 1\n1, -1\n");
    let v = json(&summa(&["grothendieck", "--matrix", &m, "--ratio"]));
    let r = &v["result"]["ratio"];
    assert_eq!(r["kind"], "lower");
    assert!((r["value"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-5);
}

#[test]
fn malformed_matrix_exits_one_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "bad.csv", "1, 2\n3, x\n");
    let out = summa(&["hs", "--matrix", &m]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2, column 4"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn precondition_failures_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "id2.json", r#"{"rows": 2, "cols": 2, "data": [1, 0, 0, 1]}"#);
    assert_eq!(summa(&["pi2", "--matrix", &m, "--codomain", "1"]).status.code(), Some(1));
    assert_eq!(summa(&["diag-classify", "--p", "inf", "--q", "2", "--alpha", "1"]).status.code(), Some(1));
}

#[test]
fn seed_environment_overrides_flag() {
    let out = Command::new(env!("CARGO_BIN_EXE_summa"))
        .args(["--seed", "5", "diag-classify", "--p", "2", "--q", "2", "--alpha", "0"])
        .env("SUMMA_SEED", "9")
        .output()
        .unwrap();
    let v = json(&out);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["result"]["predicted"], "not");
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "fam.json", r#"{"space": {"dim": 3, "p": 3}, "vectors": [[1, 0.5, 0], [0, -1, 2]]}"#);
    let args = ["--samples", "5000", "gaussmoment", "--family", f.as_str()];
    let (a, b) = (summa(&args), summa(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["result"]["kind"], "monte_carlo");
}

#[test]
fn growth_table_as_csv() {
    let out = summa(&["--output", "csv", "diag-growth", "--p", "2", "--q", "2", "--alpha", "0.4", "--dims", "2,4,8"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "dim,value,kind,stderr");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("2,") && lines[1].contains(",exact,"));
}

#[test]
fn every_estimate_is_tagged() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "u.json", r#"{"rows": 2, "cols": 2, "data": [1, 0.5, -0.25, 1]}"#);
    let v = json(&summa(&["pi2", "--matrix", &m, "--domain", "1"]));
    for key in ["lower", "upper"] {
        assert!(v["result"][key]["kind"].is_string(), "{key}");
    }
    let lo = v["result"]["lower"]["value"].as_f64().unwrap();
    let hi = v["result"]["upper"]["value"].as_f64().unwrap();
    assert!(lo <= hi + 1e-8);
}

#[test]
fn quick_suite_reports_every_criterion() {
    let out = summa(&["suite", "--quick"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let criteria = v["result"]["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 10);
    let all = criteria.iter().all(|c| c["passed"] == true);
    assert_eq!(out.status.code(), Some(if all { 0 } else { 2 }));
}
