use std::path::Path;
use std::process::{Command, Output};

use curveflow::liftcurve::read_csv;
use serde_json::Value;

fn curveflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curveflow")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn const_table_passes_every_generator() {
    let out = curveflow(&["symmetries", "const"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schema"], 1);
    let gens = v["generators"].as_array().unwrap();
    assert_eq!(gens.len(), 9);
    assert!(gens.iter().all(|g| g["status"] == "pass"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(curveflow(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(curveflow(&["symmetries", "cubic"]).status.code(), Some(2));
    assert_eq!(curveflow(&["admissible", "--gamma", "1", "2", "--ratio", "irrational"]).status.code(), Some(2));
}

#[test]
fn admissible_state_exits_zero() {
    let out = curveflow(&["admissible", "--gamma", "-1", "1", "1", "2", "--c1", "1", "--c2", "1", "--s0", "0", "--ratio", "rational:1:2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"]["admissible"], true);
}

#[test]
fn lift_writes_the_table_contract() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("lift.csv");
    let out = curveflow(&["lift", "linear", "--lambda", "0.5", "--samples", "101", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["lift"]["samples"], 101);

    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("tau,l,z,a\n"));
    let t = read_csv(text.as_bytes()).unwrap();
    assert_eq!(t.tau.len(), 101);
    assert!(t.l.windows(2).all(|w| w[1] >= w[0]));
    assert!((t.l[100] - std::f64::consts::TAU).abs() < 1e-9);
}

#[test]
fn lift_report_goes_to_its_own_file() {
    let dir = tempfile::tempdir().unwrap();
    let (csv, report) = (dir.path().join("t.csv"), dir.path().join("r.json"));
    let out = curveflow(&[
        "lift", "log", "--out", csv.to_str().unwrap(), "--report", report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["verify"]["case"], "log");
    assert!(Path::new(&csv).exists());
}

#[test]
fn branch_overrun_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("q.csv");
    let out = curveflow(&["lift", "quadratic", "--lambda", "0.25", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["status"], "fail");
    assert!(v["error"].as_str().unwrap().contains("branch"));
}

#[test]
fn environment_supplies_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_curveflow"))
        .args(["lift", "linear", "--samples", "11"])
        .env("CURVEFLOW_LAMBDA", "3/7")
        .env("CURVEFLOW_OUT", dir.path().join("e.csv"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["lift"]["case"]["lambda"], 3.0 / 7.0);
    assert!(dir.path().join("e.csv").exists());
}

#[test]
fn report_is_deterministic() {
    let (a, b) = (curveflow(&["report"]), curveflow(&["report"]));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["schema"], 1);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 6);
    assert!(String::from_utf8_lossy(&a.stderr).lines().filter(|l| l.starts_with("PASS")).count() == 6);
}
