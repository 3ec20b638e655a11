use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qcloning(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcloning")).args(args).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = qcloning(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn sweep_universal_csv() {
    let csv = stdout(&["sweep-universal", "--d", "3", "--grid", "11"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("phi_mix,F_A,F_B,eta_A,eta_B,ellipse_residual"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 11);
    // phi = 0 keeps the input in A; phi = pi/2 in B
    assert!((rows[0][1] - 1.0).abs() < 1e-12 && (rows[10][2] - 1.0).abs() < 1e-12);
    assert!(rows.iter().all(|r| r[5].abs() < 1e-8));
}

#[test]
fn sweep_pc_contains_symmetric_point() {
    let csv = stdout(&["sweep-pc", "--d", "2", "--grid", "10"]);
    let rows: Vec<Vec<f64>> = csv.lines().skip(1).map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 11);
    let sym = rows.iter().find(|r| (r[0] - r[3]).abs() < 1e-9).expect("symmetric row");
    assert!((sym[4] - (0.5 + 1.0 / 8f64.sqrt())).abs() < 1e-9);
}

#[test]
fn optimize_single_point_json() {
    let v: Value = serde_json::from_str(&stdout(&["optimize", "--eta-a", "0.6", "--format", "json"])).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "optimize");
    let row = v["rows"][0].as_array().unwrap();
    assert!((row[3].as_f64().unwrap() - 0.8).abs() < 1e-9);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = qcloning(&["sweep-universal", "--seed", "9", "--out", p.to_str().unwrap()]);
        assert!(out.status.success());
        assert!(out.stdout.is_empty());
    }
    assert_eq!(read(&a), read(&b));
    let c = stdout(&["sweep-universal", "--seed", "10"]);
    assert_eq!(c.lines().next(), read(&a).lines().next());
}

#[test]
fn entanglement_rows_and_classes() {
    let csv = stdout(&["entanglement", "--grid", "9"]);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("nu,xi,theta,min_ppt_eig,negativity_AB,negativity_AX,tau,class,family")
    );
    let optimal: Vec<&str> = lines.filter(|l| l.ends_with(",optimal")).collect();
    assert_eq!(optimal.len(), 9);
    assert!(optimal[4].contains(",GHZ-type,"));
    assert!(optimal[0].contains(",zero-tangle,"));
}

#[test]
fn verify_nosignaling_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ns.json");
    let out = qcloning(&["verify-nosignaling", "--grid", "100", "--out", path.to_str().unwrap()]);
    let v: Value = serde_json::from_str(&read(&path)).unwrap();
    assert_eq!(v["schema_version"], 1);
    let q = v["max_quality"].as_f64().unwrap();
    assert!((0.97..=1.0 + 1e-6).contains(&q));
    assert_eq!(v["inequality_necessary_violations"], 0);
    let passed = v["passed"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if passed { 0 } else { 1 }));
    let examples = v["infeasible_examples"].as_array().unwrap();
    assert!(examples.iter().all(|e| e["feasible"] == (e["quality"].as_f64().unwrap() <= 1.0 + 1e-12)));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["optimize"][..],
        &["optimize", "--eta-a", "1.5"],
        &["verify-nosignaling", "--grid", "50"],
        &["sweep-pc", "--d", "1"],
        &["no-such-command"],
        &["sweep-pc", "--format", "xml"],
    ] {
        assert_eq!(qcloning(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn corrupted_tolerances_fail_the_selftest() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("selftest.json");
    let out = qcloning(&["selftest", "--corrupt-tolerances", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(&read(&path)).unwrap();
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["passed"] == false));
}
