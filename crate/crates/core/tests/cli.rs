//! End-to-end runs of the command-line binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deco-krylov")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn odd_ir_length_is_rejected() {
    let o = run(&["evolve", "--model", "ir", "--lengths", "7", "--tau", "0:1:3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("IR model requires even L"));
}

#[test]
fn malformed_flags_exit_two() {
    for args in [
        vec!["evolve", "--model", "xy", "--lengths", "4"],
        vec!["evolve", "--model", "nn", "--lengths", "4", "--tau", "0:1"],
        vec!["evolve", "--model", "nn", "--lengths", "4", "--tau", "0:1:3", "--tau-list", "0.5"],
        vec!["wavepacket", "--model", "nn", "--lengths", "4"],
        vec!["renyi2", "--model", "nn", "--lengths", "40", "--tau", "0:1:3"],
        vec!["frobnicate"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn quick_verify_passes() {
    let o = run(&["verify", "--level", "quick"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().filter(|l| l.starts_with("PASS")).count() >= 6);
}

#[test]
fn tampered_coefficients_fail_verify() {
    let o = run(&["verify", "--tamper-b", "1:1.01"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("FAIL A2"), "{text}");
    assert!(text.contains("failed:"));
}

#[test]
fn coeffs_csv() {
    let o = run(&["coeffs", "--model", "nn", "--lengths", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "model,L,n,a_n,b_n");
    assert_eq!(lines.len(), 5);
    let b1: f64 = lines[2].split(',').nth(4).unwrap().parse().unwrap();
    assert!((b1 - 3f64.sqrt()).abs() < 1e-15);
}

#[test]
fn evolve_rows_are_ordered_and_normalized() {
    let o = run(&["evolve", "--model", "ir", "--lengths", "20,10", "--tau-list", "0,10"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0][1], "10");
    assert_eq!(rows[3][1], "20");
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == "K_norm").unwrap();
    let k: f64 = rows[3][col].parse().unwrap();
    assert!((k - 0.25).abs() < 0.05, "{k}");
}

#[test]
fn wavepacket_json_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("w.json");
    let o = run(&[
        "wavepacket", "--model", "nn", "--lengths", "4", "--tau-list", "0.5", "--format", "json",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let total: f64 = rows.iter().map(|r| r["psi2"].as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"lengths": [6], "n_max": 4}"#).unwrap();
    let o = run(&["moments", "--model", "nn", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 6);
}
