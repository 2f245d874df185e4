use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use degen_core::certificates::{verify_all, Certificate, Report, RunOptions, Status};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn degen(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degen")).current_dir(root()).env("DEGEN_THREADS", "2").args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn verify_row_one() {
    let o = degen(&["verify", "degeneration", "certs/deg/h02_to_h01.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verified"));
}

#[test]
fn failing_certificate_exits_one() {
    let o = degen(&["verify", "degeneration", "crates/core/tests/data/errata/printed_row29.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("failed"));
}

#[test]
fn inconclusive_only_run_prints_banner() {
    let o = degen(&["verify", "nondegeneration", "certs/nondeg/nondeg12.json", "--trials", "50", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("EVIDENCE, NOT PROOF"));
    let invariant_only = degen(&["verify", "nondegeneration", "certs/nondeg/nondeg06.json"]);
    assert_eq!(invariant_only.status.code(), Some(0));
    assert!(!stdout(&invariant_only).contains("EVIDENCE"));
}

#[test]
fn usage_and_input_errors_exit_two() {
    assert_eq!(degen(&["verify"]).status.code(), Some(2));
    assert_eq!(degen(&["verify", "degeneration", "no/such/file.json"]).status.code(), Some(2));
    let o = degen(&["classify", "data/matrices/malformed.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 2"));
    // a non-degeneration file passed to the degeneration verifier
    assert_eq!(degen(&["verify", "degeneration", "certs/nondeg/nondeg01.json"]).status.code(), Some(2));
}

#[test]
fn json_reports_round_trip() {
    let files = ["certs/deg/h05_to_h06.json", "certs/nondeg/nondeg05.json", "certs/deg/h13_to_h10.json"];
    let o = degen(&[&["--format", "json", "verify", "degeneration"][..], &[files[0], files[2]][..]].concat());
    assert_eq!(o.status.code(), Some(0));
    let parsed: Vec<Report> = serde_json::from_str(&stdout(&o)).unwrap();
    let certs: Vec<Certificate> =
        [files[0], files[2]].iter().map(|f| Certificate::load(&root().join(f)).unwrap()).collect();
    assert_eq!(parsed, verify_all(&certs, &RunOptions::default()));
    assert!(parsed.iter().all(|r| r.status == Status::Verified));
}

#[test]
fn invariants_of_h03_minus_one() {
    let o = degen(&["invariants", "--catalog", "H03", "--param", "λ=-1"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("dim𝔇er=16"), "{s}");
    assert!(s.contains("Z₁=") && s.contains("Z₋₁="));
    let ascii = degen(&["invariants", "--catalog", "H03", "--param", "l=-1"]);
    assert_eq!(stdout(&ascii), s);
}

#[test]
fn classify_transported_matrix() {
    let o = degen(&["classify", "data/matrices/h01_transported.json"]);
    assert_eq!((o.status.code(), stdout(&o).trim()), (Some(0), "H01"));
    let o = degen(&["classify", "data/matrices/irrational.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("x^2 - x + 1"));
}

#[test]
fn correspond_outputs() {
    let o = degen(&["correspond", "--to", "ternary", "data/matrices/h13_half_minus_one.json"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 4);
    let o = degen(&["--format", "json", "correspond", "--to", "heisenberg", "data/matrices/h01_transported.json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dim"], 5);
}

#[test]
fn graph_build_matches_golden_dot() {
    let out = std::env::temp_dir().join(format!("degen-graph-{}.dot", std::process::id()));
    let o = degen(&["graph", "build", "--grid", "data/grid.json", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let dot = std::fs::read_to_string(&out).unwrap();
    let golden = std::fs::read_to_string(root().join("crates/core/tests/golden/hasse.dot")).unwrap();
    assert_eq!(dot, golden);
    let _ = std::fs::remove_file(out);
}
