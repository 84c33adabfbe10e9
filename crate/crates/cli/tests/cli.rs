use std::path::PathBuf;
use std::process::{Command, Output};

fn ucw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ucw"))
        .args(args)
        .env_remove("UCW_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn row<'a>(text: &'a str, id: &str) -> &'a str {
    text.lines().find(|l| l.trim_start().starts_with(id)).unwrap_or_else(|| panic!("no row {id} in\n{text}"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ucw-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn shipped(name: &str) -> String {
    std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/witnesses/").to_string() + name).unwrap()
}

#[test]
fn evaluate_reports_violation() {
    let out = ucw(&["evaluate", "--witness", "I", "--input", "family:pi/8:1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("2.69238"), "{text}");
    assert!(text.contains("VIOLATION"), "{text}");
}

#[test]
fn evaluate_json_and_bound_override() {
    let out = ucw(&["evaluate", "--witness", "F", "--input", "uniform", "--bound", "10", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.trim_start().starts_with('{'), "{text}");
    assert!(text.contains("\"violation\": false"), "{text}");
}

#[test]
fn certify_trivial_witness_converges() {
    let out = ucw(&["certify", "--witness", "P(0,0,0)", "--gap", "1e-6"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"converged\": true"));
}

#[test]
fn certify_reports_non_convergence() {
    let out = ucw(&["certify", "--witness", "F", "--node-cap", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("\"termination\": \"node_cap\""));
}

#[test]
fn scan_writes_csv() {
    let dir = scratch("scan");
    let path = dir.join("scan.csv");
    let out = ucw(&["scan", "--grid", "5x3", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 1 + 15);
}

#[test]
fn critvis_with_large_bound_finds_nothing() {
    let out = ucw(&["critvis", "--witness", "F", "--bound", "10"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("no violation"));
}

#[test]
fn subspace_lists_grid_and_circle() {
    let out = ucw(&["subspace", "--grid", "3", "--samples", "4", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("grid")).count(), 9);
    assert_eq!(text.lines().filter(|l| l.starts_with("quantum-curve")).count(), 4);
}

#[test]
fn reproduce_marks_skipped_groups() {
    let out = ucw(&["reproduce-all", "--skip", "certify,local,random"]);
    let text = stdout(&out);
    assert!(row(&text, "certified bracket F").contains("SKIPPED"), "{text}");
    assert!(row(&text, "local search F").contains("SKIPPED"), "{text}");
    assert!(row(&text, "F(pi/8, v=1)").contains("PASS"), "{text}");
    assert!(matches!(out.status.code(), Some(0 | 1)));
}

#[test]
fn reproduce_catches_corrupted_witness() {
    let dir = scratch("fault");
    std::fs::write(dir.join("I.witness"), shipped("I.witness")).unwrap();
    let f = shipped("F.witness");
    assert!(f.contains("4*sqrt(P(1,1,0))"));
    std::fs::write(dir.join("F.witness"), f.replace("4*sqrt(P(1,1,0))", "3*sqrt(P(1,1,0))")).unwrap();
    let out = ucw(&["reproduce-all", "--skip", "certify,local,random", "--witness", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(row(&text, "F(pi/8, v=1)").contains("FAIL"), "{text}");
    assert!(row(&text, "I(pi/8, v=1)").contains("PASS"), "{text}");
}

#[test]
fn unknown_witness_is_an_error() {
    let out = ucw(&["certify", "--witness", "sqrt(("]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}
