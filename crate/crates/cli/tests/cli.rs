use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cliquetile")).args(args).output().expect("binary runs")
}

fn run_to(args: &[&str], out: &Path) -> i32 {
    let mut all = args.to_vec();
    all.extend(["--output", out.to_str().unwrap()]);
    run(&all).status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_solve_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let sol = dir.path().join("sol.json");
    assert_eq!(run_to(&["gen", "--kind", "random", "--r", "4", "--n", "6", "--k", "3", "--seed", "3"], &g), 0);
    assert_eq!(run_to(&["solve", "--input", s(&g), "--k", "3"], &sol), 0);
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&sol).unwrap()).unwrap();
    assert_eq!(doc["status"], "packed");
    assert_eq!(doc["packing"]["cliques"].as_array().unwrap().len(), 8);
    let out = run(&["verify", "--input", s(&g), "--packing", s(&sol)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok"));
}

#[test]
fn extremal_graph_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    assert_eq!(run_to(&["gen", "--kind", "gamma", "--r", "3", "--n", "3", "--k", "3"], &g), 0);
    let out = run(&["solve", "--input", s(&g), "--k", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["status"], "extremal");
    assert!(doc["packing"].is_null());
}

#[test]
fn verify_reports_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    let p = dir.path().join("p.json");
    assert_eq!(run_to(&["gen", "--kind", "gamma", "--r", "4", "--n", "3", "--k", "3"], &g), 0);
    // Same-class pair and a coverage gap.
    std::fs::write(&p, r#"{"cliques": [[[0, 0], [0, 1], [1, 0]]]}"#).unwrap();
    let out = run(&["verify", "--input", s(&g), "--packing", s(&p), "--k", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.contains("class 0 twice") && text.contains("0:2 is not covered"), "{text}");
    assert!(text.lines().count() >= 2, "{text}");
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(run(&["solve"]).status.code(), Some(1));
    assert_eq!(run(&["gen", "--kind", "random", "--density", "x"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let missing = run(&["solve", "--input", "/nonexistent/g.json", "--k", "3"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(!missing.stderr.is_empty());
}

#[test]
fn detect_flags_a_space_barrier() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    assert_eq!(run_to(&["gen", "--kind", "barrier", "--barrier", "space", "--r", "3", "--n", "2", "--k", "2"], &g), 0);
    let out = run(&["detect", "--input", s(&g), "--k", "2", "--mode", "exact"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!doc["barriers"]["space"].as_array().unwrap().is_empty());
}

#[test]
fn harness_finds_no_counterexample() {
    let out = run(&["harness", "--r", "2", "--k", "2", "--n", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["counterexamples"].as_array().unwrap().is_empty());
}

#[test]
fn detect_finds_the_two_halves_of_gamma() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    assert_eq!(run_to(&["gen", "--kind", "gamma", "--r", "3", "--n", "4", "--k", "2"], &g), 0);
    let out = run(&["detect", "--input", s(&g), "--k", "2", "--mode", "exact"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!doc["barriers"]["pair_complete"].is_null());
}

#[test]
fn complete_graph_is_reported_splittable() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    assert_eq!(run_to(&["gen", "--kind", "random", "--r", "3", "--n", "4", "--k", "2", "--min-degree", "4"], &g), 0);
    let out = run(&["detect", "--input", s(&g), "--k", "2", "--mode", "exact"]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!doc["barriers"]["splittable"].is_null());
}

#[test]
fn generation_is_reproducible() {
    let a = run(&["gen", "--kind", "random", "--r", "3", "--n", "4", "--seed", "5"]);
    let b = run(&["gen", "--kind", "random", "--r", "3", "--n", "4", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn below_threshold_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.json");
    std::fs::write(&g, r#"{"r": 3, "class_sizes": [3, 3, 3], "edges": []}"#).unwrap();
    let out = run(&["solve", "--input", s(&g), "--k", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}
