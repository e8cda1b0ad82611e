use std::process::{Command, Output};

use serde_json::Value;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_influence-lab"))
        .args(args)
        .env_remove("INFLUENCE_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = cli(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn code(args: &[&str]) -> i32 {
    cli(args).status.code().expect("exit code")
}

#[test]
fn analyze_majority() {
    let v = json(&["analyze", "--expr", "maj(x0,x1,x2)"]);
    assert_eq!(v["input"]["n"], 3);
    assert_eq!(v["measures"]["rho"]["num"], 1);
    assert_eq!(v["measures"]["rho"]["den"], 2);
    assert_eq!(v["measures"]["avg_sensitivity"]["num"], 3);
    assert_eq!(v["measures"]["max_sensitivity"], 2);
    assert_eq!(v["measures"]["block_sensitivity"]["value"], 2);
}

#[test]
fn analyze_parity_bound() {
    let v = json(&["analyze", "--expr", "parity(8)", "--eps", "0"]);
    assert_eq!(v["bounds"]["t_main"]["value"].as_f64(), Some(4.0));
}

#[test]
fn analyze_is_deterministic_across_thread_counts() {
    let args = ["analyze", "--expr", "iterate(paper_f, 1) ^ x4 & x5", "--approx-degree"];
    let base = cli(&args).stdout;
    for threads in ["1", "4"] {
        let out = Command::new(env!("CARGO_BIN_EXE_influence-lab"))
            .args(args)
            .env("INFLUENCE_LAB_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.stdout, base, "threads = {threads}");
    }
}

#[test]
fn table_file_matches_expression() {
    let dir = std::env::temp_dir().join(format!("influence-lab-test-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("maj.json");
    let t = influence_core::dsl::compile("maj(x0,x1,x2)").unwrap();
    std::fs::write(&path, t.to_json()).unwrap();
    let from_table = json(&["analyze", "--table", path.to_str().unwrap()]);
    let from_expr = json(&["analyze", "--expr", "maj(x0,x1,x2)"]);
    assert_eq!(from_table["measures"], from_expr["measures"]);
    assert_eq!(from_table["bounds"], from_expr["bounds"]);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn text_format() {
    let out = cli(&["analyze", "--expr", "x0 & x1", "--format", "text"]);
    assert!(out.status.success());
    assert!(!out.stdout.is_empty());
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["analyze", "--expr", "x0 &"]), 2);
    assert_eq!(code(&["analyze"]), 2);
    assert_eq!(code(&["analyze", "--expr", "x0", "--eps", "1.5"]), 2);
    assert_eq!(code(&["analyze", "--table", "/nonexistent/table.json"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
    assert_eq!(code(&["approx-degree", "--expr", "parity(13)"]), 3);
    assert_eq!(code(&["simulate", "--algorithm", "serial", "--expr", "parity(7)"]), 3);
    assert_eq!(code(&["simulate", "--algorithm", "parity"]), 2);
}

#[test]
fn approx_degree_reports() {
    let parity = json(&["approx-degree", "--expr", "parity(4)"]);
    assert_eq!(parity["degree"], 4);
    assert_eq!(parity["exact_degree"], 4);
    let or2 = json(&["approx-degree", "--expr", "x0 | x1", "--eps", "0"]);
    assert_eq!(or2["degree"], 2);
    let scan = json(&["approx-degree", "--expr", "maj(x0,x1,x2)", "--max-degree", "3"]);
    assert_eq!(scan["degree"], 1);
}

#[test]
fn simulate_parity_is_tight() {
    let v = json(&["simulate", "--algorithm", "parity", "--n", "4"]);
    assert_eq!(v["queries"], 2);
    assert!(v["worst_eps"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["query_bounds"]["tight"], true);
    assert_eq!(v["query_bounds"]["satisfied"], true);
}

#[test]
fn simulate_serial_and_grover() {
    let serial = json(&["simulate", "--algorithm", "serial", "--expr", "maj(x0,x1,x2)"]);
    assert_eq!(serial["queries"], 3);
    assert!(serial["worst_eps"].as_f64().unwrap() <= 1e-9);
    assert_eq!(serial["query_bounds"]["satisfied"], true);
    let g = json(&["simulate", "--algorithm", "grover", "--n", "4", "--iterations", "1"]);
    assert!((g["single_marked_success"].as_f64().unwrap() - 1.0).abs() <= 1e-9);
}

#[test]
fn verify_passes_and_reports_faults() {
    let ok = cli(&["verify", "--suite", "all", "--n-max", "5", "--samples", "3"]);
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stdout));
    let bad = cli(&["verify", "--suite", "fourier", "--inject-fault"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stdout).contains("FAIL"));
}
