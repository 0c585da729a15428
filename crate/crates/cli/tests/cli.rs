//! End-to-end runs of the `necklace` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_necklace")).args(args).env_remove("NECKLACE_DATA").output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("utf-8 output")
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&run_ok(args)).expect("valid JSON")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

#[test]
fn count_totals() {
    for (p, ell, total) in [("5", "7", 8), ("11", "47", 60), ("7", "5", 6)] {
        let v = json(&["count", "--p", p, "--ell", ell, "--format", "json"]);
        assert_eq!(v["total"], total);
        let fibers: u64 = v["fibers"].as_array().unwrap().iter().map(|f| f["size"].as_u64().unwrap()).sum();
        assert_eq!(fibers, total);
    }
}

#[test]
fn count_matrix_csv() {
    let out = run_ok(&["count", "--p", "5", "--format", "csv"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "p,5,7,11,13,17,19,23,29,31,37,41,43,47");
    assert_eq!(lines[1], "5,,8,12,14,18,20,24,30,32,38,42,44,48");
}

#[test]
fn necklaces_on_a_curve_over_f13() {
    assert_eq!(json(&["necklaces", "--curve", "p=13,a4=1,a6=4", "--p", "7"]).as_array().unwrap().len(), 3);
    assert_eq!(json(&["necklaces", "--curve", "p=13,a4=1,a6=4", "--p", "5"]).as_array().unwrap().len(), 4);
}

#[test]
fn json_is_deterministic() {
    let args = ["necklaces", "--curve", "p=13,a4=1,a6=4", "--p", "7", "--seed", "3"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let args = ["cmreduce", "--D", "-7", "--p", "5", "--ell", "13"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn cm_reduction_json() {
    let v = json(&["cmreduce", "--D", "-7", "--p", "5", "--ell", "13"]);
    assert_eq!(v["D"], -7);
    assert_eq!(v["j_mod_ell"], 5);
    assert_eq!(v["pearls"].as_array().unwrap().len(), 6);
    let v = json(&["cmreduce", "--D", "-3", "--p", "5", "--ell", "11"]);
    assert_eq!(v["endomorphism_degree"], 1);
    assert_eq!(v["j_mod_ell"], 0);
}

#[test]
fn invalid_parameters_exit_2() {
    assert_eq!(run(&["cmreduce", "--D", "-4", "--p", "5", "--ell", "7"]).status.code(), Some(2));
    assert_eq!(run(&["scan", "--p", "5", "--ell", "2,3"]).status.code(), Some(2));
    assert_eq!(run(&["count", "--p", "5", "--ell", "5"]).status.code(), Some(2));
    assert_eq!(run(&["necklaces", "--curve", "p=13,a4=1,a6=4", "--p", "5", "--gamma", "0,1"]).status.code(), Some(2));
}

#[test]
fn scan_single_level() {
    assert_eq!(json(&["scan", "--p", "13", "--format", "json"]), Value::Array(vec![]));
}

#[test]
fn scan_is_invariant_under_gamma() {
    let pairs = |g: &str| -> Vec<(Value, Value)> {
        json(&["scan", "--p", "5", "--ell", "13", "--gamma", g, "--format", "json"])
            .as_array()
            .unwrap()
            .iter()
            .map(|r| (r["j"].clone(), r["pair"].clone()))
            .collect()
    };
    let a = pairs("1,2");
    assert_eq!(a.len(), 2);
    assert_eq!(a, pairs("2,3"));
}

#[test]
fn modular_polynomial_cross_check() {
    let curve = ["necklaces", "--curve", "p=101,a4=3,a6=7", "--p", "3", "--modpoly"];
    let with = |f: &str| run(&[&curve[..], &[data(f).as_str()]].concat());
    assert!(with("phi_j_3.txt").status.success());
    assert_eq!(with("phi_j_3_wrong.txt").status.code(), Some(2));
    assert_eq!(with("phi_j_3_truncated.txt").status.code(), Some(3));
    assert_eq!(with("missing.txt").status.code(), Some(3));
}

#[test]
fn malformed_cm_table_exit_3() {
    let dir = std::env::temp_dir().join(format!("necklace-data-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    std::fs::write(dir.join("cm_curves.csv"), "D,Delta_F,f,j,a4,a6\n-7,-7,1,oops,1,1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_necklace"))
        .args(["cmreduce", "--D", "-7", "--p", "5", "--ell", "13"])
        .env("NECKLACE_DATA", &dir)
        .output()
        .unwrap();
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn diagrams() {
    let svg = run_ok(&["render", "--curve", "p=13,a4=1,a6=4", "--p", "7", "--index", "1"]);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    let dot = run_ok(&["render", "--D", "-28", "--p", "5", "--ell", "13", "--format", "text"]);
    assert!(dot.contains("graph") || dot.contains("digraph"));
    assert_eq!(run(&["render", "--curve", "p=13,a4=1,a6=4", "--p", "7", "--index", "9"]).status.code(), Some(2));
}
