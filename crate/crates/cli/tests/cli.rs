use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const FULL2: &str = "height 2\n-\n0\n1\n00\n01\n10\n11\n";
const TRIANGLE: &str = "c triangle\np graph 3 3\ne 1 2\ne 2 3\ne 1 3\n";
const OR_CNF: &str = "p cnf 2 1\n1 2 0\n";
const UNSAT_CNF: &str = "p cnf 2 4\n1 2 0\n-1 2 0\n1 -2 0\n-1 -2 0\n";

fn totp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_totp")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn estimate_full_binary_fixture() {
    let dir = TempDir::new().unwrap();
    let t = file(&dir, "t.tree", FULL2);
    let v = json(&totp(&["estimate", "--problem", "tree", "--input", s(&t), "--xi", "0.05", "--delta", "0.1", "--seed", "7"]));
    for key in ["estimate", "fraction", "error_radius", "steps"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert!((v["estimate"].as_f64().unwrap() - 7.0).abs() <= 0.2);
    assert_eq!(v["params"]["seed"], 7);
}

#[test]
fn missing_input_is_a_usage_error() {
    let out = totp(&["estimate", "--problem", "dnf", "--xi", "0.05", "--delta", "0.1", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(2));
    let out = totp(&["estimate", "--problem", "dnf", "--input", "/nonexistent/phi.dnf", "--xi", "0.05", "--delta", "0.1", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_files_and_parameters_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = file(&dir, "bad.dnf", "p dnf 2 1\n1 -1 0\n");
    let out = totp(&["estimate", "--problem", "dnf", "--input", s(&bad), "--xi", "0.05", "--delta", "0.1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    let t = file(&dir, "t.tree", FULL2);
    let out = totp(&["estimate", "--problem", "tree", "--input", s(&t), "--xi", "2", "--delta", "0.1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn guard_violations_exit_3() {
    let dir = TempDir::new().unwrap();
    let tall = file(&dir, "tall.tree", "height 600\n-\n");
    let out = totp(&["estimate", "--problem", "tree", "--input", s(&tall), "--xi", "0.1", "--delta", "0.1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn exact_threshold() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "tri.graph", TRIANGLE);
    let v = json(&totp(&["exact", "--problem", "is", "--input", s(&g), "--threshold", "5"]));
    assert_eq!((v["outcome"].as_str(), v["value"].as_u64()), (Some("exact"), Some(3)));
    let v = json(&totp(&["exact", "--problem", "is", "--input", s(&g), "--threshold", "2"]));
    assert_eq!(v["outcome"], "exceeds");
    let empty = file(&dir, "empty.dnf", "p dnf 3 0\n");
    let v = json(&totp(&["exact", "--problem", "dnf", "--input", s(&empty), "--threshold", "0"]));
    assert_eq!((v["outcome"].as_str(), v["value"].as_u64()), (Some("exact"), Some(0)));
}

#[test]
fn ras_branches_and_bad_k() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "tri.graph", TRIANGLE);
    let v = json(&totp(&["ras", "--problem", "is", "--input", s(&g), "--k", "2", "--beta", "0.5", "--delta", "0.1", "--seed", "1"]));
    assert_eq!(v["exact_branch"], true);
    assert_eq!(v["estimate"], 3.0);
    let out = totp(&["ras", "--problem", "is", "--input", s(&g), "--k", "0.5", "--beta", "0.5", "--delta", "0.1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn capp_and_gapcsat() {
    let dir = TempDir::new().unwrap();
    let or = file(&dir, "or.cnf", OR_CNF);
    let v = json(&totp(&["capp", "--problem", "cnf", "--input", s(&or), "--epsilon", "0.1", "--delta", "0.1", "--seed", "3"]));
    let p = v["p_hat"].as_f64().unwrap();
    assert!((0.65..=0.85).contains(&p), "{p}");
    assert_eq!(v["route"], "complement");

    let unsat = file(&dir, "unsat.cnf", UNSAT_CNF);
    let v = json(&totp(&["gapcsat", "--problem", "cnf", "--input", s(&unsat), "--rho", "0.5", "--delta", "0.01", "--seed", "3"]));
    assert_eq!(v["verdict"], "Unsatisfiable");

    let not = file(&dir, "not.circ", "input 1\ngate 2 NOT 1\noutput 2\n");
    let out = totp(&["capp", "--problem", "circuit", "--input", s(&not), "--delta", "0.1", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported"));
    let out = totp(&["capp", "--problem", "mono", "--input", s(&not), "--delta", "0.1", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn same_seed_same_record() {
    let dir = TempDir::new().unwrap();
    let g = file(&dir, "tri.graph", TRIANGLE);
    let args = ["estimate", "--problem", "is", "--input", s(&g), "--xi", "0.05", "--delta", "0.1", "--seed", "11"];
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("wall_time_secs");
        v
    };
    let a = strip(json(&totp(&args)));
    let b = strip(json(&totp(&args)));
    assert_eq!(a, b);
    let mut one = args.to_vec();
    one.extend(["--workers", "1"]);
    let mut c = strip(json(&totp(&one)));
    c["params"].as_object_mut().unwrap().remove("workers");
    assert_eq!(a, c);
}

#[test]
fn bench_manifests() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out.jsonl");
    let empty = file(&dir, "empty.json", r#"{"runs": []}"#);
    assert!(totp(&["bench", "--suite", s(&empty), "--out", s(&out)]).status.success());
    assert_eq!(std::fs::read(&out).unwrap().len(), 0);

    let bad = file(&dir, "bad.json", r#"{"runs": [{"command": "estimate"}"#);
    assert_eq!(totp(&["bench", "--suite", s(&bad), "--out", s(&out)]).status.code(), Some(2));
    let both = file(&dir, "both.json", r#"{"runs": [{"command": "estimate", "xi": [0.1], "delta": 0.1, "seeds": [1]}]}"#);
    assert_eq!(totp(&["bench", "--suite", s(&both), "--out", s(&out)]).status.code(), Some(2));

    file(&dir, "or.cnf", OR_CNF);
    let capp = file(
        &dir,
        "capp.json",
        r#"{"runs": [{"command": "capp", "problem": "cnf", "input": "or.cnf", "epsilon": [0.2, 0.1], "delta": 0.1, "seeds": [1, 2]}]}"#,
    );
    assert!(totp(&["bench", "--suite", s(&capp), "--out", s(&out)]).status.success());
    let lines: Vec<Value> = std::fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l["truth"] == 0.75));
}

#[test]
fn bench_random_tree_coverage() {
    let dir = TempDir::new().unwrap();
    let suite = file(
        &dir,
        "trees.json",
        r#"{"runs": [{"command": "estimate",
                     "random_trees": {"count": 100, "max_height": 10, "max_nodes": 300, "seed": 17},
                     "xi": [0.1], "delta": 0.1, "seeds": [5]}]}"#,
    );
    let out = dir.path().join("out.jsonl");
    assert!(totp(&["bench", "--suite", s(&suite), "--out", s(&out)]).status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let covered: Vec<bool> = text
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap()["covered"].as_bool().unwrap())
        .collect();
    assert_eq!(covered.len(), 100);
    let rate = covered.iter().filter(|&&c| c).count() as f64 / 100.0;
    assert!(rate >= 1.0 - 0.1 - 0.05, "{rate}");
}
