use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::Command;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn gtd(args: &[&str]) -> (i32, Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_gtd"))
        .args(args)
        .current_dir(fixture(""))
        .output()
        .expect("binary runs");
    let text = String::from_utf8(out.stdout).unwrap();
    let v = serde_json::from_str(text.trim()).unwrap_or(Value::Null);
    (out.status.code().unwrap(), v)
}

#[test]
fn length_example() {
    let (code, v) = gtd(&["length", "bs23.json", "t a t a^-1"]);
    assert_eq!(code, 0);
    assert_eq!(v, json!({"classification": "hyperbolic", "length": "2"}));
    let (_, v) = gtd(&["length", "bs23.json", "t a^2 t^-1"]);
    assert_eq!(v, json!({"classification": "elliptic", "length": "0"}));
}

#[test]
fn simplex_example() {
    let (code, v) = gtd(&["simplex", "theta.json"]);
    assert_eq!(code, 0);
    assert_eq!(v, json!({"barycentric": ["1/4", "1/4", "1/2"], "volume": "4"}));
}

#[test]
fn zero_index_is_a_domain_error() {
    let (code, v) = gtd(&["validate", "broken.json"]);
    assert_eq!(code, 1);
    assert_eq!(v, json!({"error": "ZeroIndex", "edge": "t"}));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(gtd(&["validate", "missing.json"]).0, 2);
    assert_eq!(gtd(&["frobnicate"]).0, 2);
    assert_eq!(gtd(&["ball", "rose.json", "-r", "one"]).0, 2);
    assert_eq!(gtd(&["length", "bs23.json", "q"]).0, 2);
}

#[test]
fn reduced_and_collapse() {
    let (_, v) = gtd(&["reduced", "theta.json"]);
    assert_eq!(v, json!({"reduced": false, "collapsible": "e0"}));
    let (code, v) = gtd(&["collapse", "theta.json", "-e", "e0"]);
    assert_eq!(code, 0);
    assert_eq!(v["move"]["before_volume"], "4");
    assert_eq!(v["move"]["after_volume"], "3");
    let (code, v) = gtd(&["collapse", "rose.json", "-e", "x"]);
    assert_eq!(code, 1);
    assert!(v["error"].is_string());
}

#[test]
fn expansion_needs_migration() {
    let (code, v) = gtd(&["expand", "rose.json", "-v", "v", "--spec", "expand.json"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"], "NonMinimal");
}

#[test]
fn emitted_trees_reparse() {
    let (_, v) = gtd(&["collapse", "theta.json", "-e", "e0"]);
    let dir = std::env::temp_dir().join("gtd-cli-reparse");
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("collapsed.json");
    std::fs::write(&file, v["tree"].to_string()).unwrap();
    let (code, again) = gtd(&["simplex", file.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(again["volume"], "3");
}

#[test]
fn ball_sizes() {
    let (_, v) = gtd(&["ball", "bs23.json", "-r", "1"]);
    assert_eq!(v["vertex_count"], 6);
    let (code, v) = gtd(&["ball", "rose.json", "-r", "40", "--cap", "50"]);
    assert_eq!(code, 1);
    assert_eq!(v, json!({"error": "BallTooLarge", "cap": 50}));
}

#[test]
fn cap_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_gtd"))
        .args(["ball", "rose.json", "-r", "40"])
        .current_dir(fixture(""))
        .env("GTD_CAP", "20")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"cap\":20"));
}

#[test]
fn basepoint_of_bs23() {
    let (code, v) = gtd(&["basepoint", "bs23.json", "-S", "a,t"]);
    assert_eq!(code, 0);
    assert_eq!(v["l_S"], "1");
    assert_eq!(v["basepoint"], json!({"vertex": "1"}));
}

#[test]
fn worked_fold() {
    let (code, v) = gtd(&["fold", "worked.json", "-t", "1/2", "--emit", "tree"]);
    assert_eq!(code, 0);
    let mut lengths: Vec<String> = v["edges"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["length"].as_str().unwrap().to_string())
        .collect();
    lengths.sort();
    assert_eq!(lengths, ["1/2", "1/2", "3/2"]);
    let (_, v) = gtd(&["fold", "worked.json", "-t", "0,1"]);
    assert_eq!(v["fold_depth"], "1");
    assert_eq!(v["steps"].as_array().unwrap().len(), 2);
    assert_eq!(gtd(&["fold", "worked.json", "-t", "2"]).0, 1);
}

#[test]
fn approximation_round_trip() {
    let (code, v) = gtd(&["approx", "check", "relation.json"]);
    assert_eq!((code, v["ok"].clone()), (0, json!(true)));
    let (code, t) = gtd(&["approx", "thicken", "relation.json", "-d", "1/2"]);
    assert_eq!(code, 0);
    assert_eq!(t["epsilon"], "11/10");
    let file = fixture("thickened.tmp.json");
    std::fs::write(&file, t.to_string()).unwrap();
    let (code, v) = gtd(&["approx", "check", "thickened.tmp.json"]);
    std::fs::remove_file(&file).unwrap();
    assert_eq!((code, v["ok"].clone()), (0, json!(true)));
}

#[test]
fn section_and_gate() {
    let (code, v) = gtd(&["section", "--base", "rose.json", "--target", "rose23.json"]);
    assert_eq!(code, 0);
    let lengths: Vec<&str> = v["remetrized"]["edges"].as_array().unwrap().iter().map(|e| e["length"].as_str().unwrap()).collect();
    assert_eq!(lengths, ["2", "3"]);
    let (code, v) = gtd(&["section", "--base", "theta.json", "--target", "rose.json"]);
    assert_eq!(code, 1);
    assert_eq!(v["error"], "BaseNotReduced");
}

#[test]
fn contract_artifacts() {
    let dir = std::env::temp_dir().join("gtd-cli-contract");
    let _ = std::fs::remove_dir_all(&dir);
    let csv = dir.join("path.csv");
    let dot = dir.join("dot");
    let (code, v) = gtd(&[
        "contract", "--base", "rose.json", "--target", "rose23.json", "--times", "0,1/2,1",
        "--emit-csv", csv.to_str().unwrap(), "--emit-dot", dot.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["steps"].as_array().unwrap().len(), 3);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("t,volume,"));
    assert!(dot.join("step_2.dot").exists());
}

#[test]
fn reports_are_deterministic() {
    let args = ["contract", "--base", "rose.json", "--target", "rose23.json"];
    assert_eq!(gtd(&args), gtd(&args));
}
