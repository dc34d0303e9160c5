use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_orbivertex"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = bin().args(args).env_remove("ORBIVERTEX_THREADS").output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn vertex_dt_vacuum() {
    let (code, out, _) = run(&["vertex", "dt", "--n", "1", "--legs", ";;", "--degree", "4"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "1 + q_0 + 3*q_0^2 + 6*q_0^3 + 13*q_0^4 + O(deg 5)");
}

#[test]
fn vertex_json_schema() {
    let (code, out, _) = run(&["--format", "json", "vertex", "pt", "--n", "2", "--legs", "1;;", "--degree", "2", "--method", "enum"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["vars"], serde_json::json!(["q_0", "q_1"]));
    assert_eq!(v["trunc"], 2);
    let terms = v["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 3);
    assert_eq!(terms[0]["c"], "1");
}

#[test]
fn checks_pass_and_fail() {
    assert_eq!(run(&["check", "vacuum", "--n", "2", "--degree", "5"]).0, 0);
    let (code, out, _) = run(&["check", "correspondence", "--n", "2", "--legs", "1;1;1,1", "--degree", "4"]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = run(&["check", "recurrence", "--which", "2", "--n", "2", "--legs", "1;;1,1", "--degree", "3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("2/2 passed"));
    let (code, out, _) = run(&["check", "recurrence", "--n", "1", "--degree", "3", "--count", "6", "--seed", "5"]);
    assert_eq!(code, 0, "{out}");
    let (code, out, _) = run(&["check", "partition-lemmas", "--max-size", "8"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn triangulate_reports_consistency() {
    let (code, out, _) = run(&["--format", "json", "vertex", "pt", "--n", "1", "--legs", "1;1;1", "--degree", "3"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["consistent"], true);
    assert_eq!(v["closed_checked"], true);
}

#[test]
fn usage_errors() {
    let (code, _, err) = run(&["vertex", "dt", "--n", "1", "--legs", "x;;", "--degree", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("bad part"), "{err}");
    assert_eq!(run(&["frobnicate"]).0, 2);
    let (code, _, err) = run(&["glue", "--diagram", data("bad_cy.json").to_str().unwrap(), "--curve-degree", "1", "--box-degree", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("invalid web diagram"), "{err}");
}

#[test]
fn glue_from_file() {
    let path = data("conifold.json");
    let (code, out, _) = run(&["--format", "json", "glue", "--diagram", path.to_str().unwrap(), "--curve-degree", "1", "--box-degree", "3"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    let strata = v["strata"].as_array().unwrap();
    assert_eq!(strata.len(), 2);
    assert_eq!(strata[1]["curve"]["v_e_0"], 1);
    // v·(q − 2q² + 3q³)
    let coeffs: Vec<&str> = strata[1]["series"]["terms"].as_array().unwrap().iter().map(|t| t["c"].as_str().unwrap()).collect();
    assert_eq!(coeffs, ["1", "-2", "3"]);
}

#[test]
fn output_independent_of_threads() {
    let args = ["--format", "json", "check", "symmetry", "--n", "2", "--degree", "3", "--count", "4", "--seed", "3"];
    let one = bin().args(args).env("ORBIVERTEX_THREADS", "1").output().unwrap();
    let four = bin().args(args).env("ORBIVERTEX_THREADS", "4").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    let path = data("z2_chain.json");
    let g = ["glue", "--diagram", path.to_str().unwrap(), "--curve-degree", "2", "--box-degree", "2"];
    let a = bin().args(g).arg("--threads").arg("1").output().unwrap();
    let b = bin().args(g).arg("--threads").arg("3").output().unwrap();
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
}
