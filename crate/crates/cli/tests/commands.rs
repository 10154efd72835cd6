//! The binary end to end: exit codes, JSON reports and emitted files.

use ccmu::{verify_relation, PointedModel, QuantifierSignature};
use serde_json::Value;
use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

const M0: &str = r#"{"alphabet": ["a", "b"], "states": ["s0"], "valuation": {"p": ["s0"]}, "root": "s0"}"#;

const M2: &str = r#"{
  "alphabet": ["a", "b"],
  "states": ["s", "t"],
  "transitions": [
    {"from": "s", "action": "a", "to": "t"},
    {"from": "t", "action": "b", "to": "t"}
  ],
  "valuation": {"p": ["t"]},
  "root": "s"
}"#;

fn ccmu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccmu")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8")
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

fn models() -> (tempfile::TempDir, String, String) {
    let dir = tempfile::tempdir().unwrap();
    let m0 = dir.path().join("m0.json");
    let m2 = dir.path().join("m2.json");
    std::fs::write(&m0, M0).unwrap();
    std::fs::write(&m2, M2).unwrap();
    let s = |p: &Path| p.to_str().unwrap().to_string();
    (dir, s(&m0), s(&m2))
}

#[test]
fn check_reports_all_three_verdicts() {
    let (_dir, m0, _) = models();
    let at = format!("{m0}#s0");
    let out = ccmu(&["check", "--model", &at, "--formula", "E{a;b} p"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "true");

    let out = ccmu(&["--json", "check", "--model", &m0, "--formula", "E{a;b} <b>true"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["status"], "false");

    // the nested fixpoint keeps the argument out of the eliminable fragment
    let hard = "E{a;b} nu q. (p & [a]q & <a>mu r. (p | <a>r))";
    let out = ccmu(&["--json", "check", "--model", &m0, "--formula", hard]);
    assert_eq!(code(&out), 2);
    let v = json(&out);
    assert_eq!(v["status"], "undetermined");
    assert_eq!(v["reason"], "NotDisjunctive");
    let out = ccmu(&["--json", "check", "--model", &m0, "--formula", hard, "--fallback-bound", "2"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn refinement_is_reflexive_and_the_relation_verifies() {
    let (dir, _, m2) = models();
    let rel = dir.path().join("rel.json");
    let out = ccmu(&[
        "--json",
        "refines",
        "--spec",
        &m2,
        "--impl",
        &m2,
        "--cov",
        "a",
        "--contra",
        "b",
        "--emit-relation",
        rel.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(json(&out)["status"], "true");

    let pairs: Vec<(String, String)> = serde_json::from_str(&std::fs::read_to_string(&rel).unwrap()).unwrap();
    assert!(pairs.contains(&("s".into(), "s".into())));
    let pm = PointedModel::from_json(M2, None).unwrap();
    let sig = QuantifierSignature::singleton("a", "b");
    let ok = verify_relation(pairs.iter().map(|(u, v)| (u.as_str(), v.as_str())), &pm.model, &pm.model, &BTreeSet::new(), &sig)
        .unwrap();
    assert!(ok);
}

#[test]
fn dropping_a_covariant_step_is_not_a_refinement() {
    let (_dir, m0, m2) = models();
    let out = ccmu(&["refines", "--spec", &m2, "--impl", &format!("{m0}#s0"), "--cov", "a", "--contra", "b"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn translate_and_dnf_print_formulas() {
    let out = ccmu(&["translate", "--formula", "E{a;b} <b>p"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "<b>p");

    let out = ccmu(&["--json", "translate", "--formula", "E{a;} p"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["status"], "undetermined");

    let out = ccmu(&["dnf", "--formula", "<a>p & [a]q"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "nabla_a {p & q, q}");
}

#[test]
fn emitted_witnesses_parse_and_satisfy_the_formula() {
    let (dir, m0, _) = models();
    let w = dir.path().join("w.json");
    let out = ccmu(&[
        "--json",
        "witness",
        "--model",
        &m0,
        "--cov",
        "a",
        "--contra",
        "b",
        "--formula",
        "<a>true",
        "--max-states",
        "2",
        "--emit",
        w.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["status"], "true");
    let text = std::fs::read_to_string(&w).unwrap();
    PointedModel::from_json(&text, None).unwrap();
    let wpath = w.to_str().unwrap();
    let out = ccmu(&["check", "--model", wpath, "--formula", "<a>true"]);
    assert_eq!(code(&out), 0);

    let out = ccmu(&["witness", "--model", &m0, "--cov", "a", "--contra", "b", "--formula", "<b>true", "--max-states", "2"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn tableau_marks_the_model_or_says_why_not() {
    let (_dir, m0, m2) = models();
    let out = ccmu(&["--json", "tableau", "--formula", "nabla_a {p}", "--model", &m2]);
    assert_eq!(code(&out), 0);
    assert!(json(&out)["marking"].is_array());
    let out = ccmu(&["tableau", "--formula", "nabla_a {p}", "--model", &m0]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("digraph"));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let out = ccmu(&["--json", "bogus"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["reason"], "usage");

    let out = ccmu(&["--json", "translate", "--formula", "E{a;b"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["reason"], "parse");

    let out = ccmu(&["--json", "check", "--model", "/nonexistent/m.json", "--formula", "p"]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["status"], "error");

    assert_eq!(code(&ccmu(&["--help"])), 0);
}

#[test]
fn quick_selftest_passes() {
    let out = ccmu(&["selftest", "--quick", "--only", "4,7,8,9"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert_eq!(stdout(&out).matches("[PASS]").count(), 4);
}
