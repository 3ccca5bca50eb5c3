use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn sample(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("samples").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drinfeld"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

fn write_doc(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn analyze_two_pole_lattice() {
    let doc = sample("f3-tau-squared-two-poles.toml");
    let v = run_json(&["analyze", "--input", path(&doc)]);
    assert_eq!(v["S"], serde_json::json!([1, 2]));
    assert_eq!(v["conductor"], 2);
    assert_eq!(v["open"], true);
    assert_eq!(v["rank_r"], 2);
    assert_eq!(v["image_rank"], 2);
    assert_eq!(v["bounds"]["j_set"], serde_json::json!([1]));
    assert_eq!(v["bounds"]["first_inequality_strict"], true);
    assert_eq!(v["bounds"]["openness_criterion_met"], false);
}

#[test]
fn analyze_samples_pass_verification() {
    for name in [
        "f3-tau-squared-two-poles.toml",
        "f4-tau-conjugate-poles.json",
        "f9-tau-mixed-poles.toml",
        "f2-pi-plus-tau-simple-pole.toml",
    ] {
        let v = run_json(&["analyze", "--verify", "--input", path(&sample(name))]);
        let checks = v["checks"].as_object().unwrap();
        assert!(!checks.is_empty());
        assert!(checks.values().all(|c| c == true), "{name}: {checks:?}");
    }
}

#[test]
fn conjugate_poles_are_not_open() {
    let v = run_json(&["analyze", "--input", path(&sample("f4-tau-conjugate-poles.json"))]);
    assert_eq!(v["rank_r"], 1);
    assert_eq!(v["declared_rank"], 2);
    assert_eq!(v["open"], false);
    assert_eq!(v["image_rank"], 2);
    assert_eq!(v["S"], serde_json::json!([1]));
}

#[test]
fn lift_of_reduction_is_one() {
    let doc = sample("f2-tau-equals-reduction.json");
    for depth in ["0", "3", "7"] {
        let v = run_json(&["lift", "--depth", depth, "--input", path(&doc)]);
        assert_eq!(v["x"], serde_json::json!({"0": "1"}));
    }
}

#[test]
fn lift_checks_pass() {
    let doc = sample("f2-pi-plus-tau-simple-pole.toml");
    let v = run_json(&["lift", "--verify", "--depth", "4", "--prec", "12", "--input", path(&doc)]);
    assert!(v["checks"].as_object().unwrap().values().all(|c| c == true));
    assert_eq!(v["deviation_valuation"], "1");
}

#[test]
fn reducible_modulus_exits_one() {
    let out = run(&["validate", "--input", path(&sample("f2-reducible-modulus.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("reducible"));
}

#[test]
fn malformed_document_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write_doc(&dir, "bad.json", r#"{"field": {"p": 2}}"#);
    assert_eq!(run(&["validate", "--input", path(&doc)]).status.code(), Some(1));
    assert_eq!(run(&["validate"]).status.code(), Some(1));
    assert_eq!(run(&["analyze", "--depth", "deep"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn overdeclared_rank_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write_doc(
        &dir,
        "over.toml",
        r#"
        [field]
        p = 2
        g = [0, 1]
        [module]
        psi_t = [0, 1]
        [lattice]
        generators = [{ terms = [[-1, 1]] }]
        declared_rank = 1
        "#,
    );
    assert!(run(&["analyze", "--input", path(&doc)]).status.success());
    let text = std::fs::read_to_string(&doc).unwrap().replace("declared_rank = 1", "declared_rank = 3");
    let doc = write_doc(&dir, "over3.toml", &text);
    assert_eq!(run(&["analyze", "--input", path(&doc)]).status.code(), Some(2));
}

#[test]
fn shallow_depth_exits_three() {
    let doc = sample("f2-pi-plus-tau-simple-pole.toml");
    let out = run(&["chi-inv", "--depth", "0", "--input", path(&doc)]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["analyze", "--depth", "0", "--input", path(&doc)]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reports_are_byte_identical() {
    for (cmd, name) in [
        ("analyze", "f9-tau-mixed-poles.toml"),
        ("uniformize", "f2-pi-plus-tau-simple-pole.toml"),
        ("chi-inv", "f2-pi-plus-tau-simple-pole.toml"),
    ] {
        let doc = sample(name);
        let a = run(&[cmd, "--verify", "--input", path(&doc)]);
        let b = run(&[cmd, "--verify", "--input", path(&doc)]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn toml_and_json_agree() {
    let dir = tempfile::tempdir().unwrap();
    let toml = write_doc(
        &dir,
        "conj.toml",
        r#"
        [field]
        p = 2
        g = [1, 1, 1]
        [module]
        psi_t = [0, 1]
        [lattice]
        generators = [{ terms = [[-1, [1, 0]]] }, { terms = [[-1, 2]] }]
        declared_rank = 2
        "#,
    );
    let a = run_json(&["analyze", "--input", path(&toml)]);
    let b = run_json(&["analyze", "--input", path(&sample("f4-tau-conjugate-poles.json"))]);
    assert_eq!(a, b);
}

#[test]
fn json_flag_writes_file_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "analyze",
        "--input",
        path(&sample("f3-tau-squared-two-poles.toml")),
        "--json",
        path(&out_path),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("conductor = 2"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["conductor"], 2);
}

#[test]
fn uniformize_simple_pole() {
    let doc = sample("f2-pi-plus-tau-simple-pole.toml");
    let v = run_json(&["uniformize", "--verify", "--input", path(&doc)]);
    assert!(v["checks"].as_object().unwrap().values().all(|c| c == true));
    assert_eq!(v["dimension"], 2);
    assert_eq!(v["points"].as_array().unwrap().len(), 4);
    assert_eq!(v["residual_valuation"], "37");
    assert_eq!(v["residual_is_bound"], false);
    assert_eq!(v["phi_t"]["0"], "π");
    let small = run_json(&["uniformize", "--bound", "1", "--input", path(&doc)]);
    assert_eq!(small["residual_valuation"], "5");
}

#[test]
fn uniformize_without_lattice_returns_psi() {
    let doc = sample("f2-tau-equals-reduction.json");
    let v = run_json(&["uniformize", "--input", path(&doc)]);
    assert_eq!(v["phi_t"], serde_json::json!({"1": "1"}));
    assert_eq!(v["residual_valuation"], Value::Null);
    assert_eq!(v["dimension"], 0);
}

#[test]
fn tate_ranks() {
    let dir = tempfile::tempdir().unwrap();
    let doc = write_doc(
        &dir,
        "ss.json",
        r#"{"field": {"p": 3, "g": [0, 1]}, "module": {"psi_t": [0, 0, 1]}}"#,
    );
    let v = run_json(&["tate-ranks", "--input", path(&doc)]);
    assert_eq!(v["rank_at_pres"], 0);
    assert_eq!(v["rank_elsewhere"], 2);
    let v = run_json(&["tate-ranks", "--input", path(&sample("f2-pi-plus-tau-simple-pole.toml"))]);
    assert_eq!(v["rank_at_pres"], 1);
    assert_eq!(v["rank_elsewhere"], 2);
}

#[test]
fn validate_reports_reduction() {
    let v = run_json(&["validate", "--input", path(&sample("f2-pi-plus-tau-simple-pole.toml"))]);
    assert_eq!(v["rank"], 1);
    assert_eq!(v["height"], 1);
    assert_eq!(v["w"], "1");
    assert_eq!(v["exact_reduction"], false);
}
