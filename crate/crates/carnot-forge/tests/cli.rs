//! End-to-end tests for the `carnot-forge` binary: exit codes, JSON report
//! shape, and output determinism across the six subcommands.

use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carnot-forge"))
        .args(args)
        .output()
        .expect("failed to spawn carnot-forge")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process terminated by signal")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout was not valid JSON ({e}):\n{}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

#[test]
fn validate_accepts_symmetric_heisenberg() {
    let out = run(&["validate", &fixture("heisenberg_symmetric.json")]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["validation"]["valid"], Value::Bool(true));
    assert_eq!(v["validation"]["b0_invertible"], Value::Bool(true));
    assert_eq!(v["manifest"]["command"], Value::String("validate".into()));
}

#[test]
fn validate_rejects_singular_frame_with_exit_2() {
    let out = run(&["--quiet", "validate", &fixture("invalid_singular.json")]);
    assert_eq!(code(&out), 2);
    let v = stdout_json(&out);
    assert_eq!(v["validation"]["valid"], Value::Bool(false));
    assert_eq!(v["validation"]["b0_invertible"], Value::Bool(false));
    // --quiet must suppress the human-readable summary
    assert!(out.stderr.is_empty());
}

#[test]
fn decimal_coefficients_are_a_parse_error() {
    let out = run(&["validate", &fixture("decimal_coefficient.json")]);
    assert_eq!(code(&out), 1);
}

#[test]
fn missing_input_file_exits_1() {
    let out = run(&["validate", "/nonexistent/frame.json"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn privilege_repairs_a_nonprivileged_frame() {
    let out = run(&["privilege", &fixture("nonprivileged_123.json")]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["privileged_report"]["verdict"], Value::Bool(true));
    // d1 + x1*d3 needs a genuine polynomial change, not just a linear one:
    // some forward component must carry more than its own linear term
    let forward = v["psi_hat"]["forward"].as_array().expect("psi_hat.forward");
    assert!(forward
        .iter()
        .any(|p| p.as_array().map(|terms| terms.len() > 1) == Some(true)));
}

#[test]
fn approx_refuses_nonprivileged_without_auto() {
    let out = run(&["approx", &fixture("nonprivileged_123.json")]);
    assert_eq!(code(&out), 2);
    let v = stdout_json(&out);
    assert_eq!(v["privileged_report"]["verdict"], Value::Bool(false));
}

#[test]
fn approx_with_auto_builds_a_valid_group_law() {
    let out = run(&["approx", &fixture("nonprivileged_123.json"), "--auto"]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    for key in [
        "unit",
        "associativity",
        "dilation_automorphism",
        "inverse",
        "left_invariance",
    ] {
        assert_eq!(v["invariants"][key], Value::Bool(true), "invariant {key}");
    }
}

#[test]
fn approx_heisenberg_reports_expected_structure_constant() {
    let out = run(&["approx", &fixture("heisenberg_symmetric.json")]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let constants = v["structure_constants"].as_array().expect("constants");
    // [X1, X2] = X3 and its antisymmetric mirror are the only nonzero entries;
    // entries are [i, j, k, num, den] quintuples with 1-based indices
    assert_eq!(constants.len(), 2);
    assert!(constants
        .iter()
        .any(|c| c[0] == 1 && c[1] == 2 && c[2] == 3 && c[3] == "1" && c[4] == "1"));
}

#[test]
fn canonical_rate_tests_pass_on_heisenberg() {
    for kind in ["1", "2"] {
        let out = run(&[
            "canonical",
            &fixture("heisenberg_symmetric.json"),
            "--kind",
            kind,
            "--samples",
            "3",
        ]);
        assert_eq!(code(&out), 0, "kind {kind}");
        let v = stdout_json(&out);
        assert_eq!(v["rate_report"]["verdict"], Value::Bool(true), "kind {kind}");
        assert_eq!(v["rate_report"]["inconclusive"], Value::Bool(false));
    }
}

#[test]
fn canonical_refuses_nonprivileged_frame() {
    let out = run(&[
        "canonical",
        &fixture("nonprivileged_123.json"),
        "--samples",
        "2",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn heisenberg_family_member_passes_membership() {
    let out = run(&["heisenberg", &fixture("heisenberg_family.json")]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    assert_eq!(v["membership"]["verdict"], Value::Bool(true));
    assert_eq!(v["basis"].as_array().map(|a| a.len()), Some(3));
}

#[test]
fn heisenberg_rejects_asymmetric_b() {
    let doc = r#"{"levi": [[0, 1], [-1, 0]], "b": [[0, 1], [0, 0]]}"#;
    let path = std::env::temp_dir().join("carnot_forge_cli_asym_b.json");
    std::fs::write(&path, doc).unwrap();
    let out = run(&["heisenberg", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn bch_reproduces_the_heisenberg_product() {
    let out = run(&["bch", &fixture("bch_heisenberg.json")]);
    assert_eq!(code(&out), 0);
    let v = stdout_json(&out);
    let product: Vec<&str> = v["dynkin_product"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap())
        .collect();
    assert_eq!(product, ["1", "1", "1/2"]);
}

#[test]
fn reports_are_deterministic() {
    let heisenberg = fixture("heisenberg_symmetric.json");
    let bch = fixture("bch_heisenberg.json");
    for args in [
        vec!["approx", heisenberg.as_str()],
        vec!["canonical", heisenberg.as_str(), "--samples", "3"],
        vec!["bch", bch.as_str()],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert_eq!(code(&a), 0);
        assert_eq!(a.stdout, b.stdout, "non-deterministic output for {args:?}");
    }
}
