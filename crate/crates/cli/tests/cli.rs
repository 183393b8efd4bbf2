//! End-to-end tests driving the binary on the JSON fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_ctxobs"))
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .unwrap_or_else(|e| panic!("failed to spawn {:?}: {e}", bin()))
}

fn run_json(args: &[&str]) -> (serde_json::Value, i32) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = run(&full);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "not JSON ({e}): stdout={} stderr={}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    });
    (value, out.status.code().unwrap_or(-1))
}

fn diag_entries(result: &serde_json::Value) -> Vec<f64> {
    let rows = result.as_array().expect("matrix rows");
    rows.iter()
        .enumerate()
        .map(|(i, row)| row.as_array().unwrap()[i].as_array().unwrap()[0].as_f64().unwrap())
        .collect()
}

#[test]
fn restrict_upper_and_lower_on_the_worked_example() {
    let (v, code) = run_json(&[
        "restrict",
        "--op",
        &fixture("a.json"),
        "--context",
        &fixture("m.json"),
        "--mode",
        "upper",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["coefficients"], serde_json::json!([1.0, 3.0]));
    assert_eq!(diag_entries(&v["result"]["operator"]), vec![1.0, 3.0, 3.0]);
    assert_eq!(v["result"]["oracle"]["coefficients_match"], true);

    let (v, code) = run_json(&[
        "restrict",
        "--op",
        &fixture("a.json"),
        "--context",
        &fixture("m.json"),
        "--mode",
        "lower",
    ]);
    assert_eq!(code, 0);
    assert_eq!(diag_entries(&v["result"]["operator"]), vec![1.0, 2.0, 2.0]);

    // The trivial context yields the top of the spectrum.
    let (v, code) = run_json(&[
        "restrict",
        "--op",
        &fixture("a.json"),
        "--context",
        "trivial",
        "--mode",
        "upper",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["coefficients"], serde_json::json!([3.0]));
}

#[test]
fn order_commands() {
    let (v, code) =
        run_json(&["order", "compare", "--a", &fixture("a.json"), "--b", &fixture("b.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["a_leq_b"], true);
    assert_eq!(v["result"]["b_leq_a"], false);

    let (v, code) =
        run_json(&["order", "join", "--ops", &fixture("a.json"), &fixture("b.json")]);
    assert_eq!(code, 0);
    assert_eq!(diag_entries(&v["result"]["operator"]), vec![2.0, 3.0, 4.0]);

    let (v, code) =
        run_json(&["order", "meet", "--ops", &fixture("a.json"), &fixture("b.json")]);
    assert_eq!(code, 0);
    assert_eq!(diag_entries(&v["result"]["operator"]), vec![1.0, 2.0, 3.0]);
}

#[test]
fn section_validation_distinguishes_good_from_bad() {
    let (v, code) = run_json(&[
        "section",
        "validate",
        "--section",
        &fixture("section.json"),
        "--mode",
        "upper",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["ok"], true);

    let (v, code) = run_json(&[
        "section",
        "validate",
        "--section",
        &fixture("bad_section.json"),
        "--mode",
        "upper",
    ]);
    assert_eq!(code, 2, "violations must map to exit code 2");
    assert_eq!(v["result"]["ok"], false);
    assert!(!v["result"]["violations"].as_array().unwrap().is_empty());
}

#[test]
fn section_from_op_emits_a_valid_section() {
    let (v, code) = run_json(&[
        "section",
        "from-op",
        "--op",
        &fixture("a.json"),
        "--family",
        &fixture("family.json"),
        "--mode",
        "upper",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["validation"]["ok"], true);
    let assignment = &v["result"]["section"]["assignment"];
    assert_eq!(diag_entries(&assignment["t"]), vec![3.0, 3.0, 3.0]);
    assert_eq!(diag_entries(&assignment["c"]), vec![1.0, 3.0, 3.0]);
    assert_eq!(diag_entries(&assignment["f"]), vec![1.0, 2.0, 3.0]);
}

#[test]
fn glue_produces_the_observable_table() {
    let (v, code) = run_json(&["section", "glue", "--section", &fixture("section.json")]);
    assert_eq!(code, 0);
    let entries = v["result"]["entries"].as_array().unwrap();
    // Union of the three context lattices minus zero: 7 distinct projections.
    assert_eq!(entries.len(), 7);
    // The two-dimensional span of the second and third axes takes value 3.
    assert!(entries.iter().any(|e| {
        e["rank"] == 2 && e["value"] == 3.0 && diag_entries(&e["projection"]) == vec![0.0, 1.0, 1.0]
    }));
}

#[test]
fn c3_demo_reports_the_refutation_and_exits_2() {
    let (v, code) = run_json(&["section", "c3-demo", "--contexts", "16"]);
    assert_eq!(code, 2);
    assert_eq!(v["result"]["validation"]["ok"], true);
    assert_eq!(v["result"]["validation"]["violations"], 0);
    let norm = v["result"]["refutation"]["contradiction_norm"].as_f64().unwrap();
    assert!((norm - 0.7071067811865476).abs() < 1e-9);
}

#[test]
fn c2_demo_reports_the_linearity_residual_and_exits_2() {
    let (v, code) = run_json(&["state", "c2-demo"]);
    assert_eq!(code, 2);
    assert_eq!(v["result"]["validation"]["ok"], true);
    let residual = v["result"]["linearity_residual"].as_f64().unwrap();
    assert!((residual - (1.0 - 1.0 / 2f64.sqrt())).abs() < 1e-9);
}

#[test]
fn state_extend_and_apply() {
    let (v, code) = run_json(&[
        "state",
        "extend",
        "--measure",
        &fixture("measure.json"),
        "--apply",
        &fixture("apply_op.json"),
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["atom_values"], serde_json::json!([0.3, 0.7]));
    let value = v["result"]["applied_value"].as_f64().unwrap();
    assert!((value - 4.1).abs() < 1e-12);
}

#[test]
fn non_additive_measure_is_an_input_error_naming_the_pair() {
    let out = run(&["state", "extend", "--measure", &fixture("measure_bad.json")]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("not additive"), "stderr: {stderr}");
    assert!(stderr.contains("atoms{"), "stderr: {stderr}");
}

#[test]
fn state_restriction_sums_fibre_weights() {
    let (v, code) = run_json(&[
        "state",
        "restrict",
        "--state",
        &fixture("state.json"),
        "--context",
        &fixture("m.json"),
    ]);
    assert_eq!(code, 0);
    let weights = v["result"]["weights"].as_array().unwrap();
    assert!((weights[0].as_f64().unwrap() - 0.2).abs() < 1e-12);
    assert!((weights[1].as_f64().unwrap() - 0.8).abs() < 1e-12);
}

#[test]
fn state_section_validation_and_density_fit() {
    let (_, code) = run_json(&["state", "validate", "--section", &fixture("state_section.json")]);
    assert_eq!(code, 0);

    let (v, code) = run_json(&["state", "validate", "--section", &fixture("bad_state_section.json")]);
    assert_eq!(code, 2);
    assert_eq!(v["result"]["ok"], false);

    let (v, code) = run_json(&["state", "fit", "--section", &fixture("state_section.json")]);
    assert_eq!(code, 0);
    assert!(v["result"]["residual"].as_f64().unwrap() <= 1e-6);
    let rho_diag = diag_entries(&v["result"]["rho"]);
    assert!((rho_diag[0] - 0.5).abs() < 1e-6);
    assert!((rho_diag[1] - 0.3).abs() < 1e-6);
    assert!((rho_diag[2] - 0.2).abs() < 1e-6);
}

#[test]
fn quasistate_certifies_the_expectation() {
    let (v, code) = run_json(&[
        "state",
        "quasistate",
        "--op",
        &fixture("a.json"),
        "--vector",
        &fixture("x.json"),
        "--samples",
        "16",
    ]);
    assert_eq!(code, 0);
    assert!((v["result"]["value"].as_f64().unwrap() - 1.5).abs() < 1e-9);
    assert!((v["result"]["expectation"].as_f64().unwrap() - 1.5).abs() < 1e-12);
}

#[test]
fn coarse_grain_documents_both_lower_values() {
    let (v, code) =
        run_json(&["coarse-grain", "--op", &fixture("a5.json"), "--points", "2,4"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["upper"]["spectrum"], serde_json::json!([2.0, 4.0, 5.0]));
    assert_eq!(diag_entries(&v["result"]["upper"]["operator"]), vec![2.0, 2.0, 4.0, 4.0, 5.0]);
    assert_eq!(diag_entries(&v["result"]["lower"]["operator"]), vec![1.0, 1.0, 3.0, 3.0, 5.0]);
    assert_eq!(diag_entries(&v["result"]["riemann_lower"]), vec![1.0, 1.0, 2.0, 2.0, 4.0]);
    assert!(v["result"]["lower_vs_riemann_deviation"].as_f64().unwrap() > 0.5);
    assert!(v["result"]["note"].as_str().unwrap().contains("lower aspect"));

    // A partition point outside the spectrum is an input error.
    let out = run(&["coarse-grain", "--op", &fixture("a5.json"), "--points", "2.5"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn hermitian_invariant_violations_are_input_errors() {
    let out = run(&[
        "restrict",
        "--op",
        &fixture("nonhermitian.json"),
        "--context",
        "trivial",
        "--mode",
        "upper",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Hermitian"), "stderr: {stderr}");
}

#[test]
fn identical_inputs_and_seed_give_byte_identical_reports() {
    let args =
        ["--format", "json", "--seed", "42", "section", "c3-demo", "--contexts", "12"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), second.status.code());
    assert!(!first.stdout.is_empty());
    assert_eq!(first.stdout, second.stdout);

    // A different seed changes the random part of the family.
    let third = run(&[
        "--format", "json", "--seed", "43", "section", "c3-demo", "--contexts", "12",
    ]);
    assert_ne!(first.stdout, third.stdout);
}

#[test]
fn report_can_be_written_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "--format",
        "json",
        "--out",
        out_path.to_str().unwrap(),
        "order",
        "compare",
        "--a",
        &fixture("a.json"),
        "--b",
        &fixture("b.json"),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["command"], "order compare");
    assert_eq!(v["seed"], 7);
    assert_eq!(v["tolerances"]["tol_rank"], 1e-9);
}

#[test]
fn tolerance_profile_env_is_honoured() {
    let out = Command::new(bin())
        .env("CTXOBS_TOL_PROFILE", "strict")
        .args(["--format", "json", "order", "compare", "--a", &fixture("a.json"), "--b", &fixture("b.json")])
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["tolerances"]["tol_rank"], 1e-11);

    let out = Command::new(bin())
        .env("CTXOBS_TOL_PROFILE", "bogus")
        .args(["order", "compare", "--a", &fixture("a.json"), "--b", &fixture("b.json")])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn selftest_passes_and_prints_one_line_per_criterion() {
    let out = run(&["selftest"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    for number in 1..=13 {
        assert!(
            stdout.contains(&format!("criterion {number:2} [PASS]")),
            "missing line for criterion {number}: {stdout}"
        );
    }
    assert!(stdout.contains("13/13 criteria passed"));
}
