use std::path::{Path, PathBuf};

use bvkit_cli::{run, verify_suite};
use serde_json::Value;

fn golden() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("golden")
}

fn expected(case: &str) -> Value {
    let p = golden().join("cases").join(format!("{case}.expected.json"));
    serde_json::from_slice(&std::fs::read(&p).unwrap()).unwrap()
}

fn text(v: &Value) -> &str {
    v["text"].as_str().unwrap()
}

#[test]
fn shipped_suite_passes() {
    let r = verify_suite(&golden().join("cases"), None, false).unwrap();
    for c in &r.cases {
        assert_eq!(c.status, "pass", "{}: {:?} {:?}", c.name, c.diff, c.message);
    }
    assert!(r.cases.len() >= 25);
    assert!(r.warnings.is_empty());
}

#[test]
fn empty_directory_passes_vacuously_with_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["verify-all".into(), dir.path().display().to_string()], None);
    assert_eq!(out.code, 0);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["result"]["cases"].as_array().unwrap().len(), 0);
    assert_eq!(v["result"]["warnings"].as_array().unwrap().len(), 1);
}

fn copy_case(from: &Path, to: &Path, name: &str, input: &str) {
    std::fs::create_dir_all(to.join("cases")).unwrap();
    std::fs::create_dir_all(to.join("inputs")).unwrap();
    for suffix in ["case.json", "expected.json"] {
        let f = format!("{name}.{suffix}");
        std::fs::copy(from.join("cases").join(&f), to.join("cases").join(&f)).unwrap();
    }
    std::fs::copy(from.join("inputs").join(input), to.join("inputs").join(input)).unwrap();
}

#[test]
fn corrupted_golden_file_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    copy_case(&golden(), dir.path(), "ber_ident", "ident.json");
    copy_case(&golden(), dir.path(), "cme_free", "cme_free.json");
    let target = dir.path().join("cases/ber_ident.expected.json");
    let body = std::fs::read_to_string(&target).unwrap();
    std::fs::write(&target, body.replace("\"text\": \"1\"", "\"text\": \"2\"")).unwrap();

    let out = run(&["verify-all".into(), dir.path().join("cases").display().to_string()], None);
    assert_eq!(out.code, 1);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    let cases = v["result"]["cases"].as_array().unwrap();
    assert_eq!(cases[0]["name"], "ber_ident");
    assert_eq!(cases[0]["status"], "mismatch");
    assert!(cases[0]["diff"]["expected"].as_str().unwrap().contains("\"2\""));
    assert!(cases[0]["diff"]["actual"].as_str().unwrap().contains("\"1\""));
    assert_eq!(cases[1]["status"], "pass");
    assert_eq!(v["result"]["passed"], 1);
}

#[test]
fn missing_expected_file_fails() {
    let dir = tempfile::tempdir().unwrap();
    copy_case(&golden(), dir.path(), "cme_free", "cme_free.json");
    std::fs::remove_file(dir.path().join("cases/cme_free.expected.json")).unwrap();
    let r = verify_suite(&dir.path().join("cases"), Some(1), false).unwrap();
    assert_eq!(r.cases[0].status, "missing_expected");
    assert!(!r.pass());
}

#[test]
fn bless_rewrites_expected_files() {
    let dir = tempfile::tempdir().unwrap();
    copy_case(&golden(), dir.path(), "cme_free", "cme_free.json");
    let target = dir.path().join("cases/cme_free.expected.json");
    std::fs::write(&target, "stale\n").unwrap();
    let r = verify_suite(&dir.path().join("cases"), Some(1), true).unwrap();
    assert_eq!(r.cases[0].status, "blessed");
    assert_eq!(std::fs::read(&target).unwrap(), std::fs::read(golden().join("cases/cme_free.expected.json")).unwrap());
}

// Frozen values, each checked against a hand computation.

#[test]
fn frozen_berezinian_of_odd_blocks() {
    // Ber [[2, ξ], [η, 1]] = det(2 − ξ·1⁻¹·η) / det(1)
    let v = expected("ber_odd");
    assert_eq!(text(&v["result"]["ber"]), "2 + [-1]*xi*eta");
    assert_eq!(v["result"]["multiplicative"]["pass"], true);
}

#[test]
fn frozen_gaussian_fourth_moment() {
    // ⟨x⁴⟩ = 3σ⁴ with σ² = 2
    assert_eq!(text(&expected("gauss_x4")["result"]["value"]), "12");
}

#[test]
fn frozen_so3_invariants() {
    // degree ≤ 2 invariants of the diagonal rotation action on (x, k): 1, x·x, k·k, x·k
    let v = expected("bfv_so3");
    assert_eq!(v["result"]["h0_dimension"], 4);
    assert_eq!(v["result"]["master_residual"]["text"], "0");
    assert_eq!(expected("cme_so3_bfv")["pass"], true);
}

#[test]
fn frozen_cotangent_reduction() {
    // φ = p on T*ℝ: {f, p} = ∂ₓf ∈ (p) forces f = c + p·h, so N(I)/I is the constants
    for c in [2, 3, 4] {
        let v = expected(&format!("bfv_tstar_c{c}"));
        assert_eq!(v["result"]["h0_dimension"], 1, "cutoff {c}");
        assert_eq!(v["result"]["n_mod_i_dimension"], 1, "cutoff {c}");
    }
}

#[test]
fn frozen_strata_and_graph_counts() {
    assert_eq!(expected("strata_closed_5")["result"]["count"], 26);
    let g = &expected("graphs_closed")["result"];
    // simple graphs on 3 vertices with ≤ 3 edges: one class per edge count, C(3, k) labelings
    assert_eq!(g["count"], 4);
    assert_eq!(g["labeled_check"]["count"], 8);
}

#[test]
fn frozen_relative_cohomology_of_models() {
    // H(I, ∂I) = (0, 1); H(S¹) = (1, 1); H(D, ∂D) = (0, 0, 1)
    assert_eq!(expected("bf_interval")["result"]["residual_dims"]["by_degree"], serde_json::json!([0, 1]));
    assert_eq!(expected("bf_circle")["result"]["residual_dims"]["by_degree"], serde_json::json!([1, 1]));
    assert_eq!(expected("bf_disk")["result"]["residual_dims"]["by_degree"], serde_json::json!([0, 0, 1]));
    assert_eq!(expected("bf_circle")["result"]["cme"]["pass"], true);
    assert_eq!(expected("bf_disk_checked")["result"]["negative_control"]["detected"], true);
    assert_eq!(expected("bf_annulus")["result"]["contraction_change"]["verified"], true);
}

#[test]
fn frozen_gluings() {
    let c = expected("glue_circle");
    assert_eq!(c["result"]["s_eff"]["text"], "0");
    assert_eq!(c["result"]["equivalence"]["equivalent"], true);
    assert_eq!(c["result"]["state"]["residual_ghosts"], serde_json::json!({"-2": 1, "-1": 1, "0": 1, "1": 1}));
    assert_eq!(expected("glue_assoc")["result"]["equivalence"]["equivalent"], true);
}
