use std::collections::BTreeSet;
use std::path::Path;

use bvkit_cli::COMMANDS;

/// Every public operation, with the identifier that shows up where a command calls it.
const OPERATIONS: &[(&str, &str)] = &[
    ("graded_algebra::mul", "try_mul"),
    ("graded_algebra::left_derive", "left_derive"),
    ("graded_algebra::right_derive", "right_derive"),
    ("graded_algebra::substitute", "substitute"),
    ("cartan::de_rham_d", ".d("),
    ("cartan::contract", "contract"),
    ("cartan::lie_derivative", "lie_derivative"),
    ("cartan::vf_bracket", "q.bracket(q)"),
    ("cartan::is_cohomological", "is_cohomological"),
    ("supermatrix::is_invertible", "is_invertible"),
    ("supermatrix::berezinian", "berezinian"),
    ("supermatrix::check_multiplicative", "check_multiplicative"),
    ("berezin::berezin_integrate", "berezin_integrate"),
    ("berezin::gaussian_expect", "gaussian_expect"),
    ("berezin::bv_measure_integrate", "bv_measure_integrate"),
    ("bv_core::bracket", "bracket.bracket("),
    ("bv_core::bv_laplacian", "laplacian("),
    ("bv_core::antibracket", "antibracket("),
    ("bv_core::hamiltonian_vf", "hamiltonian_vf"),
    ("bv_core::check_cme", "check_cme"),
    ("bv_core::check_qme", "check_qme"),
    ("bv_core::relaxed_check_forms", "relaxed_check_forms"),
    ("bfv::ghost_extend", "ghost_extend"),
    ("bfv::correct_order_by_order", "correct_order_by_order"),
    ("bfv::q_cohomology_degree0", "q_cohomology_degree0"),
    ("bfv::n_mod_i_dimension", "n_mod_i_dimension"),
    ("gauge_fix::restrict", "restrict("),
    ("gauge_fix::bv_integrate", "bv_integrate("),
    ("gauge_fix::check_thm_bv1", "check_thm_bv1"),
    ("gauge_fix::check_thm_bv2", "check_thm_bv2"),
    ("gauge_fix::bv_pushforward", "bv_pushforward"),
    ("graphs_config::enumerate_graphs", "enumerate_graphs"),
    ("graphs_config::loop_number", "loop_number"),
    ("graphs_config::codim1_strata_closed", "codim1_strata_closed"),
    ("graphs_config::codim1_strata_boundary", "codim1_strata_boundary"),
    ("graphs_config::stratum_face_classes", "stratum_face_classes"),
    ("models::build_bf", "build_bf"),
    ("models::residual_fields", "residual_fields"),
    ("models::chain_contraction", "chain_contraction"),
    ("models::effective_action", "effective_action"),
    ("models::boundary_bfv", ".bfv()"),
    ("models::check_mqme", "check_mqme"),
    ("models::glue", "glue_states"),
    ("cli::run", "crate::run("),
    ("cli::verify_all", "verify_suite("),
];

fn source(file: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("src/commands").join(file);
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn every_operation_is_reached_by_a_command() {
    for (op, symbol) in OPERATIONS {
        let owners: Vec<_> = COMMANDS.iter().filter(|c| c.reaches.contains(op)).collect();
        assert!(!owners.is_empty(), "{op} is not reached by any command");
        for c in owners {
            assert!(source(c.source).contains(symbol), "{}: `{symbol}` for {op} not found in {}", c.name, c.source);
        }
    }
}

#[test]
fn command_table_names_only_known_operations() {
    let known: BTreeSet<&str> = OPERATIONS.iter().map(|o| o.0).collect();
    for c in COMMANDS {
        for op in c.reaches {
            assert!(known.contains(op), "{} claims unknown operation {op}", c.name);
        }
    }
}

#[test]
fn command_table_matches_the_parser() {
    let names: Vec<&str> = COMMANDS.iter().map(|c| c.name).collect();
    assert_eq!(
        names,
        [
            "berezinian",
            "bv-integrate",
            "check-cme",
            "check-qme",
            "bv-theorem",
            "bfv-extend",
            "enumerate-graphs",
            "strata",
            "bf-model",
            "glue",
            "verify-all"
        ]
    );
    for name in names {
        let out = bvkit_cli::run(&[name.to_string(), "--help".to_string()], None);
        assert_eq!(out.code, 0, "{name}: {}", out.stderr);
    }
}
