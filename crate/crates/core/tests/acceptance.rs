//! Acceptance battery: one test per criterion, each printing its pass/fail
//! line. Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines for passing criteria too.

use ctxobs_core::acceptance::{self, DEFAULT_SEED};

fn run(criterion: fn(u64) -> acceptance::CriterionOutcome) {
    let outcome = criterion(DEFAULT_SEED);
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn criterion_01_core_support_duality() {
    run(acceptance::criterion_01_core_support_duality);
}

#[test]
fn criterion_02_mirror_identities() {
    run(acceptance::criterion_02_mirror_identities);
}

#[test]
fn criterion_03_sandwich_and_extremality() {
    run(acceptance::criterion_03_sandwich_and_extremality);
}

#[test]
fn criterion_04_aspect_oracle_equivalence() {
    run(acceptance::criterion_04_aspect_oracle_equivalence);
}

#[test]
fn criterion_05_complete_monotonicity() {
    run(acceptance::criterion_05_complete_monotonicity);
}

#[test]
fn criterion_06_coarse_graining() {
    run(acceptance::criterion_06_coarse_graining);
}

#[test]
fn criterion_07_three_dim_counterexample() {
    run(acceptance::criterion_07_three_dim_counterexample);
}

#[test]
fn criterion_08_formal_sum_witness() {
    run(acceptance::criterion_08_formal_sum_witness);
}

#[test]
fn criterion_09_fiber_formulas() {
    run(acceptance::criterion_09_fiber_formulas);
}

#[test]
fn criterion_10_state_machinery() {
    run(acceptance::criterion_10_state_machinery);
}

#[test]
fn criterion_11_two_dim_counterexample() {
    run(acceptance::criterion_11_two_dim_counterexample);
}

#[test]
fn criterion_12_quasistate() {
    run(acceptance::criterion_12_quasistate);
}

#[test]
fn criterion_13_spectral_lattice_oracle() {
    run(acceptance::criterion_13_spectral_lattice_oracle);
}
