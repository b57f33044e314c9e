//! Acceptance suite: one test per verification criterion, printing a
//! PASS/FAIL line each. The same checks back the CLI `verify` command.

use modforms::verify::{self, CriterionOutcome};

fn assert_criterion(outcome: CriterionOutcome) {
    println!(
        "{}: {:7} [{:.2}s] {} — {}",
        if outcome.passed { "PASS" } else { "FAIL" },
        outcome.id,
        outcome.seconds,
        outcome.label,
        outcome.detail
    );
    assert!(
        outcome.passed,
        "criterion {} failed: {}",
        outcome.id, outcome.detail
    );
}

#[test]
fn acceptance_01_exact_decomposition() {
    assert_criterion(verify::criterion_01_exact_decomposition());
}

#[test]
fn acceptance_02_serre_annihilates_delta() {
    assert_criterion(verify::criterion_02_serre_annihilates_delta());
}

#[test]
fn acceptance_03_lvalue_identity() {
    assert_criterion(verify::criterion_03_lvalue_identity());
}

#[test]
fn acceptance_04_adjoint_vanishing() {
    assert_criterion(verify::criterion_04_adjoint_vanishing());
}

#[test]
fn acceptance_05_petersson_ratios() {
    assert_criterion(verify::criterion_05_petersson_ratios());
}

#[test]
fn acceptance_06_tau2_roundtrip() {
    assert_criterion(verify::criterion_06_tau2_roundtrip());
}

#[test]
fn acceptance_07_asymptotic_bound() {
    assert_criterion(verify::criterion_07_asymptotic_bound());
}

#[test]
fn acceptance_08_sign_property() {
    assert_criterion(verify::criterion_08_sign_property());
}

#[test]
fn acceptance_09_deligne_check() {
    assert_criterion(verify::criterion_09_deligne_check());
}

#[test]
fn acceptance_10_beta_consistency() {
    assert_criterion(verify::criterion_10_beta_consistency());
}

#[test]
fn acceptance_11_property_suite() {
    assert_criterion(verify::criterion_11_property_suite());
}
