//! Acceptance gate: one test per numbered criterion of the fixed
//! verification suite, sharing the expensive ensembles through a
//! process-wide suite instance.
//!
//! Criterion 11 asserts asymptotic heavy-tail thresholds that are not
//! reachable at its pinned horizon (see the suite's module docs); it is
//! expected to fail and is kept unweakened.

use branchscope::acceptance::Suite;
use std::sync::OnceLock;

fn suite() -> &'static Suite {
    static SUITE: OnceLock<Suite> = OnceLock::new();
    SUITE.get_or_init(Suite::new)
}

fn assert_criterion(id: u32) {
    let outcome = suite().criterion(id);
    let verdict = if outcome.passed { "PASS" } else { "FAIL" };
    println!(
        "{verdict} {:>2} {}: {}",
        outcome.id, outcome.name, outcome.detail
    );
    assert!(
        outcome.passed,
        "criterion {} ({}): {}",
        outcome.id, outcome.name, outcome.detail
    );
}

#[test]
fn criterion_01_malthus_solver_exactness() {
    assert_criterion(1);
}

#[test]
fn criterion_02_derived_constants() {
    assert_criterion(2);
}

#[test]
fn criterion_03_characteristic_length() {
    assert_criterion(3);
}

#[test]
fn criterion_04_martingale_mean() {
    assert_criterion(4);
}

#[test]
fn criterion_05_growth_law() {
    assert_criterion(5);
}

#[test]
fn criterion_06_census_limit() {
    assert_criterion(6);
}

#[test]
fn criterion_07_intensity_curves() {
    assert_criterion(7);
}

#[test]
fn criterion_08_pendant_fraction() {
    assert_criterion(8);
}

#[test]
fn criterion_09_max_laws() {
    assert_criterion(9);
}

#[test]
fn criterion_10_laplace_functional() {
    assert_criterion(10);
}

#[test]
fn criterion_11_heavy_tail_degeneracy() {
    assert_criterion(11);
}

#[test]
fn criterion_12_slope_convergence() {
    assert_criterion(12);
}

#[test]
fn criterion_13_oracle_equivalence() {
    assert_criterion(13);
}

#[test]
fn criterion_14_output_determinism() {
    assert_criterion(14);
}
