//! Acceptance suite: runs the full thirteen-criterion verification pipeline
//! once (shared across the tests below) and asserts each criterion
//! individually, so a failure names the exact check that broke. Each test
//! prints the same `criterion NN name: PASS/FAIL` line the CLI `verify`
//! command emits; run with `-- --nocapture` to see them for passing tests.

use once_cell::sync::Lazy;
use tubespec_core::verify::{run_verification, Verdict, VerifyConfig};

/// One full pipeline run at the calibrated reference configuration.
static VERDICT: Lazy<Verdict> = Lazy::new(|| {
    run_verification(&VerifyConfig::default()).expect("verification pipeline completes")
});

/// Assert a single criterion by id, printing its report line and, on
/// failure, its threshold statement and measured details.
fn check(id: u32) {
    let report = VERDICT
        .criteria
        .iter()
        .find(|c| c.id == id)
        .unwrap_or_else(|| panic!("criterion {id} missing from the verdict"));
    println!("{}", report.line());
    assert!(
        report.passed,
        "{}\n  threshold: {}\n  details: {}",
        report.line(),
        report.threshold,
        serde_json::to_string_pretty(&report.details).unwrap_or_default()
    );
}

#[test]
fn criterion_01_eigenvalue_oracle() {
    check(1);
}

#[test]
fn criterion_02_frequency_exactness() {
    check(2);
}

#[test]
fn criterion_03_eigenfunction_coefficient() {
    check(3);
}

#[test]
fn criterion_04_window_quotient() {
    check(4);
}

#[test]
fn criterion_05_coupling_consistency() {
    check(5);
}

#[test]
fn criterion_06_arc_moment_identity() {
    check(6);
}

#[test]
fn criterion_07_route_agreement() {
    check(7);
}

#[test]
fn criterion_08_shift_rate() {
    check(8);
}

#[test]
fn criterion_09_shift_constant() {
    check(9);
}

#[test]
fn criterion_10_blow_up() {
    check(10);
}

#[test]
fn criterion_11_pohozaev() {
    check(11);
}

#[test]
fn criterion_12_inequality_suite() {
    check(12);
}

#[test]
fn criterion_13_quadratic_form() {
    check(13);
}

#[test]
fn verdict_passes_overall() {
    println!("{}", VERDICT.line_report());
    assert!(VERDICT.passed, "at least one acceptance criterion failed");
    assert_eq!(VERDICT.criteria.len(), 13);
}
