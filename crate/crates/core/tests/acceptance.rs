//! End-to-end acceptance gate: one test (and one printed pass/fail line) per
//! criterion. Run with `cargo test --test acceptance -- --nocapture` to see
//! the lines even when everything passes.

use std::time::{Duration, Instant};

use lukmv::decide::{decide_pab, DecideConfig};
use lukmv::formula::{formula_size, Signature};
use lukmv::generate::{random_formula, rng_for, var_names};
use lukmv::lemmas::{run_suite, SuiteConfig};
use lukmv::linear::witness_box;
use lukmv::rat::pow2;
use lukmv::reduction::DEFAULT_C;
use num::Signed;
use rand::Rng;

fn check_suite(criterion: u32, name: &str, count: u64, max_chain: u64, budget: Duration) {
    let cfg = SuiteConfig {
        seed: 7,
        count,
        max_chain,
        decide: DecideConfig::default(),
    };
    let start = Instant::now();
    let report = run_suite(name, &cfg).expect("known suite");
    let elapsed = start.elapsed();
    let ok = report.ok() && elapsed <= budget;
    println!(
        "criterion {criterion}: {} ({name} {}/{} in {elapsed:.2?}, budget {budget:?})",
        if ok { "pass" } else { "FAIL" },
        report.passed,
        report.total,
    );
    for f in report.failures.iter().take(5) {
        println!("  {f}");
    }
    assert!(
        report.ok(),
        "criterion {criterion}: {}/{} instances passed",
        report.passed,
        report.total
    );
    assert!(
        elapsed <= budget,
        "criterion {criterion}: took {elapsed:?}, budget {budget:?}"
    );
}

#[test]
fn criterion_01_tau_commutation() {
    check_suite(1, "tau", 300, 8, Duration::from_secs(10));
}

#[test]
fn criterion_02_delta_shift_identity() {
    check_suite(2, "delta", 300, 8, Duration::from_secs(10));
}

#[test]
fn criterion_03_sigma_grid_and_size() {
    check_suite(3, "sigma", 100, 8, Duration::from_secs(60));
}

#[test]
fn criterion_04_gadget_values() {
    // chain lengths up to 8 through the solver, 512 via unit propagation
    check_suite(4, "bonus", 100, 8, Duration::from_secs(5));
}

#[test]
fn criterion_05_pab_roundtrip() {
    check_suite(5, "roundtrip-pab", 200, 8, Duration::from_secs(300));
}

#[test]
fn criterion_06_mv_roundtrip() {
    check_suite(6, "roundtrip-mv", 200, 8, Duration::from_secs(300));
}

#[test]
fn criterion_07_small_solutions() {
    check_suite(7, "smallsol", 100, 8, Duration::from_secs(5));
}

#[test]
fn criterion_08_bounded_witnesses() {
    // same instance stream as criterion 5; every SAT verdict must stay in
    // the Lemma 3.2 box |a_i| <= 2^M for M = witness_box(size(F), 20).M
    let cfg = DecideConfig::default();
    let start = Instant::now();
    let mut sat = 0u32;
    for i in 0..200u64 {
        let mut rng = rng_for(7, i);
        let vars = var_names(rng.gen_range(1..=3));
        let f = random_formula(&mut rng, Signature::PAb, 3, &vars, 4);
        let v = decide_pab(&f, &cfg).expect("within caps");
        if let Some(w) = &v.witness {
            sat += 1;
            let m = witness_box(formula_size(&f) as u64, DEFAULT_C).m;
            let bound = pow2(m as i64);
            assert!(
                w.values().all(|a| a.abs() <= bound),
                "criterion 8: FAIL (instance {i} escapes the 2^{m} box)"
            );
        }
    }
    println!(
        "criterion 8: pass (200/200 compliant, {sat} SAT, in {:.2?})",
        start.elapsed()
    );
}

#[test]
fn criterion_09_brute_force_agreement() {
    check_suite(9, "brute", 100, 8, Duration::from_secs(120));
}

#[test]
fn criterion_10_size_guard() {
    check_suite(10, "size-guard", 100, 8, Duration::from_secs(60));
}
