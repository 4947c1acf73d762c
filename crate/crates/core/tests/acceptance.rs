use std::io::Write;
use std::time::{Duration, Instant};
use wulffkit::profile::ProfileMode;
use wulffkit::suite::{run_criterion, square_ball, CriterionResult, SuiteConfig};

fn report(id: u32, budget_secs: u64) {
    report_with(id, budget_secs, |config| run_criterion(id, config));
}

fn report_with<F>(id: u32, budget_secs: u64, f: F)
where
    F: FnOnce(&SuiteConfig) -> wulffkit::Result<CriterionResult>,
{
    let config = SuiteConfig::default();
    let start = Instant::now();
    let result = f(&config).unwrap_or_else(|e| panic!("criterion {id}: {e}"));
    let (elapsed, budget) = (start.elapsed(), Duration::from_secs(budget_secs));
    let timely = elapsed <= budget;
    let mut err = std::io::stderr().lock();
    let _ = writeln!(
        err,
        "{} [{:.1}s of {}s budget{}]",
        result.line(),
        elapsed.as_secs_f64(),
        budget.as_secs(),
        if timely { "" } else { ", OVER BUDGET" }
    );
    for c in result.failures() {
        let _ = writeln!(err, "    failed: {} value={:e} tol={:e}", c.name, c.value, c.tolerance);
    }
    drop(err);
    for n in &result.notes {
        println!("    note: {n}");
    }
    assert!(result.pass, "criterion {id} failed");
    assert!(timely, "criterion {id} exceeded its runtime budget");
}

#[test]
fn criterion_1_wulff_identities() {
    report(1, 10);
}

#[test]
fn criterion_2_variation_formulas() {
    report(2, 60);
}

#[test]
fn criterion_3_index_form() {
    report(3, 60);
}

#[test]
fn criterion_4_cone_profiles() {
    report(4, 120);
}

#[test]
fn criterion_5_square_profile() {
    report(5, 600);
}

#[test]
fn criterion_5_square_profile_candidates_only() {
    report_with(5, 30, |config| square_ball(config, ProfileMode::Candidates));
}

#[test]
fn criterion_6_anisotropic_profiles() {
    report(6, 900);
}

#[test]
fn criterion_7_wulff_stability() {
    report(7, 120);
}

#[test]
fn criterion_8_determinism() {
    report(8, 600);
}
