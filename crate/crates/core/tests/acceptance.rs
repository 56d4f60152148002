//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.
//! Criteria 8-11 execute the full seeded rate protocols, so an optimized test
//! profile is assumed (the workspace sets `profile.test` to opt-level 2).

use std::time::Instant;

use mlsm::environments::fit_loglog_slope;
use mlsm::report::run_csv;
use mlsm::scenarios::{
    run_scenario, wrapper_pm_policy_value, wrapper_pm_uniform_baseline, Scenario,
};
use mlsm::verify;

const SUITE_SEED: u64 = 20240; // fixed; every statistic below is deterministic

struct Criterion {
    number: usize,
    name: &'static str,
}

impl Criterion {
    fn report(&self, passed: bool, details: &str) {
        println!(
            "criterion {:02} ({}): {} - {}",
            self.number,
            self.name,
            if passed { "PASS" } else { "FAIL" },
            details
        );
        assert!(passed, "criterion {:02} failed: {details}", self.number);
    }
}

fn suite_check(suite: &str, check: &str) -> verify::PropertyReport {
    let reports = verify::run_suite(suite, SUITE_SEED).expect("known suite");
    reports[0]
        .checks
        .iter()
        .find(|c| c.name == check)
        .unwrap_or_else(|| panic!("check `{check}` missing from suite `{suite}`"))
        .clone()
}

#[test]
fn criterion_01_barrier_correctness() {
    let c = Criterion {
        number: 1,
        name: "barrier gradient/Hessian vs finite differences + gradient condition",
    };
    let start = Instant::now();
    let fd = suite_check("barrier", "barrier-finite-differences");
    let sc = suite_check("barrier", "self-concordance-gradient-condition");
    let elapsed = start.elapsed().as_secs_f64();
    c.report(
        fd.passed && sc.passed && elapsed < 10.0,
        &format!("{}; {}; {elapsed:.2}s (< 10s)", fd.details, sc.details),
    );
}

#[test]
fn criterion_02_dikin_containment() {
    let c = Criterion {
        number: 2,
        name: "Dikin steps stay in the closed domain",
    };
    let start = Instant::now();
    let check = suite_check("barrier", "dikin-containment");
    let elapsed = start.elapsed().as_secs_f64();
    c.report(
        check.passed && elapsed < 5.0,
        &format!("{}; {elapsed:.2}s (< 5s)", check.details),
    );
}

#[test]
fn criterion_03_scale_distribution() {
    let c = Criterion {
        number: 3,
        name: "exploration-scale law: KS statistic and mean",
    };
    let ks = suite_check("distributions", "scale-ks-statistic");
    let mean = suite_check("distributions", "scale-mean");
    c.report(
        ks.passed && mean.passed,
        &format!("{}; {}", ks.details, mean.details),
    );
}

#[test]
fn criterion_04_estimator_unbiasedness() {
    let c = Criterion {
        number: 4,
        name: "one-point estimators match their oracles over 2e5 draws",
    };
    let start = Instant::now();
    let draws = 200_000;
    let mlsm = verify::mlsm_unbiasedness(SUITE_SEED, draws).expect("mlsm estimator run");
    let ps = verify::ps_unbiasedness(SUITE_SEED, draws).expect("ps estimator run");
    let drsm = verify::drsm_unbiasedness(SUITE_SEED, draws).expect("drsm estimator run");
    let elapsed = start.elapsed().as_secs_f64();
    c.report(
        mlsm.max_sigma <= 3.0 && ps.max_sigma <= 3.0 && drsm.max_sigma <= 3.0 && elapsed < 120.0,
        &format!(
            "max deviations {:.2}/{:.2}/{:.2} se (tol 3); {elapsed:.1}s (< 120s)",
            mlsm.max_sigma, ps.max_sigma, drsm.max_sigma
        ),
    );
}

#[test]
fn criterion_05_dual_norm_bounds() {
    let c = Criterion {
        number: 5,
        name: "per-draw dual-norm and magnitude bounds, zero violations",
    };
    let draws = 200_000;
    let mlsm = verify::mlsm_unbiasedness(SUITE_SEED, draws).expect("mlsm estimator run");
    let ps = verify::ps_unbiasedness(SUITE_SEED, draws).expect("ps estimator run");
    let drsm = verify::drsm_unbiasedness(SUITE_SEED, draws).expect("drsm estimator run");
    c.report(
        mlsm.bound_violations == 0 && ps.bound_violations == 0 && drsm.bound_violations == 0,
        &format!(
            "violations {}/{}/{} across 3 x {draws} draws",
            mlsm.bound_violations, ps.bound_violations, drsm.bound_violations
        ),
    );
}

#[test]
fn criterion_06_auxiliary_inequality() {
    let c = Criterion {
        number: 6,
        name: "auxiliary-gradient approximation inequality on 1000 random triples",
    };
    let (passed, details) = verify::aux_inequality(SUITE_SEED, 1000);
    c.report(passed, &details);
}

#[test]
fn criterion_07_reduction_structure() {
    let c = Criterion {
        number: 7,
        name: "extension mappings: monotone DR, zero origin, sampler agreement, gradient caps",
    };
    let pm = suite_check("reductions", "pm-extension-structure");
    let ss = suite_check("reductions", "ss-extension-structure");
    let coupling = suite_check("reductions", "pm-coupling-identities");
    c.report(
        pm.passed && ss.passed && coupling.passed,
        &format!("{}; {}; {}", pm.details, ss.details, coupling.details),
    );
}

struct RateOutcome {
    curve: Vec<(f64, f64)>,
    slope: f64,
    positive: bool,
    increasing: bool,
}

fn rate_protocol(scenario: Scenario, horizons: &[usize], seeds: u64) -> RateOutcome {
    let mut curve = Vec::new();
    for &t in horizons {
        let mut total = 0.0;
        for seed in 1..=seeds {
            let run = run_scenario(scenario, t, seed).expect("scenario run");
            total += run.regret.final_cumulative();
        }
        curve.push((t as f64, total / seeds as f64));
    }
    let positive = curve.iter().all(|&(_, r)| r > 0.0);
    let increasing = curve.windows(2).all(|w| w[1].1 > w[0].1);
    let slope = if positive {
        fit_loglog_slope(&curve).expect("positive curve")
    } else {
        f64::NAN
    };
    RateOutcome {
        curve,
        slope,
        positive,
        increasing,
    }
}

fn horizons(max_pow: u32) -> Vec<usize> {
    (12..=max_pow).map(|k| 1usize << k).collect()
}

#[test]
fn criterion_08_mlsm_regret_rate() {
    let c = Criterion {
        number: 8,
        name: "multi-linear learner regret rate (10 seeds, T = 2^12..2^17)",
    };
    let start = Instant::now();
    let out = rate_protocol(Scenario::MlsmRate, &horizons(17), 10);
    let elapsed = start.elapsed().as_secs_f64();
    c.report(
        out.positive && out.increasing && out.slope <= 0.85 && elapsed < 900.0,
        &format!(
            "slope {:.3} (tol 0.85); positive {}, increasing {}; {elapsed:.1}s (< 900s); curve {:?}",
            out.slope,
            out.positive,
            out.increasing,
            out.curve.iter().map(|&(_, r)| r.round()).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_09_wrapper_partition_matroid_rate() {
    let c = Criterion {
        number: 9,
        name: "wrapper on a partition matroid: rate plus learned-policy value",
    };
    let out = rate_protocol(Scenario::WrapperPmRate, &horizons(16), 10);
    // Learned-policy clause: the final iterate's expected phase-average
    // reward at T = 2^16, across the same 10 seeds, against uniform feasible
    // play.
    let t = 1usize << 16;
    let mut policy_total = 0.0;
    for seed in 1..=10 {
        let run = run_scenario(Scenario::WrapperPmRate, t, seed).expect("scenario run");
        let iterate = &run.history.blocks.last().expect("blocks").iterate;
        policy_total += wrapper_pm_policy_value(iterate).expect("policy value");
    }
    let policy_mean = policy_total / 10.0;
    let baseline = wrapper_pm_uniform_baseline(t).expect("baseline");
    let policy_ok = policy_mean >= 2.0 * baseline;
    c.report(
        out.positive && out.increasing && out.slope <= 0.85 && policy_ok,
        &format!(
            "slope {:.3} (tol 0.85); positive {}, increasing {}; policy value {:.4} vs 2x baseline {:.4}",
            out.slope,
            out.positive,
            out.increasing,
            policy_mean,
            2.0 * baseline
        ),
    );
}

#[test]
fn criterion_10_drsm_regret_rate() {
    let c = Criterion {
        number: 10,
        name: "smoothed learner regret sanity (slope tol 0.92)",
    };
    let out = rate_protocol(Scenario::DrsmRate, &horizons(17), 10);
    c.report(
        out.positive && out.increasing && out.slope <= 0.92,
        &format!(
            "slope {:.3} (tol 0.92); positive {}, increasing {}; curve {:?}",
            out.slope,
            out.positive,
            out.increasing,
            out.curve.iter().map(|&(_, r)| r.round()).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_11_stochastic_mode_rate() {
    let c = Criterion {
        number: 11,
        name: "stochastic cardinality environment, mean-function regret rate",
    };
    let out = rate_protocol(Scenario::StochasticRate, &horizons(17), 10);
    c.report(
        out.positive && out.increasing && out.slope <= 0.85,
        &format!(
            "slope {:.3} (tol 0.85); positive {}, increasing {}",
            out.slope, out.positive, out.increasing
        ),
    );
}

#[test]
fn criterion_12_determinism() {
    let c = Criterion {
        number: 12,
        name: "seeded reruns reproduce run CSVs byte-identically",
    };
    let mut all_same = true;
    for (scenario, t) in [
        (Scenario::MlsmRate, 4096usize),
        (Scenario::WrapperPmRate, 4096),
    ] {
        let a = run_scenario(scenario, t, 7).expect("scenario run");
        let b = run_scenario(scenario, t, 7).expect("scenario run");
        let csv_a = run_csv(&a.history, &a.regret).expect("csv");
        let csv_b = run_csv(&b.history, &b.regret).expect("csv");
        all_same &= csv_a == csv_b;
        // A different seed must not collide.
        let other = run_scenario(scenario, t, 8).expect("scenario run");
        let csv_other = run_csv(&other.history, &other.regret).expect("csv");
        all_same &= csv_a != csv_other;
    }
    c.report(all_same, "equal seeds byte-identical, distinct seeds differ");
}
