//! Numerical property suites.
//!
//! Each check is a seeded deterministic experiment that measures a statistic
//! and compares it against a pinned tolerance. The CLI `verify` command prints
//! one line per check; the acceptance suite asserts on the same reports.

use std::time::Instant;

use crate::environments::{ObliviousSequence, SetBandit};
use crate::error::{Error, Result};
use crate::estimators::{
    drsm_ingest, drsm_propose, mlsm_ingest, mlsm_propose, ps_ingest, ps_propose, ONE_MINUS_INV_E,
};
use crate::geometry::{
    rftl_argmin_traced, Barrier, ProductSimplexBarrier, ProductSimplexDomain,
};
use crate::learners::LearnerParams;
use crate::linalg;
use crate::objectives::{
    concave_over_modular, coverage, uniform_weight_coverage, verify_monotone_dr,
    AuxiliaryFunction, MultilinearPolynomial, SetFunction,
};
use crate::reductions::{
    run_mlsm_wrapper, ExtensionMapping, OrderedListExtension, OrderedListSpace,
    PartitionExtension, PartitionMatroid, SequentialObjective,
};
use crate::sampling::{z_cdf, z_mean, RandomStream};

/// Outcome of one property check.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub name: String,
    pub passed: bool,
    /// Measured statistics, human-readable.
    pub details: String,
    pub seconds: f64,
}

/// Outcome of a named suite.
#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<PropertyReport>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const SUITES: &[&str] = &[
    "barrier",
    "distributions",
    "objectives",
    "estimators",
    "reductions",
];

/// Runs a named suite (or `all`).
pub fn run_suite(name: &str, seed: u64) -> Result<Vec<SuiteReport>> {
    match name {
        "barrier" => Ok(vec![barrier_suite(seed)]),
        "distributions" => Ok(vec![distributions_suite(seed)]),
        "objectives" => Ok(vec![objectives_suite(seed)]),
        "estimators" => Ok(vec![estimators_suite(seed)]),
        "reductions" => Ok(vec![reductions_suite(seed)]),
        "all" => Ok(vec![
            barrier_suite(seed),
            distributions_suite(seed),
            objectives_suite(seed),
            estimators_suite(seed),
            reductions_suite(seed),
        ]),
        other => Err(Error::Config(format!(
            "unknown suite `{other}`; known: {}, all",
            SUITES.join(", ")
        ))),
    }
}

fn check(name: &str, body: impl FnOnce() -> (bool, String)) -> PropertyReport {
    let start = Instant::now();
    let (passed, details) = body();
    PropertyReport {
        name: name.to_string(),
        passed,
        details,
        seconds: start.elapsed().as_secs_f64(),
    }
}

// ---------------------------------------------------------------------------
// barrier suite

pub fn barrier_suite(seed: u64) -> SuiteReport {
    let checks = vec![
        check("barrier-finite-differences", || barrier_fd(seed)),
        check("self-concordance-gradient-condition", || {
            self_concordance(seed)
        }),
        check("dikin-containment", || dikin_containment(seed)),
        check("analytic-center-residual", analytic_center_residual),
        check("argmin-kkt-and-residual-decrease", || argmin_postconditions(seed)),
        check("rftl-regret-inequality", || rftl_regret_inequality(seed)),
    ];
    SuiteReport {
        suite: "barrier".into(),
        checks,
    }
}

/// Gradient and Hessian of the barrier vs central finite differences at 1000
/// interior points of a (3,4)-product simplex; relative tolerances 1e-6/1e-5.
fn barrier_fd(seed: u64) -> (bool, String) {
    let dom = ProductSimplexDomain::new(vec![3, 4]).unwrap();
    let bar = ProductSimplexBarrier::new(dom.clone());
    let mut s = RandomStream::for_run(seed, 101);
    let h = 1e-6;
    let mut worst_g = 0.0f64;
    let mut worst_h = 0.0f64;
    for _ in 0..1000 {
        let x = dom.sample_interior(&mut s, 1e-3);
        let g = bar.gradient(&x).unwrap();
        for i in 0..x.len() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let fd = (bar.value(&xp).unwrap() - bar.value(&xm).unwrap()) / (2.0 * h);
            worst_g = worst_g.max((fd - g[i]).abs() / g[i].abs().max(1.0));
        }
        let metric = bar.metric(&x).unwrap();
        for i in 0..x.len() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[i] += h;
            xm[i] -= h;
            let gp = bar.gradient(&xp).unwrap();
            let gm = bar.gradient(&xm).unwrap();
            let mut e = vec![0.0; x.len()];
            e[i] = 1.0;
            let hcol = metric.hessian_apply(&e);
            for j in 0..x.len() {
                let fd = (gp[j] - gm[j]) / (2.0 * h);
                worst_h = worst_h.max((fd - hcol[j]).abs() / hcol[j].abs().max(1.0));
            }
        }
    }
    (
        worst_g <= 1e-6 && worst_h <= 1e-5,
        format!("max rel err: gradient {worst_g:.2e} (tol 1e-6), hessian {worst_h:.2e} (tol 1e-5)"),
    )
}

/// `|grad(x)[h]| <= sqrt(nu) * ||h||_x` at 1000 random points and directions,
/// with `nu = sum(d_i + 1)`.
fn self_concordance(seed: u64) -> (bool, String) {
    let dom = ProductSimplexDomain::new(vec![3, 4]).unwrap();
    let bar = ProductSimplexBarrier::new(dom.clone());
    let mut s = RandomStream::for_run(seed, 102);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let x = dom.sample_interior(&mut s, 1e-6);
        let h = s.unit_sphere(dom.total_dim());
        let g = bar.gradient(&x).unwrap();
        let lhs = linalg::dot(&g, &h).abs();
        let rhs = bar.nu().sqrt() * bar.hessian_quad(&x, &h).unwrap().sqrt();
        worst = worst.max(lhs - rhs * (1.0 + 1e-12));
        if lhs > rhs * (1.0 + 1e-9) {
            return (false, format!("violated: |g.h| - sqrt(nu)||h||_x = {:.3e}", lhs - rhs));
        }
    }
    (true, format!("max slack {worst:.3e} <= 0 over 1000 samples"))
}

/// `x + Hv` stays in the closed domain for 10^4 `(x, v)` pairs across three
/// domain shapes.
fn dikin_containment(seed: u64) -> (bool, String) {
    let shapes = [vec![2], vec![3, 4], vec![1, 1, 2, 3]];
    let mut s = RandomStream::for_run(seed, 103);
    let mut tried = 0usize;
    let mut inside = 0usize;
    for dims in shapes {
        let dom = ProductSimplexDomain::new(dims).unwrap();
        let bar = ProductSimplexBarrier::new(dom.clone());
        for _ in 0..3400 {
            let x = dom.sample_interior(&mut s, 1e-6);
            let metric = bar.metric(&x).unwrap();
            let v = s.unit_sphere(dom.total_dim());
            let hv = metric.dikin_apply(&v);
            let y: Vec<f64> = x.iter().zip(&hv).map(|(a, b)| a + b).collect();
            tried += 1;
            if dom.contains(&y) {
                inside += 1;
            }
        }
    }
    (
        inside == tried,
        format!("{inside}/{tried} Dikin points inside the closed domain"),
    )
}

fn analytic_center_residual() -> (bool, String) {
    let mut worst = 0.0f64;
    for dims in [vec![2], vec![2, 3], vec![1; 6], vec![4, 1, 2]] {
        let bar = ProductSimplexBarrier::new(ProductSimplexDomain::new(dims).unwrap());
        let g = bar.gradient(&bar.analytic_center()).unwrap();
        worst = worst.max(linalg::norm2(&g));
    }
    (worst <= 1e-10, format!("max center gradient norm {worst:.2e} (tol 1e-10)"))
}

fn argmin_postconditions(seed: u64) -> (bool, String) {
    let dom = ProductSimplexDomain::new(vec![2, 3, 1]).unwrap();
    let bar = ProductSimplexBarrier::new(dom.clone());
    let mut s = RandomStream::for_run(seed, 104);
    let mut warm = bar.analytic_center();
    let mut acc = vec![0.0; dom.total_dim()];
    let mut worst_res = 0.0f64;
    let mut monotone = true;
    for _ in 0..50 {
        for a in acc.iter_mut() {
            *a += 6.0 * (s.uniform() - 0.35);
        }
        let trace = match rftl_argmin_traced(&bar, &acc, 0.5, &warm) {
            Ok(t) => t,
            Err(e) => return (false, format!("solver failure: {e}")),
        };
        worst_res = worst_res.max(*trace.residuals.last().unwrap());
        monotone &= trace
            .residuals
            .windows(2)
            .all(|w| w[1] <= w[0] * (1.0 + 1e-9));
        warm = trace.x;
    }
    (
        worst_res <= 1e-8 && monotone,
        format!("max residual {worst_res:.2e} (tol 1e-8); residual decrease everywhere: {monotone}"),
    )
}

/// Full-information replay of the regularized-leader bound: running on the
/// exact per-block gradients, check
/// `sum_q <g_q, y - x_q> <= eta sum_q ||g_q||_{x_q,*}^2 + (Phi(y) - Phi(x_1))/eta`
/// for fixed interior comparators.
fn rftl_regret_inequality(seed: u64) -> (bool, String) {
    let dom = ProductSimplexDomain::new(vec![2, 2]).unwrap();
    let bar = ProductSimplexBarrier::new(dom.clone());
    let mut s = RandomStream::for_run(seed, 105);
    let f = crate::objectives::random_monotone_dr_instance(dom.total_dim(), &mut s);
    let aux = AuxiliaryFunction::new(f).unwrap();
    let eta = 0.1;
    let blocks = 80;
    let mut x = bar.analytic_center();
    let x1 = x.clone();
    let mut acc = vec![0.0; dom.total_dim()];
    let mut xs = Vec::new();
    let mut gs = Vec::new();
    let mut dual_sum = 0.0;
    for _ in 0..blocks {
        let g = aux.gradient(&x);
        let metric = bar.metric(&x).unwrap();
        dual_sum += metric.dual_norm_sq(&g);
        xs.push(x.clone());
        gs.push(g.clone());
        for (a, gi) in acc.iter_mut().zip(&g) {
            *a += gi;
        }
        x = match crate::geometry::rftl_argmin(&bar, &acc, eta, &x) {
            Ok(nx) => nx,
            Err(e) => return (false, format!("argmin failure: {e}")),
        };
    }
    let phi_x1 = bar.value(&x1).unwrap();
    let mut worst_slack = f64::NEG_INFINITY;
    for _ in 0..5 {
        let y = dom.sample_interior(&mut s, 0.02);
        let lhs: f64 = xs
            .iter()
            .zip(&gs)
            .map(|(xq, gq)| {
                y.iter()
                    .zip(xq)
                    .zip(gq)
                    .map(|((yi, xi), gi)| (yi - xi) * gi)
                    .sum::<f64>()
            })
            .sum();
        let rhs = eta * dual_sum + (bar.value(&y).unwrap() - phi_x1) / eta;
        worst_slack = worst_slack.max(lhs - rhs);
    }
    (
        worst_slack <= 1e-6,
        format!("max (lhs - rhs) = {worst_slack:.3e} over comparators (tol 1e-6)"),
    )
}

// ---------------------------------------------------------------------------
// distributions suite

pub fn distributions_suite(seed: u64) -> SuiteReport {
    let checks = vec![
        check("scale-ks-statistic", || z_ks(seed)),
        check("scale-mean", || z_mean_check(seed)),
        check("exploration-coordinate-frequencies", || coord_freq(seed)),
        check("sphere-norm-and-symmetry", || sphere_checks(seed)),
        check("block-round-uniformity", || block_round_uniformity(seed)),
        check("stream-determinism", || stream_determinism(seed)),
    ];
    SuiteReport {
        suite: "distributions".into(),
        checks,
    }
}

fn z_ks(seed: u64) -> (bool, String) {
    let mut s = RandomStream::for_run(seed, 201);
    let n = 100_000;
    let mut zs: Vec<f64> = (0..n).map(|_| s.scale_z()).collect();
    zs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut ks = 0.0f64;
    for (i, &z) in zs.iter().enumerate() {
        let f = z_cdf(z);
        ks = ks
            .max((f - i as f64 / n as f64).abs())
            .max(((i + 1) as f64 / n as f64 - f).abs());
    }
    (ks <= 0.01, format!("KS statistic {ks:.4} at n = 1e5 (tol 0.01)"))
}

fn z_mean_check(seed: u64) -> (bool, String) {
    let mut s = RandomStream::for_run(seed, 202);
    let n = 100_000;
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for _ in 0..n {
        let z = s.scale_z();
        sum += z;
        sumsq += z * z;
    }
    let mean = sum / n as f64;
    let var = sumsq / n as f64 - mean * mean;
    let se = (var / n as f64).sqrt();
    let dev = (mean - z_mean()).abs();
    (
        dev <= 3.0 * se,
        format!("mean {mean:.6} vs {:.6}, |dev| = {:.2}se", z_mean(), dev / se),
    )
}

fn coord_freq(seed: u64) -> (bool, String) {
    let mut s = RandomStream::for_run(seed, 203);
    let d = 4;
    let n = 100_000;
    let mut counts = vec![0usize; d + 1];
    for _ in 0..n {
        match s.exploration_coordinate(d) {
            None => counts[0] += 1,
            Some(i) => counts[i + 1] += 1,
        }
    }
    let se0 = (0.25f64 / n as f64).sqrt();
    let zero_ok = (counts[0] as f64 / n as f64 - 0.5).abs() <= 3.0 * se0;
    let p = 1.0 / (2.0 * d as f64);
    let se = (p * (1.0 - p) / n as f64).sqrt();
    let basis_ok = counts[1..]
        .iter()
        .all(|&c| (c as f64 / n as f64 - p).abs() <= 3.0 * se);
    (
        zero_ok && basis_ok,
        format!("zero freq {:.4}; basis freqs {:?}", counts[0] as f64 / n as f64,
            counts[1..].iter().map(|&c| c as f64 / n as f64).collect::<Vec<_>>()),
    )
}

fn sphere_checks(seed: u64) -> (bool, String) {
    let mut s = RandomStream::for_run(seed, 204);
    let mut worst_norm = 0.0f64;
    for _ in 0..5000 {
        let v = s.unit_sphere(5);
        worst_norm = worst_norm.max((linalg::norm2(&v) - 1.0).abs());
    }
    let n = 100_000;
    let mut sums = [0.0f64; 3];
    for _ in 0..n {
        let v = s.unit_sphere(3);
        for (a, b) in sums.iter_mut().zip(&v) {
            *a += b;
        }
    }
    let se = (1.0f64 / 3.0 / n as f64).sqrt();
    let sym_ok = sums.iter().all(|a| (a / n as f64).abs() <= 3.0 * se);
    let mut pos = 0usize;
    for _ in 0..n {
        if s.unit_sphere(1)[0] > 0.0 {
            pos += 1;
        }
    }
    let sign_ok = (pos as f64 / n as f64 - 0.5).abs() <= 3.0 * (0.25f64 / n as f64).sqrt();
    (
        worst_norm <= 1e-12 && sym_ok && sign_ok,
        format!(
            "max |norm-1| {worst_norm:.1e}; d=3 means {:?}; d=1 pos freq {:.4}",
            sums.iter().map(|a| a / n as f64).collect::<Vec<_>>(),
            pos as f64 / n as f64
        ),
    )
}

fn block_round_uniformity(seed: u64) -> (bool, String) {
    let mut s = RandomStream::for_run(seed, 205);
    let n = 100_000;
    let mut counts = [0usize; 4];
    for _ in 0..n {
        counts[s.block_round(1000, 4) - 1000] += 1;
    }
    let se = (0.25 * 0.75 / n as f64).sqrt();
    let ok = counts
        .iter()
        .all(|&c| (c as f64 / n as f64 - 0.25).abs() <= 3.0 * se);
    (ok, format!("frequencies {:?}", counts.map(|c| c as f64 / n as f64)))
}

fn stream_determinism(seed: u64) -> (bool, String) {
    let mut a = RandomStream::for_run(seed, 206);
    let mut b = RandomStream::for_run(seed, 206);
    let mut same = true;
    for _ in 0..10_000 {
        same &= a.uniform().to_bits() == b.uniform().to_bits();
    }
    let va = a.unit_sphere(7);
    let vb = b.unit_sphere(7);
    same &= va == vb;
    (same, "equal seeds give bit-identical draw logs".into())
}

// ---------------------------------------------------------------------------
// objectives suite

pub fn objectives_suite(seed: u64) -> SuiteReport {
    let checks = vec![
        check("auxiliary-linear-identity", || aux_linear_identity(seed)),
        check("auxiliary-approximation-inequality", || aux_inequality(seed, 1000)),
        check("average-function-monotone-dr", || average_function_dr(seed)),
        check("smoothed-function-monotonicity", || smoothed_monotone(seed)),
        check("library-exchange-checks", library_exchange),
    ];
    SuiteReport {
        suite: "objectives".into(),
        checks,
    }
}

fn aux_linear_identity(seed: u64) -> (bool, String) {
    let mut s = RandomStream::for_run(seed, 301);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let w: Vec<f64> = (0..4).map(|_| 2.0 * s.uniform() - 0.5).collect();
        let f = MultilinearPolynomial::linear(&w).unwrap();
        let aux = AuxiliaryFunction::new(f.clone()).unwrap();
        let x: Vec<f64> = (0..4).map(|_| s.uniform()).collect();
        worst = worst.max((aux.value(&x) - ONE_MINUS_INV_E * f.eval(&x)).abs());
    }
    (worst <= 1e-10, format!("max |F - (1-1/e) f| = {worst:.2e} (tol 1e-10)"))
}

/// `<y - x, grad F(x)> >= (1 - 1/e) f(y) - f(x) - 1e-8` over random library
/// instances and point pairs.
pub fn aux_inequality(seed: u64, trials: usize) -> (bool, String) {
    let mut s = RandomStream::for_run(seed, 302);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..trials {
        let dims = match k % 3 {
            0 => vec![1, 1, 1],
            1 => vec![2, 1],
            _ => vec![2, 2],
        };
        let dom = ProductSimplexDomain::new(dims).unwrap();
        let f = crate::objectives::random_monotone_dr_instance(dom.total_dim(), &mut s);
        let aux = AuxiliaryFunction::new(f.clone()).unwrap();
        let x = dom.sample_uniform(&mut s);
        let y = dom.sample_uniform(&mut s);
        let g = aux.gradient(&x);
        let lhs: f64 = y
            .iter()
            .zip(&x)
            .zip(&g)
            .map(|((yi, xi), gi)| (yi - xi) * gi)
            .sum();
        let rhs = ONE_MINUS_INV_E * f.eval(&y) - f.eval(&x);
        worst = worst.max(rhs - lhs);
        if lhs < rhs - 1e-8 {
            return (false, format!("violated by {:.3e} at trial {k}", rhs - lhs));
        }
    }
    (true, format!("max (rhs - lhs) = {worst:.3e} over {trials} trials (tol 1e-8)"))
}

fn average_function_dr(seed: u64) -> (bool, String) {
    let mut s = RandomStream::for_run(seed, 303);
    for _ in 0..20 {
        let dom = ProductSimplexDomain::unit_box(3).unwrap();
        let fs: Vec<MultilinearPolynomial> = (0..4)
            .map(|_| crate::objectives::random_monotone_dr_instance(3, &mut s))
            .collect();
        let refs: Vec<&MultilinearPolynomial> = fs.iter().collect();
        let avg = MultilinearPolynomial::average(&refs).unwrap();
        let report = verify_monotone_dr(&avg, &dom, 100, &mut s);
        if !report.passed() {
            return (
                false,
                format!("average function failed with {} violations", report.violations.len()),
            );
        }
    }
    (true, "averages of monotone DR instances stay monotone DR".into())
}

/// Smoothed versions `f^H(x) = E_v[f(x + Hv)]` of monotone instances keep
/// nonnegative first differences; estimated with common random numbers, so
/// the per-sample differences are themselves nonnegative.
fn smoothed_monotone(seed: u64) -> (bool, String) {
    let mut s = RandomStream::for_run(seed, 304);
    let dom = ProductSimplexDomain::unit_box(3).unwrap();
    let bar = ProductSimplexBarrier::new(dom.clone());
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10 {
        let f = crate::objectives::random_monotone_dr_instance(3, &mut s);
        let anchor = dom.sample_interior(&mut s, 0.05);
        let metric = bar.metric(&anchor).unwrap();
        let delta = 0.3;
        let lambda = 0.2;
        let samples = 2000;
        for i in 0..3 {
            let mut diff = 0.0;
            for _ in 0..samples {
                let v = s.unit_ball(3);
                let hv = metric.dikin_apply(&v);
                let base: Vec<f64> =
                    anchor.iter().zip(&hv).map(|(a, b)| a + delta * b).collect();
                let mut raised = base.clone();
                raised[i] += lambda;
                diff += f.eval(&raised) - f.eval(&base);
            }
            let mean = diff / samples as f64;
            worst = worst.max(-mean);
            if mean < -1e-10 {
                return (false, format!("negative smoothed difference {mean:.3e}"));
            }
        }
    }
    (true, format!("min smoothed first difference >= {:.3e}", -worst))
}

fn library_exchange() -> (bool, String) {
    for n in 2..=10usize {
        let covers: Vec<Vec<usize>> = (0..n).map(|i| vec![i % 4, (i + 1) % 4]).collect();
        let g = uniform_weight_coverage(n, &covers, 4).unwrap();
        if !(g.is_monotone() && g.is_submodular()) {
            return (false, format!("coverage generator failed at n = {n}"));
        }
        let w: Vec<f64> = (0..n).map(|i| 0.4 + 0.2 * i as f64).collect();
        let c = concave_over_modular(&w, 0.6).unwrap();
        if !(c.is_monotone() && c.is_submodular()) {
            return (false, format!("concave-over-modular generator failed at n = {n}"));
        }
    }
    (true, "coverage and concave-over-modular pass exchange checks for n <= 10".into())
}

// ---------------------------------------------------------------------------
// estimators suite

/// The fixed verification instance `f(x) = x1 + x2 - x1 x2` on the unit
/// square, with its exact constants.
pub struct EstimatorFixture {
    pub domain: ProductSimplexDomain,
    pub barrier: ProductSimplexBarrier,
    pub objective: MultilinearPolynomial,
    pub aux: AuxiliaryFunction,
    pub anchor: Vec<f64>,
    pub l1: f64,
    pub diameter: f64,
    pub bound: f64,
}

impl EstimatorFixture {
    pub fn new() -> Self {
        let domain = ProductSimplexDomain::unit_box(2).unwrap();
        let barrier = ProductSimplexBarrier::new(domain.clone());
        let objective =
            MultilinearPolynomial::new(2, [(0b01, 1.0), (0b10, 1.0), (0b11, -1.0)]).unwrap();
        let aux = AuxiliaryFunction::new(objective.clone()).unwrap();
        let l1 = objective.lipschitz_l1().unwrap();
        Self {
            domain,
            barrier,
            objective,
            aux,
            anchor: vec![0.30, 0.45],
            l1,
            diameter: 2.0f64.sqrt(),
            bound: 1.0,
        }
    }
}

impl Default for EstimatorFixture {
    fn default() -> Self {
        Self::new()
    }
}

/// Componentwise Monte-Carlo summary.
struct McMean {
    mean: Vec<f64>,
    se: Vec<f64>,
}

fn mc_summary(sum: &[f64], sumsq: &[f64], n: usize) -> McMean {
    let nf = n as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / nf).collect();
    let se = sumsq
        .iter()
        .zip(&mean)
        .map(|(sq, m)| ((sq / nf - m * m).max(0.0) / nf).sqrt())
        .collect();
    McMean { mean, se }
}

pub struct UnbiasednessOutcome {
    pub max_sigma: f64,
    pub bound_violations: usize,
    pub draws: usize,
}

/// Monte-Carlo unbiasedness of the coordinate-masked estimator against the
/// quadrature oracle, plus the per-draw dual-norm bound
/// `d^2 l^2 <= 4 (1-1/e)^2 L1^2 D^2 d^4`.
pub fn mlsm_unbiasedness(seed: u64, draws: usize) -> Result<UnbiasednessOutcome> {
    let fx = EstimatorFixture::new();
    let metric = fx.barrier.metric(&fx.anchor)?;
    let oracle = fx.aux.gradient(&fx.anchor);
    let d = 2.0f64;
    let bound = 4.0 * ONE_MINUS_INV_E.powi(2) * fx.l1.powi(2) * fx.diameter.powi(2) * d.powi(4);
    let mut stream = RandomStream::for_run(seed, 401);
    let mut sum = vec![0.0; 2];
    let mut sumsq = vec![0.0; 2];
    let mut violations = 0usize;
    for _ in 0..draws {
        let trace = mlsm_propose(&metric, &fx.domain, &mut stream)?;
        let reward = fx.objective.eval(&trace.action);
        let est = mlsm_ingest(trace, reward);
        if (d * est.scalar).powi(2) > bound * (1.0 + 1e-9) {
            violations += 1;
        }
        for i in 0..2 {
            sum[i] += est.gradient[i];
            sumsq[i] += est.gradient[i] * est.gradient[i];
        }
    }
    let mc = mc_summary(&sum, &sumsq, draws);
    let max_sigma = mc
        .mean
        .iter()
        .zip(&mc.se)
        .zip(&oracle)
        .map(|((m, se), o)| (m - o).abs() / se)
        .fold(0.0f64, f64::max);
    Ok(UnbiasednessOutcome {
        max_sigma,
        bound_violations: violations,
        draws,
    })
}

/// Unbiasedness of the product-simplex estimator (both branches) against the
/// same oracle, plus the per-draw magnitude bound `|l| <= 4 (1-1/e) d M`.
pub fn ps_unbiasedness(seed: u64, draws: usize) -> Result<UnbiasednessOutcome> {
    let fx = EstimatorFixture::new();
    let metric = fx.barrier.metric(&fx.anchor)?;
    let oracle = fx.aux.gradient(&fx.anchor);
    let d = 2.0f64;
    let bound = 4.0 * ONE_MINUS_INV_E * d * fx.bound;
    let mut stream = RandomStream::for_run(seed, 402);
    let mut sum = vec![0.0; 2];
    let mut sumsq = vec![0.0; 2];
    let mut violations = 0usize;
    for _ in 0..draws {
        let trace = ps_propose(&metric, &fx.domain, &mut stream)?;
        let reward = fx.objective.eval(&trace.action);
        let est = ps_ingest(trace, reward);
        if est.scalar.abs() > bound * (1.0 + 1e-9) {
            violations += 1;
        }
        for i in 0..2 {
            sum[i] += est.gradient[i];
            sumsq[i] += est.gradient[i] * est.gradient[i];
        }
    }
    let mc = mc_summary(&sum, &sumsq, draws);
    let max_sigma = mc
        .mean
        .iter()
        .zip(&mc.se)
        .zip(&oracle)
        .map(|((m, se), o)| (m - o).abs() / se)
        .fold(0.0f64, f64::max);
    Ok(UnbiasednessOutcome {
        max_sigma,
        bound_violations: violations,
        draws,
    })
}

/// Unbiasedness of the smoothed estimator against a nested Monte-Carlo
/// oracle: the ball average of exact quadrature gradients, with its own
/// confidence interval folded into the tolerance. Also checks the per-draw
/// dual-norm bound `d^2 l^2 <= (1-e)^2 d^2 L1^2 D^2 / delta^2`.
pub fn drsm_unbiasedness(seed: u64, draws: usize) -> Result<UnbiasednessOutcome> {
    let fx = EstimatorFixture::new();
    let metric = fx.barrier.metric(&fx.anchor)?;
    let delta = 0.5;
    let d = 2.0f64;
    let e = std::f64::consts::E;
    let bound = (1.0 - e).powi(2) * d * d * fx.l1.powi(2) * fx.diameter.powi(2) / (delta * delta);

    // Oracle: E_w[grad_aux(anchor + delta H w)] over the unit ball.
    let mut oracle_stream = RandomStream::for_run(seed, 403);
    let mut osum = vec![0.0; 2];
    let mut osumsq = vec![0.0; 2];
    let oracle_draws = draws;
    for _ in 0..oracle_draws {
        let w = oracle_stream.unit_ball(2);
        let hw = metric.dikin_apply(&w);
        let p: Vec<f64> = fx
            .anchor
            .iter()
            .zip(&hw)
            .map(|(a, b)| a + delta * b)
            .collect();
        let g = fx.aux.gradient(&p);
        for i in 0..2 {
            osum[i] += g[i];
            osumsq[i] += g[i] * g[i];
        }
    }
    let oracle = mc_summary(&osum, &osumsq, oracle_draws);

    let mut stream = RandomStream::for_run(seed, 404);
    let mut sum = vec![0.0; 2];
    let mut sumsq = vec![0.0; 2];
    let mut violations = 0usize;
    for _ in 0..draws {
        let trace = drsm_propose(&metric, &fx.domain, delta, &mut stream)?;
        let reward = fx.objective.eval(&trace.action);
        let est = drsm_ingest(trace, reward);
        if (d * est.scalar).powi(2) > bound * (1.0 + 1e-9) {
            violations += 1;
        }
        for i in 0..2 {
            sum[i] += est.gradient[i];
            sumsq[i] += est.gradient[i] * est.gradient[i];
        }
    }
    let mc = mc_summary(&sum, &sumsq, draws);
    let max_sigma = (0..2)
        .map(|i| {
            let combined = (mc.se[i].powi(2) + oracle.se[i].powi(2)).sqrt();
            (mc.mean[i] - oracle.mean[i]).abs() / combined
        })
        .fold(0.0f64, f64::max);
    Ok(UnbiasednessOutcome {
        max_sigma,
        bound_violations: violations,
        draws,
    })
}

pub fn estimators_suite(seed: u64) -> SuiteReport {
    let draws = 200_000;
    let checks = vec![
        check("mlsm-unbiasedness-and-dual-bound", || {
            match mlsm_unbiasedness(seed, draws) {
                Ok(o) => (
                    o.max_sigma <= 3.0 && o.bound_violations == 0,
                    format!(
                        "max deviation {:.2} se over {} draws; {} bound violations",
                        o.max_sigma, o.draws, o.bound_violations
                    ),
                ),
                Err(e) => (false, e.to_string()),
            }
        }),
        check("ps-unbiasedness-and-magnitude-bound", || {
            match ps_unbiasedness(seed, draws) {
                Ok(o) => (
                    o.max_sigma <= 3.0 && o.bound_violations == 0,
                    format!(
                        "max deviation {:.2} se over {} draws; {} bound violations",
                        o.max_sigma, o.draws, o.bound_violations
                    ),
                ),
                Err(e) => (false, e.to_string()),
            }
        }),
        check("drsm-unbiasedness-and-dual-bound", || {
            match drsm_unbiasedness(seed, draws) {
                Ok(o) => (
                    o.max_sigma <= 3.0 && o.bound_violations == 0,
                    format!(
                        "max deviation {:.2} combined se over {} draws; {} bound violations",
                        o.max_sigma, o.draws, o.bound_violations
                    ),
                ),
                Err(e) => (false, e.to_string()),
            }
        }),
        check("estimate-reconstruction", || estimate_reconstruction(seed)),
        check("proposal-membership", || proposal_membership(seed)),
    ];
    SuiteReport {
        suite: "estimators".into(),
        checks,
    }
}

fn estimate_reconstruction(seed: u64) -> (bool, String) {
    let dom = ProductSimplexDomain::new(vec![2, 2]).unwrap();
    let bar = ProductSimplexBarrier::new(dom.clone());
    let mut s = RandomStream::for_run(seed, 405);
    for k in 0..1000 {
        let x = dom.sample_interior(&mut s, 1e-3);
        let metric = bar.metric(&x).unwrap();
        let est = match k % 3 {
            0 => mlsm_ingest(mlsm_propose(&metric, &dom, &mut s).unwrap(), s.uniform()),
            1 => ps_ingest(ps_propose(&metric, &dom, &mut s).unwrap(), s.uniform()),
            _ => drsm_ingest(
                drsm_propose(&metric, &dom, 0.6, &mut s).unwrap(),
                s.uniform(),
            ),
        };
        let d = est.gradient.len() as f64;
        for (g, h) in est.gradient.iter().zip(&est.trace.hinv_v) {
            if g.to_bits() != (d * est.scalar * h).to_bits() {
                return (false, format!("reconstruction mismatch at draw {k}"));
            }
        }
    }
    (true, "all estimates reconstruct as d * scalar * Hinv v bit-exactly".into())
}

fn proposal_membership(seed: u64) -> (bool, String) {
    let dom = ProductSimplexDomain::new(vec![3, 3]).unwrap();
    let bar = ProductSimplexBarrier::new(dom.clone());
    let mut s = RandomStream::for_run(seed, 406);
    let mut inside = 0usize;
    let total = 10_000;
    let mut clamped = 0usize;
    for k in 0..total {
        let x = dom.sample_interior(&mut s, 1e-4);
        let metric = bar.metric(&x).unwrap();
        let trace = match k % 3 {
            0 => mlsm_propose(&metric, &dom, &mut s),
            1 => ps_propose(&metric, &dom, &mut s),
            _ => drsm_propose(&metric, &dom, 0.9, &mut s),
        };
        if let Ok(t) = trace {
            if dom.contains(&t.action) {
                inside += 1;
            }
            if t.clamped {
                clamped += 1;
            }
        }
    }
    (
        inside == total,
        format!("{inside}/{total} proposals inside the domain ({clamped} clamped steps)"),
    )
}

// ---------------------------------------------------------------------------
// reductions suite

pub fn reductions_suite(seed: u64) -> SuiteReport {
    let checks = vec![
        check("pm-extension-structure", || pm_extension_structure(seed)),
        check("ss-extension-structure", || ss_extension_structure(seed)),
        check("pm-coupling-identities", || pm_coupling_identities(seed)),
        check("vertex-point-masses", || vertex_point_masses(seed)),
        check("wrapper-estimate-magnitude", || wrapper_estimate_magnitude(seed)),
    ];
    SuiteReport {
        suite: "reductions".into(),
        checks,
    }
}

/// Named small partition-matroid instances with enumerable extensions.
fn pm_test_instances() -> Vec<(PartitionExtension, SetFunction)> {
    let mut out = Vec::new();
    let m1 = PartitionMatroid::new(vec![vec![0, 1], vec![2, 3]], vec![1, 1]).unwrap();
    let g1 = coverage(4, &[vec![0], vec![0, 1], vec![1, 2], vec![2]], &[0.5, 0.8, 0.7]).unwrap();
    out.push((PartitionExtension::new(m1).unwrap(), g1));
    let m2 = PartitionMatroid::cardinality(4, 2).unwrap();
    let g2 = concave_over_modular(&[0.9, 0.5, 0.7, 0.3], 0.5).unwrap();
    out.push((PartitionExtension::new(m2).unwrap(), g2));
    let m3 = PartitionMatroid::new(vec![vec![0, 1, 2], vec![3, 4]], vec![1, 1]).unwrap();
    let g3 = coverage(
        5,
        &[vec![0], vec![1], vec![0, 1], vec![2], vec![1, 2]],
        &[0.6, 0.9, 0.5],
    )
    .unwrap();
    out.push((PartitionExtension::new(m3).unwrap(), g3));
    out
}

/// Structure checks shared by both extension families.
#[allow(clippy::too_many_arguments)]
fn extension_structure_checks(
    label: &str,
    domain: &ProductSimplexDomain,
    poly: &MultilinearPolynomial,
    bound: f64,
    l1_bound: f64,
    sample_mean: impl Fn(&[f64], usize, &mut RandomStream) -> (f64, f64),
    exact_at: impl Fn(&[f64]) -> f64,
    stream: &mut RandomStream,
) -> std::result::Result<(), String> {
    let origin = vec![0.0; domain.total_dim()];
    if poly.eval(&origin).abs() > 1e-12 {
        return Err(format!("{label}: f(0) = {} != 0", poly.eval(&origin)));
    }
    let report = verify_monotone_dr(poly, domain, 1000, stream);
    if !report.passed() {
        return Err(format!(
            "{label}: {} monotone/DR violations",
            report.violations.len()
        ));
    }
    let sup = poly.gradient_sup_norm().map_err(|e| e.to_string())?;
    if sup > bound + 1e-9 {
        return Err(format!("{label}: gradient sup norm {sup} exceeds M = {bound}"));
    }
    let l1 = poly.lipschitz_l1().map_err(|e| e.to_string())?;
    if l1 > l1_bound + 1e-9 {
        return Err(format!("{label}: L1 = {l1} exceeds declared bound {l1_bound}"));
    }
    // Sampler and exact extension agree within 3 standard errors.
    for _ in 0..3 {
        let x = domain.sample_uniform(stream);
        let exact = exact_at(&x);
        let (mean, se) = sample_mean(&x, 40_000, stream);
        if (mean - exact).abs() > 3.0 * se.max(1e-9) {
            return Err(format!(
                "{label}: sampler mean {mean:.5} vs exact {exact:.5} (se {se:.2e})"
            ));
        }
    }
    Ok(())
}

fn pm_extension_structure(seed: u64) -> (bool, String) {
    let mut s = RandomStream::for_run(seed, 501);
    for (idx, (ext, g)) in pm_test_instances().into_iter().enumerate() {
        let poly = match ext.extension_polynomial(&g) {
            Ok(p) => p,
            Err(e) => return (false, e.to_string()),
        };
        let label = format!("pm-instance-{idx}");
        let res = extension_structure_checks(
            &label,
            ext.domain(),
            &poly,
            g.bound(),
            ext.lipschitz_bound(g.bound()),
            |x, n, stream| {
                let mut sum = 0.0;
                let mut sumsq = 0.0;
                for _ in 0..n {
                    let v = g.value(ext.sample(x, stream));
                    sum += v;
                    sumsq += v * v;
                }
                let mean = sum / n as f64;
                let var = (sumsq / n as f64 - mean * mean).max(0.0);
                (mean, (var / n as f64).sqrt())
            },
            |x| ext.exact_extension(&g, x).unwrap(),
            &mut s,
        );
        if let Err(msg) = res {
            return (false, msg);
        }
    }
    (true, "all partition-matroid extensions pass structure checks".into())
}

fn ss_test_instances() -> Vec<(OrderedListExtension, SequentialObjective)> {
    let mut out = Vec::new();
    // |G| = 3, dummy 2: two real products.
    let space = OrderedListSpace::new(3, 2).unwrap();
    let g1 = SetFunction::from_oracle(3, 1.0, |s| {
        if s & 0b01 != 0 {
            1.0
        } else if s & 0b10 != 0 {
            0.6
        } else {
            0.0
        }
    })
    .unwrap();
    let g2 = SetFunction::from_oracle(3, 1.0, |s| {
        let k = (s & 0b11).count_ones() as f64;
        (k / 2.0).sqrt()
    })
    .unwrap();
    let obj = SequentialObjective::new(
        space.clone(),
        vec![0.5, 0.3, 0.2],
        vec![g1.clone(), g2.clone(), g1.clone()],
    )
    .unwrap();
    out.push((OrderedListExtension::new(space).unwrap(), obj));
    // |G| = 4, dummy 0.
    let space2 = OrderedListSpace::new(4, 0).unwrap();
    let cov = coverage(
        4,
        &[vec![], vec![0], vec![1], vec![0, 1]],
        &[0.6, 0.4],
    )
    .unwrap();
    let obj2 = SequentialObjective::new(
        space2.clone(),
        vec![0.4, 0.3, 0.2, 0.1],
        vec![cov.clone(), cov.clone(), cov.clone(), cov],
    )
    .unwrap();
    out.push((OrderedListExtension::new(space2).unwrap(), obj2));
    out
}

fn ss_extension_structure(seed: u64) -> (bool, String) {
    let mut s = RandomStream::for_run(seed, 502);
    for (idx, (ext, g)) in ss_test_instances().into_iter().enumerate() {
        let poly = match ext.extension_polynomial(&g) {
            Ok(p) => p,
            Err(e) => return (false, e.to_string()),
        };
        let label = format!("ss-instance-{idx}");
        let res = extension_structure_checks(
            &label,
            ext.domain(),
            &poly,
            g.bound(),
            ext.lipschitz_bound(g.bound()),
            |x, n, stream| {
                let mut sum = 0.0;
                let mut sumsq = 0.0;
                for _ in 0..n {
                    let v = g.value(&ext.sample(x, stream));
                    sum += v;
                    sumsq += v * v;
                }
                let mean = sum / n as f64;
                let var = (sumsq / n as f64 - mean * mean).max(0.0);
                (mean, (var / n as f64).sqrt())
            },
            |x| ext.exact_extension(&g, x).unwrap(),
            &mut s,
        );
        if let Err(msg) = res {
            return (false, msg);
        }
    }
    (true, "all ordered-list extensions pass structure checks".into())
}

/// The coordinate-raised and coordinate-zeroed evaluations of the exact
/// extension match the coupled-outcome enumeration oracles exactly.
fn pm_coupling_identities(seed: u64) -> (bool, String) {
    let mut s = RandomStream::for_run(seed, 503);
    let (ext, g) = pm_test_instances().swap_remove(0);
    let domain = ext.domain().clone();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x = domain.sample_uniform(&mut s);
        for sim in 0..domain.num_blocks() {
            let block_id = sim; // simplexes are (block, copy) pairs in order
            let elements: Vec<usize> = ext.matroid().blocks()[ext_simplex_block(&ext, block_id)]
                .to_vec();
            for &e in &elements {
                let coord = ext.coordinate(sim, e);
                // Raised point: coordinate takes the residual mass of its simplex.
                let mut raised = x.clone();
                let others: f64 = domain.block_range(sim).map(|j| x[j]).sum::<f64>() - x[coord];
                raised[coord] = 1.0 - others;
                let lhs_up = ext.exact_extension(&g, &raised).unwrap();
                let rhs_up = ext.raised_coupling_expectation(&g, &x, sim, e).unwrap();
                worst = worst.max((lhs_up - rhs_up).abs());
                // Zeroed point.
                let mut zeroed = x.clone();
                zeroed[coord] = 0.0;
                let lhs_dn = ext.exact_extension(&g, &zeroed).unwrap();
                let rhs_dn = ext.zeroed_coupling_expectation(&g, &x, sim, e).unwrap();
                worst = worst.max((lhs_dn - rhs_dn).abs());
            }
        }
    }
    (worst <= 1e-12, format!("max coupling mismatch {worst:.2e} (tol 1e-12)"))
}

// The simplexes of a PartitionExtension enumerate blocks in order with
// capacity-many copies; for the suite instances every capacity is one, so the
// simplex index equals the block index.
fn ext_simplex_block(_ext: &PartitionExtension, sim: usize) -> usize {
    sim
}

fn vertex_point_masses(seed: u64) -> (bool, String) {
    let mut s = RandomStream::for_run(seed, 504);
    let (ext, g) = pm_test_instances().swap_remove(0);
    for set in ext.matroid().feasible_sets().unwrap() {
        let x = ext.vertex_of(&set);
        for _ in 0..50 {
            if ext.sample(&x, &mut s) != set {
                return (false, format!("vertex of {set:#b} is not a point mass"));
            }
        }
        let exact = ext.exact_extension(&g, &x).unwrap();
        if (exact - g.value(set)).abs() > 1e-12 {
            return (false, format!("vertex value mismatch at {set:#b}"));
        }
    }
    (true, "every feasible set has a point-mass vertex".into())
}

/// Every block estimate in a wrapper run obeys `|l| <= 4 (1-1/e) d M`.
fn wrapper_estimate_magnitude(seed: u64) -> (bool, String) {
    let (ext, g) = pm_test_instances().swap_remove(0);
    let env = SetBandit::new(ObliviousSequence::constant(g.clone()), 4000).unwrap();
    let barrier = ProductSimplexBarrier::new(ext.domain().clone());
    let params = LearnerParams::explicit(0.02, 4, None).unwrap();
    let mut stream = RandomStream::for_run(seed, 505);
    let hist = match run_mlsm_wrapper(&ext, &barrier, &env, &params, &mut stream) {
        Ok(h) => h,
        Err(e) => return (false, e.to_string()),
    };
    let d = ext.domain().total_dim() as f64;
    let m = g.bound();
    let bound = 4.0 * ONE_MINUS_INV_E * d * m;
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for b in &hist.blocks {
        if let Some(est) = &b.estimate {
            worst = worst.max(est.scalar.abs());
            checked += 1;
        }
    }
    (
        worst <= bound * (1.0 + 1e-9),
        format!("max |scalar| {worst:.3} vs bound {bound:.3} over {checked} estimates"),
    )
}
