//! End-to-end behavior checks on small fixed environments: reward floors for
//! the three learners, exploration-branch statistics, and the wrapper
//! against uniform random play.

use mlsm::environments::{ContinuousEnv, DiscreteBandit, ObliviousSequence, SetBandit};
use mlsm::estimators::EstimatorKind;
use mlsm::geometry::{ProductSimplexBarrier, ProductSimplexDomain};
use mlsm::learners::{
    default_params, run_bandit_drsm, run_bandit_mlsm, run_bandit_mlsm4ps, ParamPreset,
};
use mlsm::objectives::{coverage, MultilinearPolynomial};
use mlsm::reductions::{
    run_mlsm_wrapper, ExtensionMapping, ListBandit, OrderedListExtension, OrderedListSpace,
    PartitionExtension, PartitionMatroid, SequentialObjective,
};
use mlsm::sampling::{z_cdf, RandomStream};
use mlsm::scenarios::scale_block_len;

/// `f(x) = x1` on a 2-dimensional simplex; optimum 1 at the vertex.
fn simplex_setup(horizon: usize) -> (ProductSimplexBarrier, ContinuousEnv) {
    let domain = ProductSimplexDomain::simplex(2).unwrap();
    let f = MultilinearPolynomial::linear(&[1.0, 0.0]).unwrap();
    let env = ContinuousEnv::constant(f, horizon, 1.0, 1.0).unwrap();
    (ProductSimplexBarrier::new(domain), env)
}

#[test]
fn mlsm_reaches_final_quartile_floor_on_linear_simplex() {
    // Benchmark value (1 - 1/e) ~ 0.632; the learner's tail should sit well
    // above it. Averaged over ten seeds with a doubled preset step.
    let horizon = 100_000;
    let (barrier, env) = simplex_setup(horizon);
    let mut total = 0.0;
    let seeds = 10;
    for seed in 1..=seeds {
        let mut params = default_params(ParamPreset::MlsmDerived, 2, horizon, 1.0, 1.0).unwrap();
        params.eta *= 2.0;
        let mut stream = RandomStream::for_run(seed, 0);
        let hist = run_bandit_mlsm(&barrier, &mut env.clone(), &params, &mut stream).unwrap();
        total += hist.final_quartile_mean_reward();
    }
    let mean = total / seeds as f64;
    assert!(mean >= 0.80, "final-quartile mean {mean}");
}

#[test]
fn drsm_reaches_final_quartile_floor_on_linear_simplex() {
    let horizon = 100_000;
    let (barrier, env) = simplex_setup(horizon);
    let mut total = 0.0;
    let seeds = 5;
    for seed in 1..=seeds {
        let mut params = default_params(ParamPreset::DrsmDerived, 2, horizon, 1.0, 1.0).unwrap();
        params.eta *= 2.0;
        let mut stream = RandomStream::for_run(seed, 0);
        let hist = run_bandit_drsm(&barrier, &mut env.clone(), &params, &mut stream).unwrap();
        total += hist.final_quartile_mean_reward();
    }
    let mean = total / seeds as f64;
    // Looser floor than the multi-linear learner, matching its slower rate.
    assert!(mean >= 0.75, "final-quartile mean {mean}");
}

#[test]
fn mlsm4ps_matches_the_mlsm_floor_on_linear_simplex() {
    let horizon = 100_000;
    let (barrier, env) = simplex_setup(horizon);
    let mut total = 0.0;
    let seeds = 10;
    for seed in 1..=seeds {
        let mut params = default_params(ParamPreset::MlsmDerived, 2, horizon, 1.0, 1.0).unwrap();
        params.eta *= 2.0;
        let mut stream = RandomStream::for_run(seed, 0);
        let hist = run_bandit_mlsm4ps(&barrier, &mut env.clone(), &params, &mut stream).unwrap();
        total += hist.final_quartile_mean_reward();
    }
    let mean = total / seeds as f64;
    assert!(mean >= 0.80, "final-quartile mean {mean}");
}

#[test]
fn mlsm4ps_branch_fraction_matches_scale_law() {
    // With blocks of one round, every round explores; the low-scale branch
    // frequency is the CDF of the scale law at one half.
    let horizon = 10_000;
    let (barrier, env) = simplex_setup(horizon);
    let params = mlsm::learners::LearnerParams::explicit(0.01, 1, None).unwrap();
    let mut stream = RandomStream::for_run(3, 0);
    let hist = run_bandit_mlsm4ps(&barrier, &mut env.clone(), &params, &mut stream).unwrap();
    let mut low = 0usize;
    let mut blocks = 0usize;
    for b in &hist.blocks {
        if let Some(est) = &b.estimate {
            blocks += 1;
            if est.trace.kind == EstimatorKind::Mlsm4PsLowZ {
                low += 1;
            }
        }
    }
    assert_eq!(blocks, horizon);
    let p = z_cdf(0.5);
    let se = (p * (1.0 - p) / blocks as f64).sqrt();
    let freq = low as f64 / blocks as f64;
    assert!(
        (freq - p).abs() <= 3.0 * se,
        "low-scale fraction {freq} vs {p} (se {se})"
    );
}

#[test]
fn wrapper_learned_policy_beats_uniform_play_by_factor_two() {
    // Two blocks of two with one pick each; one strong element per block.
    let horizon = 50_000;
    let matroid = PartitionMatroid::new(vec![vec![0, 1], vec![2, 3]], vec![1, 1]).unwrap();
    let g = coverage(4, &[vec![0], vec![], vec![1], vec![]], &[0.9, 0.1]).unwrap();
    let ext = PartitionExtension::new(matroid).unwrap();
    let env = SetBandit::new(ObliviousSequence::constant(g.clone()), horizon).unwrap();
    let barrier = ProductSimplexBarrier::new(ext.domain().clone());
    let feasible = ext.matroid().feasible_sets().unwrap();

    // Uniform-random feasible play, realized.
    let mut uniform_stream = RandomStream::for_run(99, 2);
    let mut uniform_total = 0.0;
    for _ in 0..horizon {
        let s = feasible[uniform_stream.uniform_coordinate(feasible.len())];
        uniform_total += g.value(s);
    }
    let uniform_mean = uniform_total / horizon as f64;

    // The learned policy: expected reward of the final iterate's action
    // distribution, averaged over seeds.
    let seeds = 6;
    let mut policy_total = 0.0;
    let mut cumulative_total = 0.0;
    for seed in 1..=seeds {
        let mut params = default_params(
            ParamPreset::WrapperPs,
            ext.domain().total_dim(),
            horizon,
            ext.domain().euclidean_radius(),
            ext.lipschitz_bound(DiscreteBandit::bound(&env)),
        )
        .unwrap();
        params.eta *= 1.5;
        scale_block_len(&mut params, 1.5);
        let mut stream = RandomStream::for_run(seed, 0);
        let hist = run_mlsm_wrapper(&ext, &barrier, &env, &params, &mut stream).unwrap();
        let final_iterate = &hist.blocks.last().unwrap().iterate;
        policy_total += ext.exact_extension(&g, final_iterate).unwrap();
        cumulative_total += hist.total_reward();
    }
    let policy_mean = policy_total / seeds as f64;
    assert!(
        policy_mean >= 2.0 * uniform_mean,
        "policy value {policy_mean:.4} vs 2x uniform {:.4}",
        2.0 * uniform_mean
    );
    // The realized run itself also clearly beats uniform play.
    let learner_mean = cumulative_total / (seeds as f64 * horizon as f64);
    assert!(
        learner_mean >= 1.4 * uniform_mean,
        "run mean {learner_mean:.4} vs uniform {uniform_mean:.4}"
    );
}

#[test]
fn unique_discrete_maximizer_is_found_by_enumeration() {
    let (matroid, phases) = mlsm::scenarios::wrapper_pm_instance();
    let env = SetBandit::new(ObliviousSequence::rotation(phases).unwrap(), 100).unwrap();
    let feasible = matroid.feasible_sets().unwrap();
    let opt = mlsm::environments::offline_optimum_discrete(&env, feasible.iter().copied(), |s| {
        format!("{s:#06b}")
    })
    .unwrap();
    // The strong pair {0, 2} wins uniquely.
    let best_total = env.benchmark_total(&0b0101);
    assert!((opt.total - best_total).abs() < 1e-12);
    for &s in &feasible {
        if s != 0b0101 {
            assert!(env.benchmark_total(&s) < best_total - 1e-9);
        }
    }
}

#[test]
fn wrapper_drives_ordered_list_environments() {
    // Two positions over ground {a, dummy, b}: position payoffs prefer a
    // first, then b.
    let space = OrderedListSpace::new(3, 1).unwrap();
    let g_first = mlsm::objectives::SetFunction::from_oracle(3, 1.0, |s| {
        if s & 0b001 != 0 {
            1.0
        } else if s & 0b100 != 0 {
            0.4
        } else {
            0.0
        }
    })
    .unwrap();
    let obj = SequentialObjective::new(
        space.clone(),
        vec![0.6, 0.4, 0.0],
        vec![g_first.clone(), g_first.clone(), g_first],
    )
    .unwrap();
    let ext = OrderedListExtension::new(space.clone()).unwrap();
    let horizon = 400;
    let env = ListBandit::new(ObliviousSequence::constant(obj.clone()), horizon).unwrap();
    let barrier = ProductSimplexBarrier::new(ext.domain().clone());
    let params = mlsm::learners::LearnerParams::explicit(0.02, 8, None).unwrap();
    let mut stream = RandomStream::for_run(5, 0);
    let hist = run_mlsm_wrapper(&ext, &barrier, &env, &params, &mut stream).unwrap();
    assert_eq!(hist.rounds.len(), horizon);
    for r in &hist.rounds {
        match &r.action {
            mlsm::learners::ActionRecord::List(list) => {
                assert_eq!(list.len(), space.list_len());
                assert_eq!(r.reward, obj.value(list));
            }
            _ => panic!("list environments must record list actions"),
        }
    }
    // The exact benchmark over all lists is the best fixed list, found by
    // enumeration; the all-a-first list wins.
    let opt = mlsm::environments::offline_optimum_discrete(
        &env,
        space.all_lists().unwrap(),
        |l| format!("{l:?}"),
    )
    .unwrap();
    let best = vec![0u16, 0, 0];
    assert!((opt.total - env.benchmark_total(&best)).abs() < 1e-12);
}
