//! Seeded experiment execution and file output.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use mlsm::environments::{
    compute_alpha_regret, mean_rewards, offline_optimum_continuous, offline_optimum_discrete,
    realized_rewards, OfflineOptimum, StochasticSetBandit, DEFAULT_ALPHA,
};
use mlsm::error::{Error, Result};
use mlsm::geometry::ProductSimplexBarrier;
use mlsm::learners::{run_bandit_drsm, run_bandit_mlsm, run_bandit_mlsm4ps};
use mlsm::reductions::{run_mlsm_wrapper, ExtensionMapping};
use mlsm::report::{run_csv, summary_csv, SummaryRow};
use mlsm::sampling::RandomStream;

use crate::config::{build, BuiltExperiment, ExperimentConfig};

pub struct SeedArtifacts {
    pub summary: SummaryRow,
    /// `(file name, contents)` pairs.
    pub files: Vec<(String, String)>,
}

/// Runs one seed of a built experiment and renders its CSV artifacts.
pub fn run_seed(
    built: &BuiltExperiment,
    optimum: &OfflineOptimum,
    horizon: usize,
    seed: u64,
) -> Result<SeedArtifacts> {
    match built {
        BuiltExperiment::Continuous {
            domain,
            env,
            params,
            algorithm,
        } => {
            let barrier = ProductSimplexBarrier::new(domain.clone());
            let mut env = env.clone();
            let mut stream = RandomStream::for_run(seed, 0);
            let history = match algorithm.as_str() {
                "mlsm" => run_bandit_mlsm(&barrier, &mut env, params, &mut stream)?,
                "drsm" => run_bandit_drsm(&barrier, &mut env, params, &mut stream)?,
                "mlsm4ps" => run_bandit_mlsm4ps(&barrier, &mut env, params, &mut stream)?,
                other => return Err(Error::Config(format!("unknown algorithm `{other}`"))),
            };
            let regret = compute_alpha_regret(&realized_rewards(&history), optimum, DEFAULT_ALPHA)?;
            let csv = run_csv(&history, &regret)?;
            Ok(SeedArtifacts {
                summary: SummaryRow {
                    seed,
                    horizon,
                    final_cum_alpha_regret: regret.final_cumulative(),
                    mean_reward: history.mean_reward(),
                },
                files: vec![(format!("run_seed{seed}.csv"), csv)],
            })
        }
        BuiltExperiment::Discrete {
            extension,
            env,
            params,
        } => {
            let barrier = ProductSimplexBarrier::new(extension.domain().clone());
            let mut stream = RandomStream::for_run(seed, 0);
            let history = run_mlsm_wrapper(extension, &barrier, env, params, &mut stream)?;
            let regret = compute_alpha_regret(&realized_rewards(&history), optimum, DEFAULT_ALPHA)?;
            let csv = run_csv(&history, &regret)?;
            Ok(SeedArtifacts {
                summary: SummaryRow {
                    seed,
                    horizon,
                    final_cum_alpha_regret: regret.final_cumulative(),
                    mean_reward: history.mean_reward(),
                },
                files: vec![(format!("run_seed{seed}.csv"), csv)],
            })
        }
        BuiltExperiment::Stochastic {
            extension,
            components,
            probabilities,
            params,
        } => {
            let barrier = ProductSimplexBarrier::new(extension.domain().clone());
            let mut env_stream = RandomStream::for_run(seed, 1);
            let env = StochasticSetBandit::new(
                components.clone(),
                probabilities,
                horizon,
                &mut env_stream,
            )?;
            let mut stream = RandomStream::for_run(seed, 0);
            let history = run_mlsm_wrapper(extension, &barrier, &env, params, &mut stream)?;
            // Realized rewards scored against the mean benchmark, plus the
            // mean-function trace the analysis uses.
            let realized = realized_rewards(&history);
            let realized_regret = compute_alpha_regret(&realized, optimum, DEFAULT_ALPHA)?;
            let means = mean_rewards(&env, &history)?;
            let mean_regret = compute_alpha_regret(&means, optimum, DEFAULT_ALPHA)?;
            let csv = run_csv(&history, &realized_regret)?;
            let mut mean_history = history.clone();
            for (row, m) in mean_history.rounds.iter_mut().zip(&means) {
                row.reward = *m;
            }
            let mean_csv = run_csv(&mean_history, &mean_regret)?;
            Ok(SeedArtifacts {
                summary: SummaryRow {
                    seed,
                    horizon,
                    final_cum_alpha_regret: mean_regret.final_cumulative(),
                    mean_reward: history.mean_reward(),
                },
                files: vec![
                    (format!("run_seed{seed}.csv"), csv),
                    (format!("run_seed{seed}_mean.csv"), mean_csv),
                ],
            })
        }
    }
}

/// Offline benchmark of a built experiment (shared across seeds; the
/// stochastic benchmark depends only on the mixture mean).
pub fn benchmark(built: &BuiltExperiment, horizon: usize) -> Result<OfflineOptimum> {
    match built {
        BuiltExperiment::Continuous { domain, env, .. } => {
            offline_optimum_continuous(env, domain)
        }
        BuiltExperiment::Discrete { extension, env, .. } => offline_optimum_discrete(
            env,
            extension.matroid().feasible_sets()?,
            |s| format!("{s:#b}"),
        ),
        BuiltExperiment::Stochastic {
            extension,
            components,
            probabilities,
            ..
        } => {
            let mut probe = RandomStream::new(0);
            let env =
                StochasticSetBandit::new(components.clone(), probabilities, horizon, &mut probe)?;
            offline_optimum_discrete(
                &env,
                extension.matroid().feasible_sets()?,
                |s| format!("{s:#b}"),
            )
        }
    }
}

/// Runs every seed of a config into `dir`, returning the summary rows in seed
/// order. Distinct seeds execute in parallel; outputs equal serial execution.
pub fn run_config_into(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<SummaryRow>> {
    let built = build(cfg)?;
    let optimum = benchmark(&built, cfg.run.horizon)?;
    fs::create_dir_all(dir)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    // Echo the normalized config next to the results for reproducibility.
    fs::write(dir.join("config.toml"), cfg.to_toml()?)
        .map_err(|e| Error::Config(format!("cannot write config.toml: {e}")))?;
    let mut outcomes: Vec<(u64, SeedArtifacts)> = cfg
        .run
        .seeds
        .par_iter()
        .map(|&seed| {
            run_seed(&built, &optimum, cfg.run.horizon, seed).map(|a| (seed, a))
        })
        .collect::<Result<Vec<_>>>()?;
    outcomes.sort_by_key(|(seed, _)| *seed);
    let mut rows = Vec::with_capacity(outcomes.len());
    for (_, artifacts) in outcomes {
        for (name, contents) in &artifacts.files {
            fs::write(dir.join(name), contents)
                .map_err(|e| Error::Config(format!("cannot write {name}: {e}")))?;
        }
        rows.push(artifacts.summary);
    }
    fs::write(dir.join("summary.csv"), summary_csv(&rows))
        .map_err(|e| Error::Config(format!("cannot write summary.csv: {e}")))?;
    Ok(rows)
}

/// Output directory after the environment override.
pub fn resolve_output_dir(cfg: &ExperimentConfig) -> PathBuf {
    match std::env::var("MLSM_OUT_DIR") {
        Ok(dir) if !dir.is_empty() => PathBuf::from(dir),
        _ => PathBuf::from(&cfg.run.output_dir),
    }
}
