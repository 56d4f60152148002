//! Experiment harness for the bandit DR-submodular toolkit.
//!
//! Subcommands: `run <config>`, `verify <suite>`, `plot [--loglog] <csv...>
//! -o <file>`, `sweep <config> --horizons <list>`. Exit codes: 0 success,
//! 1 runtime failure, 2 usage or config error.

mod config;
mod plot;
mod runner;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mlsm::environments::fit_loglog_slope;
use mlsm::error::Error;
use mlsm::report::{parse_run_csv, summary_csv, SUMMARY_CSV_HEADER};

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "mlsm", version, about = "Bandit DR-submodular maximization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute every (config, seed) run and write CSVs plus a summary.
    Run {
        /// Path to a TOML experiment config.
        config: PathBuf,
    },
    /// Run a numerical property suite
    /// (barrier | distributions | objectives | estimators | reductions | all).
    Verify {
        suite: String,
        /// Seed for the suite's deterministic sampling.
        #[arg(long, default_value_t = 1234)]
        seed: u64,
    },
    /// Draw cumulative-regret curves (or a sweep summary) as an SVG.
    Plot {
        /// Run CSVs or a summary CSV.
        csvs: Vec<PathBuf>,
        /// Output SVG path.
        #[arg(short, long)]
        output: PathBuf,
        /// Log-log axes with fitted slopes.
        #[arg(long)]
        loglog: bool,
    },
    /// Run a config across a list of horizons and fit the regret slope.
    Sweep {
        config: PathBuf,
        /// Comma-separated horizons, e.g. 4096,8192,16384.
        #[arg(long, value_delimiter = ',', required = true)]
        horizons: Vec<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config } => cmd_run(&config),
        Command::Verify { suite, seed } => cmd_verify(&suite, seed),
        Command::Plot { csvs, output, loglog } => cmd_plot(&csvs, &output, loglog),
        Command::Sweep { config, horizons } => cmd_sweep(&config, &horizons),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err.downcast_ref::<Error>() {
                Some(Error::Config(_)) | Some(Error::Parameter(_)) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn load_config(path: &PathBuf) -> anyhow::Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg = ExperimentConfig::from_toml(&text)?;
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_run(path: &PathBuf) -> anyhow::Result<ExitCode> {
    let cfg = load_config(path)?;
    let dir = runner::resolve_output_dir(&cfg);
    let rows = runner::run_config_into(&cfg, &dir)?;
    for r in &rows {
        println!(
            "seed {:>4}  T {:>8}  final cumulative alpha-regret {:>14.4}  mean reward {:.4}",
            r.seed, r.horizon, r.final_cum_alpha_regret, r.mean_reward
        );
    }
    println!("wrote {} run file(s) and summary.csv under {}", rows.len(), dir.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(suite: &str, seed: u64) -> anyhow::Result<ExitCode> {
    let reports = mlsm::verify::run_suite(suite, seed)?;
    let mut all_ok = true;
    for suite_report in &reports {
        println!("suite {}", suite_report.suite);
        for c in &suite_report.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            println!("  {status}  {:<42} {} [{:.2}s]", c.name, c.details, c.seconds);
            all_ok &= c.passed;
        }
    }
    Ok(if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_plot(csvs: &[PathBuf], output: &PathBuf, loglog: bool) -> anyhow::Result<ExitCode> {
    if csvs.is_empty() {
        return Err(Error::Config("plot needs at least one CSV".into()).into());
    }
    let mut series = Vec::new();
    let mut is_summary = false;
    for path in csvs {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let label = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        if text.starts_with(SUMMARY_CSV_HEADER) {
            is_summary = true;
            series.push(plot::Series {
                label,
                points: parse_summary_points(&text)?,
            });
        } else {
            let rows = parse_run_csv(&text)?;
            series.push(plot::Series {
                label,
                points: rows
                    .iter()
                    .map(|r| (r.round as f64, r.cum_alpha_regret))
                    .collect(),
            });
        }
    }
    let (x_label, y_label) = if is_summary {
        ("T", "final cumulative alpha-regret")
    } else {
        ("round", "cumulative alpha-regret")
    };
    let (svg, slopes) = plot::render(&series, x_label, y_label, loglog)?;
    fs::write(output, svg)
        .map_err(|e| Error::Config(format!("cannot write {}: {e}", output.display())))?;
    for (s, slope) in series.iter().zip(&slopes) {
        if let Some(sl) = slope {
            println!("{}: fitted log-log slope {:.4}", s.label, sl);
        }
    }
    println!("wrote {}", output.display());
    Ok(ExitCode::SUCCESS)
}

/// Summary CSVs plot mean final regret per horizon.
fn parse_summary_points(text: &str) -> anyhow::Result<Vec<(f64, f64)>> {
    use std::collections::BTreeMap;
    let mut per_t: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Config(format!(
                "summary row {}: expected 4 fields, got {}",
                lineno + 1,
                fields.len()
            ))
            .into());
        }
        let t: u64 = fields[1].parse().map_err(|_| {
            Error::Config(format!("summary row {}: bad T `{}`", lineno + 1, fields[1]))
        })?;
        let regret: f64 = fields[2].parse().map_err(|_| {
            Error::Config(format!(
                "summary row {}: bad final_cum_alpha_regret `{}`",
                lineno + 1,
                fields[2]
            ))
        })?;
        let e = per_t.entry(t).or_insert((0.0, 0));
        e.0 += regret;
        e.1 += 1;
    }
    Ok(per_t
        .into_iter()
        .map(|(t, (sum, n))| (t as f64, sum / n as f64))
        .collect())
}

fn cmd_sweep(path: &PathBuf, horizons: &[usize]) -> anyhow::Result<ExitCode> {
    let base = load_config(path)?;
    let dir = runner::resolve_output_dir(&base);
    let mut all_rows = Vec::new();
    let mut curve = Vec::new();
    for &t in horizons {
        let mut cfg = base.clone();
        cfg.run.horizon = t;
        let sub = dir.join(format!("T{t}"));
        let rows = runner::run_config_into(&cfg, &sub)?;
        let mean_final: f64 =
            rows.iter().map(|r| r.final_cum_alpha_regret).sum::<f64>() / rows.len() as f64;
        println!("T {t:>8}: mean final cumulative alpha-regret {mean_final:.4}");
        curve.push((t as f64, mean_final));
        all_rows.extend(rows);
    }
    fs::create_dir_all(&dir)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    fs::write(dir.join("sweep_summary.csv"), summary_csv(&all_rows))
        .map_err(|e| Error::Config(format!("cannot write sweep_summary.csv: {e}")))?;
    match fit_loglog_slope(&curve) {
        Ok(slope) => println!("log-log slope of mean final regret vs T: {slope:.4}"),
        Err(e) => println!("slope fit unavailable: {e}"),
    }
    println!("wrote sweep_summary.csv under {}", dir.display());
    Ok(ExitCode::SUCCESS)
}
