//! Quick probe of the rate scenarios: prints the mean final regret per
//! horizon and the fitted log-log slope.
//!
//! Usage: `cargo run --release -p mlsm --example rate_probe -- <scenario> <seeds> [horizons...]`

use mlsm::environments::fit_loglog_slope;
use mlsm::scenarios::{run_scenario, Scenario};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let scenario = match args.get(1).map(|s| s.as_str()) {
        Some("mlsm") => Scenario::MlsmRate,
        Some("drsm") => Scenario::DrsmRate,
        Some("wrapper") => Scenario::WrapperPmRate,
        Some("stochastic") => Scenario::StochasticRate,
        _ => {
            eprintln!("usage: rate_probe <mlsm|drsm|wrapper|stochastic> <seeds> [horizons...]");
            std::process::exit(2);
        }
    };
    let seeds: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(3);
    let horizons: Vec<usize> = if args.len() > 3 {
        args[3..].iter().map(|s| s.parse().unwrap()).collect()
    } else {
        (12..=17).map(|k| 1usize << k).collect()
    };
    let mut curve = Vec::new();
    for &t in &horizons {
        let mut finals = Vec::new();
        let mut mean_rewards = Vec::new();
        for seed in 1..=seeds {
            let run = run_scenario(scenario, t, seed).expect("scenario run");
            finals.push(run.regret.final_cumulative());
            mean_rewards.push(run.history.mean_reward());
        }
        let mean = finals.iter().sum::<f64>() / finals.len() as f64;
        let mr = mean_rewards.iter().sum::<f64>() / mean_rewards.len() as f64;
        println!(
            "T {t:>7}: mean final regret {mean:>12.3} (seeds: {finals:?}), mean reward {mr:.4}"
        );
        curve.push((t as f64, mean));
    }
    match fit_loglog_slope(&curve) {
        Ok(s) => println!("slope: {s:.4}"),
        Err(e) => println!("slope unavailable: {e}"),
    }
}
