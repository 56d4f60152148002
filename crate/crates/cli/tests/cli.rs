//! End-to-end checks of the command-line interface.

use std::fs;
use std::path::Path;
use std::process::Command;

fn mlsm_bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mlsm"))
}

const SMALL_CONFIG: &str = r#"
[run]
horizon = 600
seeds = [1, 2, 3]
output_dir = "OUTDIR"

[algorithm]
name = "mlsm"
params = "explicit"
eta = 0.02
block_len = 10

[domain]
simplex_dims = [1, 1]

[environment]
mode = "continuous"
generator = "constant"

[[environment.functions]]
kind = "multilinear"
dimension = 2
terms = [
  { vars = [0], coeff = 0.6 },
  { vars = [1], coeff = 0.4 },
  { vars = [0, 1], coeff = -0.2 },
]
"#;

fn write_config(dir: &Path, out_dir: &Path) -> std::path::PathBuf {
    let text = SMALL_CONFIG.replace("OUTDIR", out_dir.to_str().unwrap());
    let path = dir.join("exp.toml");
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_writes_one_csv_per_seed_plus_summary_and_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), &out);

    let status = mlsm_bin().arg("run").arg(&cfg).status().unwrap();
    assert!(status.success());
    for seed in 1..=3 {
        assert!(out.join(format!("run_seed{seed}.csv")).exists());
    }
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.starts_with("seed,T,final_cum_alpha_regret,mean_reward"));
    assert_eq!(summary.lines().count(), 4); // header + one row per seed

    // Byte-identical rerun.
    let first = fs::read(out.join("run_seed2.csv")).unwrap();
    let status = mlsm_bin().arg("run").arg(&cfg).status().unwrap();
    assert!(status.success());
    let second = fs::read(out.join("run_seed2.csv")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn output_dir_env_override_wins() {
    let tmp = tempfile::tempdir().unwrap();
    let ignored = tmp.path().join("ignored");
    let cfg = write_config(tmp.path(), &ignored);
    let actual = tmp.path().join("redirected");
    let status = mlsm_bin()
        .arg("run")
        .arg(&cfg)
        .env("MLSM_OUT_DIR", &actual)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(actual.join("summary.csv").exists());
    assert!(!ignored.exists());
}

#[test]
fn config_errors_exit_with_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    // Unknown key.
    let bad = tmp.path().join("bad.toml");
    fs::write(&bad, SMALL_CONFIG.replace("[run]", "[run]\nwhat = 1")).unwrap();
    let status = mlsm_bin().arg("run").arg(&bad).status().unwrap();
    assert_eq!(status.code(), Some(2));
    // Missing file.
    let status = mlsm_bin().arg("run").arg(tmp.path().join("nope.toml")).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn verify_dispatches_suites_and_rejects_unknown() {
    let out = mlsm_bin().args(["verify", "distributions"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("suite distributions"));
    assert!(text.contains("PASS"));

    let status = mlsm_bin().args(["verify", "nonsense"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn plot_draws_runs_and_rejects_empty_or_malformed_input() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), &out);
    assert!(mlsm_bin().arg("run").arg(&cfg).status().unwrap().success());

    let svg = tmp.path().join("chart.svg");
    let status = mlsm_bin()
        .arg("plot")
        .arg(out.join("run_seed1.csv"))
        .arg(out.join("run_seed2.csv"))
        .arg("-o")
        .arg(&svg)
        .status()
        .unwrap();
    assert!(status.success());
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg"));

    // No inputs.
    let status = mlsm_bin().arg("plot").arg("-o").arg(&svg).status().unwrap();
    assert_eq!(status.code(), Some(2));

    // Malformed CSV names the row.
    let broken = tmp.path().join("broken.csv");
    fs::write(
        &broken,
        "round,block,is_exploration,reward,cum_reward,cum_alpha_regret\n1,1,0,oops,0,0\n",
    )
    .unwrap();
    let output = mlsm_bin()
        .arg("plot")
        .arg(&broken)
        .arg("-o")
        .arg(&svg)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("row 2"));
}

#[test]
fn sweep_fits_a_slope_over_horizons() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let cfg = write_config(tmp.path(), &out);
    let output = mlsm_bin()
        .arg("sweep")
        .arg(&cfg)
        .args(["--horizons", "300,600,1200"])
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let text = String::from_utf8_lossy(&output.stdout);
    assert!(text.contains("log-log slope"), "{text}");
    let summary = fs::read_to_string(out.join("sweep_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 10); // header + 3 horizons x 3 seeds
    for t in [300, 600, 1200] {
        assert!(out.join(format!("T{t}")).join("summary.csv").exists());
    }

    // Log-log plot over the sweep summary prints per-series slopes.
    let svg = tmp.path().join("sweep.svg");
    let output = mlsm_bin()
        .arg("plot")
        .arg("--loglog")
        .arg(out.join("sweep_summary.csv"))
        .arg("-o")
        .arg(&svg)
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8_lossy(&output.stdout).contains("fitted log-log slope"));
}

#[test]
fn shipped_example_configs_parse_and_build() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in [
        "mlsm_rate.toml",
        "drsm_smooth.toml",
        "wrapper_pm.toml",
        "stochastic_cardinality.toml",
    ] {
        let tmp = tempfile::tempdir().unwrap();
        let text = fs::read_to_string(root.join(name)).unwrap();
        // Shrink to a fast smoke run in a scratch directory.
        let text = text
            .replace("horizon = 65536", "horizon = 400")
            .replace(
                "seeds = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10]",
                "seeds = [1]",
            )
            .replace("seeds = [1, 2, 3, 4, 5]", "seeds = [1]");
        let cfg = tmp.path().join(name);
        fs::write(&cfg, text).unwrap();
        let status = mlsm_bin()
            .arg("run")
            .arg(&cfg)
            .env("MLSM_OUT_DIR", tmp.path().join("out"))
            .status()
            .unwrap();
        assert!(status.success(), "config {name} failed");
    }
}
