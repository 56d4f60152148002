//! Experiment configuration: a single TOML file per experiment.
//!
//! Unknown keys are rejected, and parsing then re-serializing a config is
//! idempotent, so files are diffable and safe to version.

use serde::{Deserialize, Serialize};

use mlsm::environments::{ContinuousEnv, ObliviousSequence, SetBandit, StochasticSetBandit};
use mlsm::error::{Error, Result};
use mlsm::geometry::ProductSimplexDomain;
use mlsm::learners::{default_params, LearnerParams, ParamPreset};
use mlsm::objectives::{
    concave_over_modular, coverage, modular, MultilinearPolynomial, SetFunction,
};
use mlsm::reductions::{ExtensionMapping, PartitionExtension, PartitionMatroid};
use mlsm::sampling::RandomStream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub run: RunSection,
    pub algorithm: AlgorithmSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainSection>,
    pub environment: EnvironmentSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint: Option<ConstraintSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub horizon: usize,
    pub seeds: Vec<u64>,
    pub output_dir: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgorithmSection {
    /// `mlsm`, `drsm`, or `mlsm4ps` (the wrapper drives `mlsm4ps`).
    pub name: String,
    /// `auto` (theorem preset) or `explicit`.
    #[serde(default = "default_params_mode")]
    pub params: String,
    /// Preset name when `params = "auto"`: `mlsm-derived`, `mlsm-stated`,
    /// `drsm-derived`, `drsm-stated`, or `wrapper-ps`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Multiplier applied on top of the preset step size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta_scale: Option<f64>,
    /// Multiplier applied on top of the preset block length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

fn default_params_mode() -> String {
    "auto".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub simplex_dims: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSection {
    /// `continuous`, `discrete`, or `stochastic`.
    pub mode: String,
    /// `constant`, `rotation`, or `phased`.
    #[serde(default = "default_generator")]
    pub generator: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub switch_rounds: Vec<usize>,
    pub functions: Vec<FunctionSpec>,
    /// Mixture weights (stochastic mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probabilities: Option<Vec<f64>>,
}

fn default_generator() -> String {
    "constant".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum FunctionSpec {
    /// Explicit multi-linear polynomial over `dimension` variables.
    #[serde(rename = "multilinear")]
    Multilinear { dimension: usize, terms: Vec<TermSpec> },
    /// Weighted coverage set function.
    #[serde(rename = "coverage")]
    Coverage {
        n: usize,
        covers: Vec<Vec<usize>>,
        weights: Vec<f64>,
    },
    /// `(sum of weights in S)^exponent`.
    #[serde(rename = "concave-modular")]
    ConcaveModular { weights: Vec<f64>, exponent: f64 },
    /// Additive set function.
    #[serde(rename = "modular")]
    Modular { weights: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub vars: Vec<usize>,
    pub coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
pub enum ConstraintSection {
    /// General partition matroid.
    #[serde(rename = "partition")]
    Partition {
        blocks: Vec<Vec<usize>>,
        capacities: Vec<usize>,
    },
    /// Cardinality constraint: at most `k` of `n` elements.
    #[serde(rename = "cardinality")]
    Cardinality { n: usize, k: usize },
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.run.horizon == 0 {
            return Err(Error::Config("run.horizon must be positive".into()));
        }
        if self.run.seeds.is_empty() {
            return Err(Error::Config("run.seeds must not be empty".into()));
        }
        match self.algorithm.name.as_str() {
            "mlsm" | "drsm" | "mlsm4ps" => {}
            other => {
                return Err(Error::Config(format!(
                    "unknown algorithm `{other}`; use mlsm | drsm | mlsm4ps"
                )))
            }
        }
        match self.algorithm.params.as_str() {
            "auto" | "explicit" => {}
            other => {
                return Err(Error::Config(format!(
                    "algorithm.params must be auto or explicit, got `{other}`"
                )))
            }
        }
        match self.environment.mode.as_str() {
            "continuous" => {
                if self.domain.is_none() {
                    return Err(Error::Config(
                        "continuous mode needs a [domain] section".into(),
                    ));
                }
                if self.constraint.is_some() {
                    return Err(Error::Config(
                        "continuous mode takes no [constraint] section".into(),
                    ));
                }
            }
            "discrete" | "stochastic" => {
                if self.constraint.is_none() {
                    return Err(Error::Config(format!(
                        "{} mode needs a [constraint] section",
                        self.environment.mode
                    )));
                }
                if self.domain.is_some() {
                    return Err(Error::Config(
                        "discrete modes derive the domain from the constraint".into(),
                    ));
                }
                if self.algorithm.name != "mlsm4ps" {
                    return Err(Error::Config(
                        "discrete modes run through the wrapper; set algorithm.name = \"mlsm4ps\""
                            .into(),
                    ));
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown environment mode `{other}`"
                )))
            }
        }
        match self.environment.generator.as_str() {
            "constant" | "rotation" | "phased" => {}
            other => {
                return Err(Error::Config(format!(
                    "unknown generator `{other}`; use constant | rotation | phased"
                )))
            }
        }
        if self.environment.functions.is_empty() {
            return Err(Error::Config("environment.functions must not be empty".into()));
        }
        Ok(())
    }
}

/// A fully built experiment, ready to run per seed.
pub enum BuiltExperiment {
    Continuous {
        domain: ProductSimplexDomain,
        env: ContinuousEnv,
        params: LearnerParams,
        algorithm: String,
    },
    Discrete {
        extension: PartitionExtension,
        env: SetBandit,
        params: LearnerParams,
    },
    /// Environment realization depends on the seed; rebuilt per run.
    Stochastic {
        extension: PartitionExtension,
        components: Vec<SetFunction>,
        probabilities: Vec<f64>,
        params: LearnerParams,
    },
}

fn build_set_function(spec: &FunctionSpec) -> Result<SetFunction> {
    match spec {
        FunctionSpec::Coverage { n, covers, weights } => coverage(*n, covers, weights),
        FunctionSpec::ConcaveModular { weights, exponent } => {
            concave_over_modular(weights, *exponent)
        }
        FunctionSpec::Modular { weights } => modular(weights),
        FunctionSpec::Multilinear { .. } => Err(Error::Config(
            "multilinear functions belong to continuous mode".into(),
        )),
    }
}

fn build_polynomial(spec: &FunctionSpec, dim: usize) -> Result<MultilinearPolynomial> {
    match spec {
        FunctionSpec::Multilinear { dimension, terms } => {
            if *dimension != dim {
                return Err(Error::Config(format!(
                    "function dimension {dimension} disagrees with domain dimension {dim}"
                )));
            }
            let mut masks = Vec::with_capacity(terms.len());
            for t in terms {
                let mut mask = 0u32;
                for &v in &t.vars {
                    if v >= dim {
                        return Err(Error::Config(format!(
                            "term references variable {v} outside dimension {dim}"
                        )));
                    }
                    mask |= 1 << v;
                }
                masks.push((mask, t.coeff));
            }
            MultilinearPolynomial::new(dim, masks)
        }
        // Set-function specs are usable in continuous mode through their
        // multi-linear extension over the unit box.
        other => {
            let g = build_set_function(other)?;
            if g.ground_size() != dim {
                return Err(Error::Config(format!(
                    "set function over {} elements cannot drive a {dim}-dimensional domain",
                    g.ground_size()
                )));
            }
            MultilinearPolynomial::extension_of(&g)
        }
    }
}

fn preset_from_name(name: &str) -> Result<ParamPreset> {
    match name {
        "mlsm-derived" => Ok(ParamPreset::MlsmDerived),
        "mlsm-stated" => Ok(ParamPreset::MlsmStated),
        "drsm-derived" => Ok(ParamPreset::DrsmDerived),
        "drsm-stated" => Ok(ParamPreset::DrsmStated),
        "wrapper-ps" => Ok(ParamPreset::WrapperPs),
        other => Err(Error::Config(format!("unknown preset `{other}`"))),
    }
}

fn default_preset_for(algorithm: &str, mode: &str) -> ParamPreset {
    match (algorithm, mode) {
        ("drsm", _) => ParamPreset::DrsmDerived,
        ("mlsm4ps", m) if m != "continuous" => ParamPreset::WrapperPs,
        ("mlsm4ps", _) => ParamPreset::WrapperPs,
        _ => ParamPreset::MlsmDerived,
    }
}

fn build_params(
    cfg: &ExperimentConfig,
    dim: usize,
    diameter: f64,
    l1: f64,
) -> Result<LearnerParams> {
    let alg = &cfg.algorithm;
    let mut params = match alg.params.as_str() {
        "explicit" => {
            let eta = alg
                .eta
                .ok_or_else(|| Error::Config("explicit params need eta".into()))?;
            let block_len = alg
                .block_len
                .ok_or_else(|| Error::Config("explicit params need block_len".into()))?;
            let mut p = LearnerParams::explicit(eta, block_len, alg.delta)?;
            p.l1 = Some(l1);
            p.diameter = Some(diameter);
            p
        }
        _ => {
            let preset = match &alg.preset {
                Some(name) => preset_from_name(name)?,
                None => default_preset_for(&alg.name, &cfg.environment.mode),
            };
            default_params(preset, dim, cfg.run.horizon, diameter, l1)?
        }
    };
    // The negated comparisons also reject NaN scales.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    {
        if let Some(scale) = alg.eta_scale {
            if !(scale > 0.0) {
                return Err(Error::Config("eta_scale must be positive".into()));
            }
            params.eta *= scale;
        }
        if let Some(scale) = alg.block_scale {
            if !(scale > 0.0) {
                return Err(Error::Config("block_scale must be positive".into()));
            }
            mlsm::scenarios::scale_block_len(&mut params, scale);
        }
    }
    if cfg.algorithm.name == "drsm" && params.delta.is_none() {
        return Err(Error::Config(
            "drsm needs a delta (explicit) or a drsm preset".into(),
        ));
    }
    Ok(params)
}

/// Builds the experiment objects shared by every seed.
pub fn build(cfg: &ExperimentConfig) -> Result<BuiltExperiment> {
    cfg.validate()?;
    match cfg.environment.mode.as_str() {
        "continuous" => {
            let dims = cfg.domain.as_ref().unwrap().simplex_dims.clone();
            let domain = ProductSimplexDomain::new(dims)?;
            let dim = domain.total_dim();
            let polys: Vec<MultilinearPolynomial> = cfg
                .environment
                .functions
                .iter()
                .map(|f| build_polynomial(f, dim))
                .collect::<Result<_>>()?;
            let l1 = polys
                .iter()
                .map(|p| p.lipschitz_l1())
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            let bound = polys
                .iter()
                .map(corner_max)
                .fold(0.0, f64::max);
            let seq = build_sequence(cfg, polys)?;
            let env = ContinuousEnv::new(seq, cfg.run.horizon, bound, l1)?;
            let params = build_params(cfg, dim, domain.euclidean_radius(), l1)?;
            Ok(BuiltExperiment::Continuous {
                domain,
                env,
                params,
                algorithm: cfg.algorithm.name.clone(),
            })
        }
        "discrete" => {
            let matroid = build_matroid(cfg.constraint.as_ref().unwrap())?;
            let extension = PartitionExtension::new(matroid)?;
            let gs: Vec<SetFunction> = cfg
                .environment
                .functions
                .iter()
                .map(build_set_function)
                .collect::<Result<_>>()?;
            let bound = gs.iter().map(|g| g.bound()).fold(0.0, f64::max);
            let seq = build_sequence(cfg, gs)?;
            let env = SetBandit::new(seq, cfg.run.horizon)?;
            let dim = extension.domain().total_dim();
            let l1 = extension.lipschitz_bound(bound);
            let params = build_params(cfg, dim, extension.domain().euclidean_radius(), l1)?;
            Ok(BuiltExperiment::Discrete {
                extension,
                env,
                params,
            })
        }
        "stochastic" => {
            let matroid = build_matroid(cfg.constraint.as_ref().unwrap())?;
            let extension = PartitionExtension::new(matroid)?;
            let components: Vec<SetFunction> = cfg
                .environment
                .functions
                .iter()
                .map(build_set_function)
                .collect::<Result<_>>()?;
            let probabilities = cfg
                .environment
                .probabilities
                .clone()
                .ok_or_else(|| Error::Config("stochastic mode needs probabilities".into()))?;
            let bound = components.iter().map(|g| g.bound()).fold(0.0, f64::max);
            let dim = extension.domain().total_dim();
            let l1 = extension.lipschitz_bound(bound);
            let params = build_params(cfg, dim, extension.domain().euclidean_radius(), l1)?;
            // Validate the mixture mean once, up front.
            let mut probe = RandomStream::new(0);
            StochasticSetBandit::new(components.clone(), &probabilities, 1, &mut probe)?;
            Ok(BuiltExperiment::Stochastic {
                extension,
                components,
                probabilities,
                params,
            })
        }
        _ => unreachable!("validated above"),
    }
}

fn corner_max(p: &MultilinearPolynomial) -> f64 {
    let d = p.dim();
    let mut best = 0.0f64;
    let mut x = vec![0.0; d];
    for corner in 0..1u32 << d {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = if corner & (1 << i) != 0 { 1.0 } else { 0.0 };
        }
        best = best.max(p.eval(&x).abs());
    }
    best
}

fn build_sequence<F>(cfg: &ExperimentConfig, items: Vec<F>) -> Result<ObliviousSequence<F>> {
    match cfg.environment.generator.as_str() {
        "constant" => {
            if items.len() != 1 {
                return Err(Error::Config(
                    "constant generator takes exactly one function".into(),
                ));
            }
            Ok(ObliviousSequence::constant(items.into_iter().next().unwrap()))
        }
        "rotation" => ObliviousSequence::rotation(items),
        "phased" => ObliviousSequence::phased(items, cfg.environment.switch_rounds.clone()),
        _ => unreachable!("validated above"),
    }
}

fn build_matroid(c: &ConstraintSection) -> Result<PartitionMatroid> {
    match c {
        ConstraintSection::Partition { blocks, capacities } => {
            PartitionMatroid::new(blocks.clone(), capacities.clone())
        }
        ConstraintSection::Cardinality { n, k } => PartitionMatroid::cardinality(*n, *k),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
[run]
horizon = 512
seeds = [1, 2]
output_dir = "out/demo"

[algorithm]
name = "mlsm"
params = "auto"
preset = "mlsm-derived"

[domain]
simplex_dims = [1, 1, 1]

[environment]
mode = "continuous"
generator = "constant"

[[environment.functions]]
kind = "coverage"
n = 3
covers = [[0], [1], [1, 2]]
weights = [0.4, 0.25, 0.35]
"#;

    #[test]
    fn parses_and_round_trips() {
        let cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        cfg.validate().unwrap();
        let text = cfg.to_toml().unwrap();
        let reparsed = ExperimentConfig::from_toml(&text).unwrap();
        assert_eq!(cfg, reparsed);
        // Idempotent serialization.
        assert_eq!(text, reparsed.to_toml().unwrap());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = SAMPLE.replace("[run]", "[run]\nturbo = true");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn builds_continuous_experiment() {
        let cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        match build(&cfg).unwrap() {
            BuiltExperiment::Continuous { domain, params, .. } => {
                assert_eq!(domain.total_dim(), 3);
                assert!(params.eta > 0.0);
            }
            _ => panic!("expected a continuous experiment"),
        }
    }

    #[test]
    fn discrete_mode_requires_wrapper_algorithm() {
        let bad = r#"
[run]
horizon = 128
seeds = [1]
output_dir = "out/x"

[algorithm]
name = "mlsm"

[environment]
mode = "discrete"
generator = "constant"

[[environment.functions]]
kind = "modular"
weights = [0.5, 0.5]

[constraint]
kind = "cardinality"
n = 2
k = 1
"#;
        let cfg = ExperimentConfig::from_toml(bad).unwrap();
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }
}
