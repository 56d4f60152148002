//! Reward environments, offline-optimum oracles, and regret traces.
//!
//! Environments are oblivious: every round's reward function is fixed at
//! construction, so re-querying a `(round, action)` pair in replay yields the
//! identical value. Stochastic environments draw their per-round realizations
//! once at construction and additionally expose the mean function, which is
//! what regret accounting uses in that mode.

use crate::error::{Error, Result};
use crate::learners::{ActionRecord, RunHistory};
use crate::objectives::{MultilinearPolynomial, SetFunction};
use crate::sampling::RandomStream;

/// Default benchmark ratio `1 - 1/e`.
pub const DEFAULT_ALPHA: f64 = 1.0 - 1.0 / std::f64::consts::E;

/// Bandit feedback surface the learners drive: play an action, observe one
/// reward. The returned [`ActionRecord`] is what lands in the history (the
/// wrapper substitutes the sampled discrete action).
pub trait BanditFeedback {
    fn horizon(&self) -> usize;

    /// Declared range bound `M` of the rewards, when known.
    fn reward_bound(&self) -> Option<f64>;

    fn pull(&mut self, round: usize, action: &[f64], stream: &mut RandomStream) -> (f64, ActionRecord);
}

/// How an oblivious sequence assigns items to rounds.
#[derive(Debug, Clone, PartialEq, Eq)]
enum SequenceKind {
    Constant,
    Rotation,
    /// Ascending switch rounds; item `i + 1` becomes active at `switches[i]`.
    Phased(Vec<usize>),
}

/// A deterministic round-indexed sequence over a fixed item list.
#[derive(Debug, Clone)]
pub struct ObliviousSequence<F> {
    items: Vec<F>,
    kind: SequenceKind,
}

impl<F> ObliviousSequence<F> {
    pub fn constant(item: F) -> Self {
        Self {
            items: vec![item],
            kind: SequenceKind::Constant,
        }
    }

    pub fn rotation(items: Vec<F>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::Config("rotation needs at least one function".into()));
        }
        Ok(Self {
            items,
            kind: SequenceKind::Rotation,
        })
    }

    pub fn phased(items: Vec<F>, switches: Vec<usize>) -> Result<Self> {
        if items.len() != switches.len() + 1 {
            return Err(Error::Config(format!(
                "phased sequence needs one more function ({}) than switch rounds ({})",
                items.len(),
                switches.len()
            )));
        }
        if switches.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("switch rounds must be strictly increasing".into()));
        }
        Ok(Self {
            items,
            kind: SequenceKind::Phased(switches),
        })
    }

    pub fn items(&self) -> &[F] {
        &self.items
    }

    /// Item index active at 1-based round `t`.
    pub fn index_at(&self, t: usize) -> usize {
        match &self.kind {
            SequenceKind::Constant => 0,
            SequenceKind::Rotation => (t - 1) % self.items.len(),
            SequenceKind::Phased(switches) => switches.iter().filter(|&&s| s <= t).count(),
        }
    }

    pub fn at(&self, t: usize) -> &F {
        &self.items[self.index_at(t)]
    }

    /// How many of rounds `1..=horizon` each item is active for.
    pub fn round_counts(&self, horizon: usize) -> Vec<usize> {
        let mut counts = vec![0usize; self.items.len()];
        match &self.kind {
            SequenceKind::Constant => counts[0] = horizon,
            SequenceKind::Rotation => {
                let k = self.items.len();
                for (i, c) in counts.iter_mut().enumerate() {
                    *c = horizon / k + usize::from(i < horizon % k);
                }
            }
            SequenceKind::Phased(_) => {
                for t in 1..=horizon {
                    counts[self.index_at(t)] += 1;
                }
            }
        }
        counts
    }
}

/// Continuous-action adversary over multi-linear reward functions.
#[derive(Debug, Clone)]
pub struct ContinuousEnv {
    seq: ObliviousSequence<MultilinearPolynomial>,
    horizon: usize,
    bound: f64,
    lipschitz: f64,
}

impl ContinuousEnv {
    pub fn new(
        seq: ObliviousSequence<MultilinearPolynomial>,
        horizon: usize,
        bound: f64,
        lipschitz: f64,
    ) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        Ok(Self {
            seq,
            horizon,
            bound,
            lipschitz,
        })
    }

    pub fn constant(f: MultilinearPolynomial, horizon: usize, bound: f64, lipschitz: f64) -> Result<Self> {
        Self::new(ObliviousSequence::constant(f), horizon, bound, lipschitz)
    }

    pub fn sequence(&self) -> &ObliviousSequence<MultilinearPolynomial> {
        &self.seq
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn reward_at(&self, t: usize, x: &[f64]) -> f64 {
        self.seq.at(t).eval(x)
    }

    /// Time-averaged objective over the horizon.
    pub fn average_objective(&self) -> Result<MultilinearPolynomial> {
        let counts = self.seq.round_counts(self.horizon);
        let mut acc = MultilinearPolynomial::zero(self.seq.items()[0].dim());
        for (item, c) in self.seq.items().iter().zip(&counts) {
            acc = acc.add(&item.scale(*c as f64 / self.horizon as f64))?;
        }
        Ok(acc)
    }

    /// Per-round values of a fixed benchmark action.
    pub fn benchmark_per_round(&self, x: &[f64]) -> Vec<f64> {
        (1..=self.horizon).map(|t| self.reward_at(t, x)).collect()
    }
}

impl BanditFeedback for ContinuousEnv {
    fn horizon(&self) -> usize {
        self.horizon
    }

    fn reward_bound(&self) -> Option<f64> {
        Some(self.bound)
    }

    fn pull(&mut self, round: usize, action: &[f64], _stream: &mut RandomStream) -> (f64, ActionRecord) {
        (
            self.reward_at(round, action),
            ActionRecord::Continuous(action.to_vec()),
        )
    }
}

/// Discrete bandit with a fixed reward schedule; the wrapper turns it into
/// continuous feedback.
pub trait DiscreteBandit {
    type Action: Clone;

    fn horizon(&self) -> usize;

    /// Range bound `M`.
    fn bound(&self) -> f64;

    /// Realized reward of playing `action` at 1-based round `t`.
    fn reward(&self, t: usize, action: &Self::Action) -> f64;

    /// Mean reward in stochastic mode; `None` for deterministic adversaries.
    fn mean_reward(&self, _action: &Self::Action) -> Option<f64> {
        None
    }

    /// Total benchmark value of a fixed action over the horizon, using mean
    /// rewards when the environment is stochastic.
    fn benchmark_total(&self, action: &Self::Action) -> f64;

    /// Per-round benchmark values of a fixed action (mean values in
    /// stochastic mode).
    fn benchmark_per_round(&self, action: &Self::Action) -> Vec<f64>;
}

/// Oblivious adversary over monotone submodular set functions; actions are
/// ground-set bitmasks.
#[derive(Debug, Clone)]
pub struct SetBandit {
    seq: ObliviousSequence<SetFunction>,
    horizon: usize,
    bound: f64,
}

impl SetBandit {
    pub fn new(seq: ObliviousSequence<SetFunction>, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        let n = seq.items()[0].ground_size();
        if seq.items().iter().any(|g| g.ground_size() != n) {
            return Err(Error::Config("sequence mixes ground-set sizes".into()));
        }
        let bound = seq.items().iter().map(|g| g.bound()).fold(0.0, f64::max);
        Ok(Self { seq, horizon, bound })
    }

    pub fn ground_size(&self) -> usize {
        self.seq.items()[0].ground_size()
    }

    pub fn sequence(&self) -> &ObliviousSequence<SetFunction> {
        &self.seq
    }
}

impl DiscreteBandit for SetBandit {
    type Action = u32;

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn bound(&self) -> f64 {
        self.bound
    }

    fn reward(&self, t: usize, action: &u32) -> f64 {
        self.seq.at(t).value(*action)
    }

    fn benchmark_total(&self, action: &u32) -> f64 {
        let counts = self.seq.round_counts(self.horizon);
        self.seq
            .items()
            .iter()
            .zip(counts)
            .map(|(g, c)| c as f64 * g.value(*action))
            .sum()
    }

    fn benchmark_per_round(&self, action: &u32) -> Vec<f64> {
        (1..=self.horizon)
            .map(|t| self.seq.at(t).value(*action))
            .collect()
    }
}

/// Stochastic set bandit: per-round functions drawn i.i.d. from a finite
/// mixture at construction (an oblivious realization). Requires the mixture
/// mean to be monotone submodular, and exposes it for regret accounting.
#[derive(Debug, Clone)]
pub struct StochasticSetBandit {
    components: Vec<SetFunction>,
    realized: Vec<usize>,
    mean: SetFunction,
    bound: f64,
}

impl StochasticSetBandit {
    pub fn new(
        components: Vec<SetFunction>,
        probabilities: &[f64],
        horizon: usize,
        stream: &mut RandomStream,
    ) -> Result<Self> {
        if components.is_empty() || components.len() != probabilities.len() {
            return Err(Error::Config(
                "stochastic environment needs matching components and probabilities".into(),
            ));
        }
        if horizon == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        let parts: Vec<(f64, &SetFunction)> = probabilities
            .iter()
            .copied()
            .zip(components.iter())
            .collect();
        let mean = SetFunction::mix(&parts).map_err(|e| Error::Config(e.to_string()))?;
        if !mean.is_monotone() || !mean.is_submodular() {
            return Err(Error::Config(
                "mixture mean fails the monotone/submodular enumeration check".into(),
            ));
        }
        let mut cdf = Vec::with_capacity(probabilities.len());
        let mut acc = 0.0;
        for p in probabilities {
            acc += p;
            cdf.push(acc);
        }
        let realized = (0..horizon)
            .map(|_| {
                let u = stream.uniform();
                cdf.iter().position(|c| u < *c).unwrap_or(cdf.len() - 1)
            })
            .collect();
        let bound = components.iter().map(|g| g.bound()).fold(0.0, f64::max);
        Ok(Self {
            components,
            realized,
            mean,
            bound,
        })
    }

    pub fn mean_function(&self) -> &SetFunction {
        &self.mean
    }

    pub fn realized_index(&self, t: usize) -> usize {
        self.realized[t - 1]
    }
}

impl DiscreteBandit for StochasticSetBandit {
    type Action = u32;

    fn horizon(&self) -> usize {
        self.realized.len()
    }

    fn bound(&self) -> f64 {
        self.bound
    }

    fn reward(&self, t: usize, action: &u32) -> f64 {
        self.components[self.realized[t - 1]].value(*action)
    }

    fn mean_reward(&self, action: &u32) -> Option<f64> {
        Some(self.mean.value(*action))
    }

    fn benchmark_total(&self, action: &u32) -> f64 {
        self.horizon() as f64 * self.mean.value(*action)
    }

    fn benchmark_per_round(&self, action: &u32) -> Vec<f64> {
        vec![self.mean.value(*action); self.horizon()]
    }
}

/// Benchmark action and its values for regret computation.
#[derive(Debug, Clone)]
pub struct OfflineOptimum {
    /// Human-readable description of the maximizer.
    pub action: String,
    pub total: f64,
    pub per_round: Vec<f64>,
    /// Continuous mode: disagreement between the ascent and grid answers
    /// (both best-effort); exact discrete optima report zero.
    pub certification_gap: f64,
}

/// Exact brute-force benchmark over an enumerable feasible family (at most
/// `10^6` candidates), using mean rewards in stochastic mode.
pub fn offline_optimum_discrete<E: DiscreteBandit>(
    env: &E,
    feasible: impl IntoIterator<Item = E::Action>,
    describe: impl Fn(&E::Action) -> String,
) -> Result<OfflineOptimum> {
    let mut best: Option<(f64, E::Action)> = None;
    let mut count = 0usize;
    for action in feasible {
        count += 1;
        if count > 1_000_000 {
            return Err(Error::Capacity(
                "feasible family exceeds the 10^6 enumeration budget".into(),
            ));
        }
        let total = env.benchmark_total(&action);
        if best.as_ref().is_none_or(|(b, _)| total > *b) {
            best = Some((total, action));
        }
    }
    let (total, action) = best.ok_or_else(|| Error::Contract("empty feasible family".into()))?;
    Ok(OfflineOptimum {
        action: describe(&action),
        total,
        per_round: env.benchmark_per_round(&action),
        certification_gap: 0.0,
    })
}

/// Best fixed continuous action for the time-averaged objective: multi-start
/// projected gradient ascent on the exact gradient, certified against a grid
/// of spacing 0.05; returns the better of the two. Best-found semantics.
pub fn offline_optimum_continuous(
    env: &ContinuousEnv,
    domain: &crate::geometry::ProductSimplexDomain,
) -> Result<OfflineOptimum> {
    let d = domain.total_dim();
    if d > 6 {
        return Err(Error::Capacity(format!(
            "continuous benchmark oracle supports d <= 6, got {d}"
        )));
    }
    let avg = env.average_objective()?;
    let mut stream = RandomStream::new(0x0ff1_c1a1);

    let mut best_x: Vec<f64> = vec![0.0; d];
    let mut best_v = avg.eval(&best_x);
    let starts = 200;
    let steps = 2000;
    for s in 0..=starts {
        let mut x = if s == 0 {
            vec![0.5 / d as f64; d]
        } else {
            domain.sample_uniform(&mut stream)
        };
        for k in 0..steps {
            let g = avg.gradient(&x);
            let step = 0.5 / ((k + 1) as f64).sqrt();
            for (xi, gi) in x.iter_mut().zip(&g) {
                *xi += step * gi;
            }
            project_onto_domain(domain, &mut x);
        }
        let v = avg.eval(&x);
        if v > best_v {
            best_v = v;
            best_x = x;
        }
    }

    let (grid_v, grid_x) = grid_maximum(&avg, domain)?;
    let certification_gap = (grid_v - best_v).abs();
    if grid_v > best_v {
        best_v = grid_v;
        best_x = grid_x;
    }
    Ok(OfflineOptimum {
        action: format!("{best_x:?}"),
        total: env.horizon() as f64 * best_v,
        per_round: env.benchmark_per_round(&best_x),
        certification_gap,
    })
}

/// Euclidean projection onto the product of solid simplexes, block by block.
fn project_onto_domain(domain: &crate::geometry::ProductSimplexDomain, x: &mut [f64]) {
    for b in 0..domain.num_blocks() {
        let range = domain.block_range(b);
        let clipped: Vec<f64> = x[range.clone()].iter().map(|v| v.max(0.0)).collect();
        if clipped.iter().sum::<f64>() <= 1.0 {
            x[range].copy_from_slice(&clipped);
            continue;
        }
        // Project onto the unit-sum simplex face.
        let mut sorted: Vec<f64> = x[range.clone()].to_vec();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut acc = 0.0;
        let mut tau = 0.0;
        for (j, &u) in sorted.iter().enumerate() {
            acc += u;
            let t = (acc - 1.0) / (j as f64 + 1.0);
            if u - t > 0.0 {
                tau = t;
            }
        }
        for v in &mut x[range] {
            *v = (*v - tau).max(0.0);
        }
    }
}

fn grid_maximum(
    f: &MultilinearPolynomial,
    domain: &crate::geometry::ProductSimplexDomain,
) -> Result<(f64, Vec<f64>)> {
    const LEVELS: usize = 20; // spacing 0.05
    let mut block_points: Vec<Vec<Vec<f64>>> = Vec::new();
    for b in 0..domain.num_blocks() {
        let d = domain.block_range(b).len();
        let mut pts = Vec::new();
        let mut current = vec![0usize; d];
        enumerate_compositions(LEVELS, d, 0, &mut current, &mut pts);
        block_points.push(
            pts.into_iter()
                .map(|c| c.into_iter().map(|v| v as f64 / LEVELS as f64).collect())
                .collect(),
        );
    }
    let total: usize = block_points.iter().map(|p| p.len()).product();
    if total > 5_000_000 {
        return Err(Error::Capacity(format!(
            "certification grid has {total} points, above the desk-scale cap"
        )));
    }
    let d = domain.total_dim();
    let mut x = vec![0.0; d];
    let mut idx = vec![0usize; block_points.len()];
    let mut best_v = f64::NEG_INFINITY;
    let mut best_x = vec![0.0; d];
    loop {
        for (b, &i) in idx.iter().enumerate() {
            let range = domain.block_range(b);
            x[range].copy_from_slice(&block_points[b][i]);
        }
        let v = f.eval(&x);
        if v > best_v {
            best_v = v;
            best_x = x.clone();
        }
        // Odometer increment over the per-block point lists.
        let mut b = 0;
        loop {
            if b == idx.len() {
                return Ok((best_v, best_x));
            }
            idx[b] += 1;
            if idx[b] < block_points[b].len() {
                break;
            }
            idx[b] = 0;
            b += 1;
        }
    }
}

fn enumerate_compositions(
    budget: usize,
    dims: usize,
    pos: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if pos == dims {
        out.push(current.clone());
        return;
    }
    let used: usize = current[..pos].iter().sum();
    for v in 0..=(budget - used) {
        current[pos] = v;
        enumerate_compositions(budget, dims, pos + 1, current, out);
    }
    current[pos] = 0;
}

/// Per-round and cumulative `alpha`-regret of a reward sequence against a
/// benchmark.
#[derive(Debug, Clone)]
pub struct RegretTrace {
    pub alpha: f64,
    pub per_round: Vec<f64>,
    pub cumulative: Vec<f64>,
}

impl RegretTrace {
    pub fn final_cumulative(&self) -> f64 {
        *self.cumulative.last().unwrap_or(&0.0)
    }
}

/// `alpha`-regret of observed rewards against the benchmark's per-round
/// values. Horizons must match.
pub fn compute_alpha_regret(
    rewards: &[f64],
    optimum: &OfflineOptimum,
    alpha: f64,
) -> Result<RegretTrace> {
    if rewards.len() != optimum.per_round.len() {
        return Err(Error::Contract(format!(
            "reward rows ({}) and benchmark rows ({}) disagree",
            rewards.len(),
            optimum.per_round.len()
        )));
    }
    let per_round: Vec<f64> = rewards
        .iter()
        .zip(&optimum.per_round)
        .map(|(r, b)| alpha * b - r)
        .collect();
    let mut cumulative = Vec::with_capacity(per_round.len());
    let mut acc = 0.0;
    for v in &per_round {
        acc += v;
        cumulative.push(acc);
    }
    Ok(RegretTrace {
        alpha,
        per_round,
        cumulative,
    })
}

/// Realized rewards of a run history.
pub fn realized_rewards(history: &RunHistory) -> Vec<f64> {
    history.rounds.iter().map(|r| r.reward).collect()
}

/// Mean rewards of the recorded discrete actions under a stochastic
/// environment; fails if the history holds non-set actions.
pub fn mean_rewards<E: DiscreteBandit<Action = u32>>(
    env: &E,
    history: &RunHistory,
) -> Result<Vec<f64>> {
    history
        .rounds
        .iter()
        .map(|r| match &r.action {
            ActionRecord::Set(s) => env
                .mean_reward(s)
                .ok_or_else(|| Error::Contract("environment has no mean function".into())),
            _ => Err(Error::Contract(
                "history does not record set actions".into(),
            )),
        })
        .collect()
}

/// Least-squares slope of `log(value)` against `log(key)`; all values must be
/// positive.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Contract("slope fit needs at least two points".into()));
    }
    if points.iter().any(|&(t, r)| t <= 0.0 || r <= 0.0) {
        return Err(Error::Contract(
            "slope fit needs positive horizons and regrets".into(),
        ));
    }
    let n = points.len() as f64;
    let (mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for &(t, r) in points {
        let x = t.ln();
        let y = r.ln();
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}
