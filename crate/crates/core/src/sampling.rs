//! All randomness consumed by the bandit loops, behind one seeded stream.
//!
//! A [`RandomStream`] wraps a counter-based ChaCha generator, so distinct
//! `(seed, run_index)` pairs give independent streams and the experiment
//! harness reproduces serial results when runs execute in parallel.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seeded deterministic source of all draws used by a single run.
#[derive(Debug, Clone)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for run `run_index` of an experiment seeded with
    /// `seed`. Distinct indices select distinct ChaCha streams, so they never
    /// collide.
    pub fn for_run(seed: u64, run_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(run_index);
        Self { rng }
    }

    /// Uniform draw on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Exploration scale `z` on `[0, 1]` with density `e^{z-1}/(1 - e^{-1})`,
    /// sampled by inverting the CDF: `z = 1 + ln(e^{-1} + p (1 - e^{-1}))`.
    pub fn scale_z(&mut self) -> f64 {
        let p = self.uniform();
        z_quantile(p)
    }

    /// Uniform direction on the unit sphere in `R^d`; `d = 1` degenerates to
    /// `±1`.
    pub fn unit_sphere(&mut self, d: usize) -> Vec<f64> {
        assert!(d >= 1, "sphere dimension must be positive");
        loop {
            let v: Vec<f64> = (0..d).map(|_| self.standard_normal()).collect();
            let n = crate::linalg::norm2(&v);
            if n > 1e-300 {
                return v.iter().map(|x| x / n).collect();
            }
            // All-zeros Gaussian draw has measure zero; redraw.
        }
    }

    /// Uniform point in the closed unit ball in `R^d`.
    pub fn unit_ball(&mut self, d: usize) -> Vec<f64> {
        let mut v = self.unit_sphere(d);
        let r = self.uniform().powf(1.0 / d as f64);
        for x in &mut v {
            *x *= r;
        }
        v
    }

    /// Exploration coordinate: `None` (the zero vector) with probability 1/2,
    /// otherwise a uniformly random basis index, each with probability
    /// `1/(2d)`.
    pub fn exploration_coordinate(&mut self, d: usize) -> Option<usize> {
        assert!(d >= 1);
        let p = self.uniform();
        if p < 0.5 {
            None
        } else {
            let i = ((p - 0.5) * 2.0 * d as f64) as usize;
            Some(i.min(d - 1))
        }
    }

    /// Uniform basis index in `0..d`.
    pub fn uniform_coordinate(&mut self, d: usize) -> usize {
        self.rng.gen_range(0..d)
    }

    /// Uniform round index in `[block_start, block_start + block_len - 1]`.
    pub fn block_round(&mut self, block_start: usize, block_len: usize) -> usize {
        assert!(block_len >= 1);
        self.rng.gen_range(block_start..block_start + block_len)
    }

    /// Fair coin.
    pub fn coin(&mut self) -> bool {
        self.uniform() < 0.5
    }

    fn standard_normal(&mut self) -> f64 {
        // Box-Muller; consumes two uniforms per normal.
        let u1: f64 = self.rng.gen::<f64>().max(f64::MIN_POSITIVE);
        let u2: f64 = self.rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// Quantile function of the exploration-scale law.
pub fn z_quantile(p: f64) -> f64 {
    let em1 = (-1.0_f64).exp();
    (1.0 + (em1 + p * (1.0 - em1)).ln()).clamp(0.0, 1.0)
}

/// CDF of the exploration-scale law, `(e^{z-1} - e^{-1})/(1 - e^{-1})`.
pub fn z_cdf(z: f64) -> f64 {
    let em1 = (-1.0_f64).exp();
    if z <= 0.0 {
        0.0
    } else if z >= 1.0 {
        1.0
    } else {
        ((z - 1.0).exp() - em1) / (1.0 - em1)
    }
}

/// Mean of the exploration-scale law, `1/(e - 1)`.
pub fn z_mean() -> f64 {
    1.0 / (std::f64::consts::E - 1.0)
}
