//! Value oracles over subsets of a small ground set.

use crate::error::{Error, Result};

use super::MAX_GROUND_SIZE;

/// A set function over a ground set of at most 20 elements, stored as a
/// bitmask-indexed value table. Values live in `[0, M]` and `g(empty) = 0`.
///
/// Monotonicity and submodularity are established by exhaustive enumeration at
/// construction (the exchange inequality
/// `g(S + s1 + s2) - g(S + s1) <= g(S + s2) - g(S)` over all triples), so the
/// flags are verified facts rather than caller claims.
#[derive(Debug, Clone)]
pub struct SetFunction {
    n: usize,
    values: Vec<f64>,
    bound: f64,
    monotone: bool,
    submodular: bool,
}

impl SetFunction {
    pub fn new(n: usize, values: Vec<f64>, bound: f64) -> Result<Self> {
        if n == 0 || n > MAX_GROUND_SIZE {
            return Err(Error::Capacity(format!(
                "ground size {n} outside supported range 1..={MAX_GROUND_SIZE}"
            )));
        }
        if values.len() != 1 << n {
            return Err(Error::Contract(format!(
                "value table has {} entries, expected {}",
                values.len(),
                1usize << n
            )));
        }
        if values[0].abs() > 1e-12 {
            return Err(Error::Contract(format!(
                "g(empty set) must be 0, got {}",
                values[0]
            )));
        }
        if !(bound.is_finite() && bound >= 0.0) {
            return Err(Error::Contract(format!("bound M must be finite and >= 0, got {bound}")));
        }
        for (s, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < -1e-12 || v > bound + 1e-12 {
                return Err(Error::Contract(format!(
                    "g({s:#b}) = {v} outside [0, {bound}]"
                )));
            }
        }
        let monotone = check_monotone(n, &values);
        let submodular = check_submodular(n, &values);
        Ok(Self {
            n,
            values,
            bound,
            monotone,
            submodular,
        })
    }

    pub fn from_oracle(n: usize, bound: f64, g: impl Fn(u32) -> f64) -> Result<Self> {
        if n == 0 || n > MAX_GROUND_SIZE {
            return Err(Error::Capacity(format!(
                "ground size {n} outside supported range 1..={MAX_GROUND_SIZE}"
            )));
        }
        let values = (0..1u32 << n).map(g).collect();
        Self::new(n, values, bound)
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    /// Range bound `M`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn is_submodular(&self) -> bool {
        self.submodular
    }

    pub fn value(&self, set: u32) -> f64 {
        self.values[set as usize]
    }

    /// Pointwise convex combination of set functions on the same ground set.
    pub fn mix(parts: &[(f64, &SetFunction)]) -> Result<Self> {
        let n = parts
            .first()
            .ok_or_else(|| Error::Contract("empty mixture".into()))?
            .1
            .n;
        if parts.iter().any(|(_, g)| g.n != n) {
            return Err(Error::Contract("mixture over mismatched ground sets".into()));
        }
        let wsum: f64 = parts.iter().map(|(w, _)| *w).sum();
        if (wsum - 1.0).abs() > 1e-9 || parts.iter().any(|(w, _)| *w < 0.0) {
            return Err(Error::Contract("mixture weights must be a distribution".into()));
        }
        let mut values = vec![0.0; 1 << n];
        for (w, g) in parts {
            for (v, gv) in values.iter_mut().zip(&g.values) {
                *v += w * gv;
            }
        }
        let bound = parts.iter().map(|(w, g)| w * g.bound).sum();
        Self::new(n, values, bound)
    }
}

fn check_monotone(n: usize, values: &[f64]) -> bool {
    for s in 0..1u32 << n {
        for i in 0..n {
            if s & (1 << i) == 0 && values[(s | (1 << i)) as usize] < values[s as usize] - 1e-12 {
                return false;
            }
        }
    }
    true
}

fn check_submodular(n: usize, values: &[f64]) -> bool {
    // Diminishing returns over pairs of distinct elements outside the base set.
    for s in 0..1u32 << n {
        for i in 0..n {
            if s & (1 << i) != 0 {
                continue;
            }
            for j in 0..n {
                if i == j || s & (1 << j) != 0 {
                    continue;
                }
                let base = values[s as usize];
                let with_i = values[(s | (1 << i)) as usize];
                let with_j = values[(s | (1 << j)) as usize];
                let with_ij = values[(s | (1 << i) | (1 << j)) as usize];
                if with_ij - with_i > with_j - base + 1e-12 {
                    return false;
                }
            }
        }
    }
    true
}

/// The relaxed exchange inequality with no restrictions on the two elements
/// (they may coincide or already lie in the base set); holds for every
/// monotone submodular function.
#[cfg(test)]
pub(crate) fn exchange_inequality_holds(g: &SetFunction, tol: f64) -> bool {
    let n = g.ground_size();
    for s in 0..1u32 << n {
        for s1 in 0..n {
            for s2 in 0..n {
                let a = g.value(s | (1 << s1) | (1 << s2));
                let b = g.value(s | (1 << s1));
                let c = g.value(s | (1 << s2));
                let d = g.value(s);
                if a - b > c - d + tol {
                    return false;
                }
            }
        }
    }
    true
}
