//! Built-in set-function generators and random monotone DR instances.

use crate::error::Result;
use crate::sampling::RandomStream;

use super::multilinear::MultilinearPolynomial;
use super::set_function::SetFunction;

/// Weighted coverage function: element `i` covers `covers[i]`, and
/// `g(S)` is the total weight of universe items covered by `S`.
pub fn coverage(n: usize, covers: &[Vec<usize>], weights: &[f64]) -> Result<SetFunction> {
    let bound: f64 = weights.iter().sum();
    let g = |s: u32| -> f64 {
        let mut covered = vec![false; weights.len()];
        for (i, c) in covers.iter().enumerate() {
            if s & (1 << i) != 0 {
                for &u in c {
                    covered[u] = true;
                }
            }
        }
        covered
            .iter()
            .zip(weights)
            .filter(|(c, _)| **c)
            .map(|(_, w)| w)
            .sum()
    };
    SetFunction::from_oracle(n, bound, g)
}

/// Coverage with unit universe weights.
pub fn uniform_weight_coverage(n: usize, covers: &[Vec<usize>], universe: usize) -> Result<SetFunction> {
    coverage(n, covers, &vec![1.0; universe])
}

/// Concave transform of a modular function: `g(S) = (sum_{i in S} w_i)^p`
/// with `p` in `(0, 1]`; monotone submodular for nonnegative weights.
pub fn concave_over_modular(weights: &[f64], p: f64) -> Result<SetFunction> {
    let total: f64 = weights.iter().sum();
    let bound = total.powf(p);
    let w = weights.to_vec();
    SetFunction::from_oracle(weights.len(), bound, move |s| {
        let mut t = 0.0;
        for (i, wi) in w.iter().enumerate() {
            if s & (1 << i) != 0 {
                t += wi;
            }
        }
        t.powf(p)
    })
}

/// Modular (additive) function `g(S) = sum_{i in S} w_i`.
pub fn modular(weights: &[f64]) -> Result<SetFunction> {
    let bound: f64 = weights.iter().sum();
    let w = weights.to_vec();
    SetFunction::from_oracle(weights.len(), bound, move |s| {
        let mut t = 0.0;
        for (i, wi) in w.iter().enumerate() {
            if s & (1 << i) != 0 {
                t += wi;
            }
        }
        t
    })
}

/// Random monotone DR multi-linear instance: the multi-linear extension of a
/// randomly drawn coverage or concave-over-modular set function, normalized to
/// range `[0, 1]`.
pub fn random_monotone_dr_instance(dim: usize, stream: &mut RandomStream) -> MultilinearPolynomial {
    let g = if stream.coin() {
        let universe = 2 + (stream.uniform() * 3.0) as usize;
        let covers: Vec<Vec<usize>> = (0..dim)
            .map(|_| {
                (0..universe)
                    .filter(|_| stream.uniform() < 0.6)
                    .collect::<Vec<_>>()
            })
            .collect();
        let weights: Vec<f64> = (0..universe).map(|_| 0.2 + stream.uniform()).collect();
        coverage(dim, &covers, &weights).expect("valid coverage instance")
    } else {
        let weights: Vec<f64> = (0..dim).map(|_| 0.1 + stream.uniform()).collect();
        let p = 0.3 + 0.7 * stream.uniform();
        concave_over_modular(&weights, p).expect("valid concave-modular instance")
    };
    let f = MultilinearPolynomial::extension_of(&g).expect("small ground set");
    let m = g.bound().max(f64::MIN_POSITIVE);
    f.scale(1.0 / m)
}
