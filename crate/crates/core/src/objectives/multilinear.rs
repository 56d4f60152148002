//! Explicit multi-linear polynomials and the monotone/DR verifier.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::ProductSimplexDomain;
use crate::linalg;
use crate::sampling::RandomStream;

use super::set_function::SetFunction;
use super::MAX_GROUND_SIZE;

/// A polynomial in which every variable has degree at most one per term,
/// stored as a sparse coefficient table keyed by variable subsets:
/// `f(x) = sum_S c_S prod_{i in S} x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultilinearPolynomial {
    dim: usize,
    terms: Vec<(u32, f64)>,
}

impl MultilinearPolynomial {
    pub fn new(dim: usize, terms: impl IntoIterator<Item = (u32, f64)>) -> Result<Self> {
        if dim > 31 {
            return Err(Error::Capacity(format!(
                "multi-linear coefficient tables support up to 31 variables, got {dim}"
            )));
        }
        let mut map: BTreeMap<u32, f64> = BTreeMap::new();
        for (mask, c) in terms {
            if mask >= 1u32 << dim {
                return Err(Error::Contract(format!(
                    "term {mask:#b} references variables outside dimension {dim}"
                )));
            }
            if !c.is_finite() {
                return Err(Error::Numeric("non-finite coefficient".into()));
            }
            *map.entry(mask).or_insert(0.0) += c;
        }
        map.retain(|_, c| *c != 0.0);
        Ok(Self {
            dim,
            terms: map.into_iter().collect(),
        })
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn linear(weights: &[f64]) -> Result<Self> {
        Self::new(
            weights.len(),
            weights.iter().enumerate().map(|(i, &w)| (1u32 << i, w)),
        )
    }

    /// Multi-linear extension of a set function, expanded to coefficient form:
    /// `f(x) = sum_S g(S) prod_{i in S} x_i prod_{i not in S} (1 - x_i)`,
    /// which after a subset Moebius transform has coefficients
    /// `c_T = sum_{S subseteq T} (-1)^{|T| - |S|} g(S)`. `f(1_S) = g(S)` for
    /// every vertex.
    pub fn extension_of(g: &SetFunction) -> Result<Self> {
        let n = g.ground_size();
        if n > MAX_GROUND_SIZE {
            return Err(Error::Capacity(format!(
                "extension build enumerates 2^n tables; n = {n} exceeds {MAX_GROUND_SIZE}"
            )));
        }
        let mut c: Vec<f64> = (0..1u32 << n).map(|s| g.value(s)).collect();
        for i in 0..n {
            let bit = 1u32 << i;
            for t in 0..1u32 << n {
                if t & bit != 0 {
                    c[t as usize] -= c[(t ^ bit) as usize];
                }
            }
        }
        Self::new(n, c.into_iter().enumerate().map(|(m, v)| (m as u32, v)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(u32, f64)] {
        &self.terms
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim);
        let mut total = 0.0;
        for &(mask, c) in &self.terms {
            let mut p = c;
            let mut m = mask;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                p *= x[i];
                m &= m - 1;
            }
            total += p;
        }
        total
    }

    /// Exact gradient. Because every variable has degree at most one, the
    /// partial in coordinate `i` equals the full-range finite difference
    /// `f(x with x_i = 1) - f(x with x_i = 0)`, and is independent of the
    /// difference step.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        let mut g = vec![0.0; self.dim];
        let mut factors = Vec::with_capacity(self.dim);
        for &(mask, c) in &self.terms {
            if mask == 0 {
                continue;
            }
            factors.clear();
            let mut m = mask;
            while m != 0 {
                let i = m.trailing_zeros() as usize;
                factors.push(i);
                m &= m - 1;
            }
            // Leave-one-out products via prefix/suffix scans.
            let k = factors.len();
            if k == 1 {
                g[factors[0]] += c;
                continue;
            }
            let mut prefix = vec![1.0; k + 1];
            for (t, &i) in factors.iter().enumerate() {
                prefix[t + 1] = prefix[t] * x[i];
            }
            let mut suffix = 1.0;
            for t in (0..k).rev() {
                g[factors[t]] += c * prefix[t] * suffix;
                suffix *= x[factors[t]];
            }
        }
        g
    }

    /// Mixed second partial, a constant sign probe for DR checks: exact value
    /// of `d^2 f / dx_i dx_j` at `x` (zero when `i == j`).
    pub fn mixed_partial(&self, x: &[f64], i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let mut total = 0.0;
        for &(mask, c) in &self.terms {
            let bi = 1u32 << i;
            let bj = 1u32 << j;
            if mask & bi == 0 || mask & bj == 0 {
                continue;
            }
            let mut p = c;
            let mut m = mask & !(bi | bj);
            while m != 0 {
                let k = m.trailing_zeros() as usize;
                p *= x[k];
                m &= m - 1;
            }
            total += p;
        }
        total
    }

    /// Sum of polynomials over the same variables.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Contract("dimension mismatch in polynomial sum".into()));
        }
        Self::new(
            self.dim,
            self.terms.iter().chain(&other.terms).copied(),
        )
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|&(m, v)| (m, c * v)).collect(),
        }
    }

    pub fn average(parts: &[&Self]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Contract("average of zero polynomials".into()))?;
        let mut acc = Self::zero(first.dim());
        for p in parts {
            acc = acc.add(p)?;
        }
        Ok(acc.scale(1.0 / parts.len() as f64))
    }

    /// Lipschitz constant in the Euclidean norm: because each gradient
    /// component is itself multi-linear, the gradient norm is extremized at
    /// the `2^d` corners of the unit box.
    pub fn lipschitz_l1(&self) -> Result<f64> {
        if self.dim > MAX_GROUND_SIZE {
            return Err(Error::Capacity(format!(
                "corner scan enumerates 2^d points; d = {} exceeds {MAX_GROUND_SIZE}",
                self.dim
            )));
        }
        let mut best: f64 = 0.0;
        let mut x = vec![0.0; self.dim];
        for corner in 0..1u32 << self.dim {
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = if corner & (1 << i) != 0 { 1.0 } else { 0.0 };
            }
            best = best.max(linalg::norm2(&self.gradient(&x)));
        }
        Ok(best)
    }

    /// Largest gradient component over the corners (the sup norm of the
    /// gradient over the domain).
    pub fn gradient_sup_norm(&self) -> Result<f64> {
        if self.dim > MAX_GROUND_SIZE {
            return Err(Error::Capacity("corner scan too large".into()));
        }
        let mut best: f64 = 0.0;
        let mut x = vec![0.0; self.dim];
        for corner in 0..1u32 << self.dim {
            for (i, xi) in x.iter_mut().enumerate() {
                *xi = if corner & (1 << i) != 0 { 1.0 } else { 0.0 };
            }
            for g in self.gradient(&x) {
                best = best.max(g.abs());
            }
        }
        Ok(best)
    }

    /// Numerical smoothness constant: the largest Hessian spectral norm over
    /// sampled interior points. The Hessian of a multi-linear polynomial has
    /// zero diagonal and mixed partials given exactly by [`Self::mixed_partial`].
    pub fn numeric_l2(
        &self,
        domain: &ProductSimplexDomain,
        samples: usize,
        stream: &mut RandomStream,
    ) -> f64 {
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for _ in 0..samples {
            let x = domain.sample_uniform(stream);
            let mut h = vec![0.0; d * d];
            for i in 0..d {
                for j in (i + 1)..d {
                    let v = self.mixed_partial(&x, i, j);
                    h[i * d + j] = v;
                    h[j * d + i] = v;
                }
            }
            worst = worst.max(linalg::spectral_norm(&h, d));
        }
        worst
    }
}

/// One failed monotone/DR probe.
#[derive(Debug, Clone)]
pub enum DrViolation {
    /// A first partial below `-tol` at the named point.
    Gradient { coord: usize, value: f64, point: Vec<f64> },
    /// A mixed second difference above `tol` at the named point.
    MixedPartial { i: usize, j: usize, value: f64, point: Vec<f64> },
}

/// Outcome of [`verify_monotone_dr`].
#[derive(Debug, Clone)]
pub struct DrReport {
    pub trials: usize,
    pub violations: Vec<DrViolation>,
}

impl DrReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks monotonicity and DR-submodularity of a multi-linear polynomial at
/// random interior points: all first partials at least `-1e-12`, and all
/// second differences `f(x v e_i v e_j) - f(x v e_i) - f(x v e_j) + f(x)`
/// at most `1e-12` (exact up to rounding for multi-linear `f`). Violations are
/// report content, not errors.
pub fn verify_monotone_dr(
    f: &MultilinearPolynomial,
    domain: &ProductSimplexDomain,
    trials: usize,
    stream: &mut RandomStream,
) -> DrReport {
    const TOL: f64 = 1e-12;
    let d = f.dim();
    assert_eq!(d, domain.total_dim());
    let mut violations = Vec::new();
    for _ in 0..trials {
        let x = domain.sample_uniform(stream);
        let g = f.gradient(&x);
        for (i, &gi) in g.iter().enumerate() {
            if gi < -TOL {
                violations.push(DrViolation::Gradient {
                    coord: i,
                    value: gi,
                    point: x.clone(),
                });
            }
        }
        let fx = f.eval(&x);
        for i in 0..d {
            let xi = raise(&x, i);
            let fi = f.eval(&xi);
            for j in i..d {
                let second = if i == j {
                    // Join with the same coordinate twice collapses to a
                    // monotonicity probe.
                    fx - fi
                } else {
                    let fj = f.eval(&raise(&x, j));
                    let fij = f.eval(&raise(&xi, j));
                    fij - fi - fj + fx
                };
                if second > TOL {
                    violations.push(DrViolation::MixedPartial {
                        i,
                        j,
                        value: second,
                        point: x.clone(),
                    });
                }
            }
        }
    }
    DrReport { trials, violations }
}

fn raise(x: &[f64], i: usize) -> Vec<f64> {
    let mut y = x.to_vec();
    y[i] = 1.0;
    y
}
