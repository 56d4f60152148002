//! The log barrier of a product of simplexes and its local metrics.

use crate::error::{Error, Result};
use crate::linalg;

use super::domain::ProductSimplexDomain;
use super::BOUNDARY_TOL;

/// A self-concordant barrier over a convex body.
///
/// Only the product-simplex barrier ships, but the bandit loops and the Newton
/// solver only touch this surface, so other bodies can plug in.
pub trait Barrier {
    fn domain(&self) -> &ProductSimplexDomain;

    /// Self-concordance parameter.
    fn nu(&self) -> f64;

    fn value(&self, x: &[f64]) -> Result<f64>;

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// Hessian and its inverse square root at an interior point.
    fn metric(&self, x: &[f64]) -> Result<LocalMetric>;

    /// Solves `(hessian at x) * out = rhs`.
    fn hessian_solve(&self, x: &[f64], rhs: &[f64]) -> Result<Vec<f64>>;

    /// Quadratic form `h^T (hessian at x) h`, the squared local norm of `h`.
    fn hessian_quad(&self, x: &[f64], h: &[f64]) -> Result<f64>;

    /// The minimizer of the barrier.
    fn analytic_center(&self) -> Vec<f64>;
}

/// Local geometry at an anchor point: the barrier Hessian, its inverse square
/// root (the Dikin transform), and that transform's inverse, stored per block.
#[derive(Debug, Clone)]
pub struct LocalMetric {
    anchor: Vec<f64>,
    block_starts: Vec<usize>,
    block_dims: Vec<usize>,
    hess: Vec<Vec<f64>>,
    dikin: Vec<Vec<f64>>,
    dikin_inv: Vec<Vec<f64>>,
}

impl LocalMetric {
    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn dim(&self) -> usize {
        self.anchor.len()
    }

    fn apply_blocks(&self, mats: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for (b, m) in mats.iter().enumerate() {
            let s = self.block_starts[b];
            let d = self.block_dims[b];
            linalg::mat_vec(m, d, &v[s..s + d], &mut out[s..s + d]);
        }
        out
    }

    /// `H v` with `H = (hessian)^{-1/2}`.
    pub fn dikin_apply(&self, v: &[f64]) -> Vec<f64> {
        self.apply_blocks(&self.dikin, v)
    }

    /// `H^{-1} v`.
    pub fn dikin_inv_apply(&self, v: &[f64]) -> Vec<f64> {
        self.apply_blocks(&self.dikin_inv, v)
    }

    pub fn hessian_apply(&self, v: &[f64]) -> Vec<f64> {
        self.apply_blocks(&self.hess, v)
    }

    /// Squared local norm `h^T (hessian) h`.
    pub fn local_norm_sq(&self, h: &[f64]) -> f64 {
        linalg::dot(h, &self.hessian_apply(h))
    }

    /// Squared dual local norm `g^T (hessian)^{-1} g = ||H g||^2`.
    pub fn dual_norm_sq(&self, g: &[f64]) -> f64 {
        let hg = self.dikin_apply(g);
        linalg::dot(&hg, &hg)
    }

    /// Largest per-block spectral deviation of `H * hessian * H` from the
    /// identity; a consistency measure of the factorization.
    pub fn identity_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for (b, h) in self.dikin.iter().enumerate() {
            let d = self.block_dims[b];
            let a = &self.hess[b];
            let mut ah = vec![0.0; d * d];
            for i in 0..d {
                for j in 0..d {
                    let mut s = 0.0;
                    for k in 0..d {
                        s += a[i * d + k] * h[k * d + j];
                    }
                    ah[i * d + j] = s;
                }
            }
            let mut hah = vec![0.0; d * d];
            for i in 0..d {
                for j in 0..d {
                    let mut s = 0.0;
                    for k in 0..d {
                        s += h[i * d + k] * ah[k * d + j];
                    }
                    hah[i * d + j] = s;
                }
            }
            for i in 0..d {
                hah[i * d + i] -= 1.0;
            }
            worst = worst.max(linalg::spectral_norm(&hah, d));
        }
        worst
    }
}

/// The barrier `-sum_i log(1 - 1^T x_i) - sum_{i,j} log x_{i,j}` over a
/// product of simplexes; `(sum_i (d_i + 1))`-self-concordant.
#[derive(Debug, Clone)]
pub struct ProductSimplexBarrier {
    domain: ProductSimplexDomain,
    nu: f64,
}

impl ProductSimplexBarrier {
    pub fn new(domain: ProductSimplexDomain) -> Self {
        let nu = domain.block_dims().iter().map(|&d| (d + 1) as f64).sum();
        Self { domain, nu }
    }

    fn check_interior(&self, x: &[f64]) -> Result<()> {
        self.domain.require_interior(x, BOUNDARY_TOL)
    }
}

impl Barrier for ProductSimplexBarrier {
    fn domain(&self) -> &ProductSimplexDomain {
        &self.domain
    }

    fn nu(&self) -> f64 {
        self.nu
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.check_interior(x)?;
        let mut v = 0.0;
        for b in 0..self.domain.num_blocks() {
            v -= (1.0 - self.domain.block_sum(x, b)).ln();
            for j in self.domain.block_range(b) {
                v -= x[j].ln();
            }
        }
        Ok(v)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_interior(x)?;
        let mut g = vec![0.0; x.len()];
        for b in 0..self.domain.num_blocks() {
            let inv_slack = 1.0 / (1.0 - self.domain.block_sum(x, b));
            for j in self.domain.block_range(b) {
                g[j] = inv_slack - 1.0 / x[j];
            }
        }
        Ok(g)
    }

    fn metric(&self, x: &[f64]) -> Result<LocalMetric> {
        self.check_interior(x)?;
        let nb = self.domain.num_blocks();
        let mut hess = Vec::with_capacity(nb);
        let mut dikin = Vec::with_capacity(nb);
        let mut dikin_inv = Vec::with_capacity(nb);
        let mut block_starts = Vec::with_capacity(nb);
        let mut block_dims = Vec::with_capacity(nb);
        for b in 0..nb {
            let range = self.domain.block_range(b);
            let d = range.len();
            let a = 1.0 / (1.0 - self.domain.block_sum(x, b)).powi(2);
            let mut m = vec![a; d * d];
            for (j, idx) in range.clone().enumerate() {
                m[j * d + j] += 1.0 / (x[idx] * x[idx]);
            }
            let (lambda, q) = linalg::sym_eigen(&m, d);
            if lambda.iter().any(|l| !l.is_finite() || *l <= 0.0) {
                return Err(Error::Numeric(format!(
                    "non-positive or non-finite Hessian eigenvalue in block {b}"
                )));
            }
            dikin.push(linalg::sym_from_eigen(&lambda, &q, d, |l| 1.0 / l.sqrt()));
            dikin_inv.push(linalg::sym_from_eigen(&lambda, &q, d, |l| l.sqrt()));
            hess.push(m);
            block_starts.push(range.start);
            block_dims.push(d);
        }
        Ok(LocalMetric {
            anchor: x.to_vec(),
            block_starts,
            block_dims,
            hess,
            dikin,
            dikin_inv,
        })
    }

    fn hessian_solve(&self, x: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
        self.check_interior(x)?;
        // Per block the Hessian is a*11^T + diag(1/x_j^2); invert with
        // Sherman-Morrison, which is exact for this structure.
        let mut out = vec![0.0; rhs.len()];
        for b in 0..self.domain.num_blocks() {
            let range = self.domain.block_range(b);
            let a = 1.0 / (1.0 - self.domain.block_sum(x, b)).powi(2);
            let mut dinv_r_sum = 0.0;
            let mut dinv_1_sum = 0.0;
            for j in range.clone() {
                let dinv = x[j] * x[j];
                dinv_r_sum += dinv * rhs[j];
                dinv_1_sum += dinv;
            }
            let factor = a * dinv_r_sum / (1.0 + a * dinv_1_sum);
            for j in range {
                let dinv = x[j] * x[j];
                out[j] = dinv * rhs[j] - factor * dinv;
            }
        }
        Ok(out)
    }

    fn hessian_quad(&self, x: &[f64], h: &[f64]) -> Result<f64> {
        self.check_interior(x)?;
        let mut q = 0.0;
        for b in 0..self.domain.num_blocks() {
            let range = self.domain.block_range(b);
            let a = 1.0 / (1.0 - self.domain.block_sum(x, b)).powi(2);
            let hsum: f64 = h[range.clone()].iter().sum();
            q += a * hsum * hsum;
            for j in range {
                q += (h[j] / x[j]).powi(2);
            }
        }
        Ok(q)
    }

    fn analytic_center(&self) -> Vec<f64> {
        // Per-block symmetry: every coordinate of a d-dimensional simplex
        // equals 1/(d+1), which zeroes the gradient exactly.
        let mut x = vec![0.0; self.domain.total_dim()];
        for b in 0..self.domain.num_blocks() {
            let d = self.domain.block_dims()[b];
            let c = 1.0 / (d as f64 + 1.0);
            for j in self.domain.block_range(b) {
                x[j] = c;
            }
        }
        x
    }
}
