//! The non-oblivious auxiliary function
//! `F(x) = integral_0^1 (e^{z-1}/z) f(z x) dz`.
//!
//! Gradient steps on `F` instead of `f` are what lift the approximation ratio
//! to `1 - 1/e`; this module evaluates `F` and its gradient by quadrature as a
//! numerical oracle.

use crate::error::{Error, Result};

use super::multilinear::MultilinearPolynomial;
use super::quadrature::GaussLegendre;

pub const DEFAULT_NODES: usize = 64;

/// Quadrature view of the auxiliary function of a multi-linear objective with
/// `f(0) = 0`.
///
/// The `1/z` factor is benign: with `f(0) = 0`, `f(z x)/z` stays bounded, and
/// the `z -> 0` limit is `<grad f(0), x>`. Gauss-Legendre nodes are interior,
/// so evaluation never touches the endpoint itself.
#[derive(Debug, Clone)]
pub struct AuxiliaryFunction {
    f: MultilinearPolynomial,
    rule: GaussLegendre,
}

impl AuxiliaryFunction {
    pub fn new(f: MultilinearPolynomial) -> Result<Self> {
        Self::with_nodes(f, DEFAULT_NODES)
    }

    pub fn with_nodes(f: MultilinearPolynomial, nodes: usize) -> Result<Self> {
        let at_zero = f.eval(&vec![0.0; f.dim()]);
        if at_zero.abs() > 1e-12 {
            return Err(Error::Contract(format!(
                "auxiliary function requires f(0) = 0, got {at_zero}"
            )));
        }
        Ok(Self {
            f,
            rule: GaussLegendre::new(nodes),
        })
    }

    pub fn base(&self) -> &MultilinearPolynomial {
        &self.f
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let mut scaled = vec![0.0; x.len()];
        self.rule
            .points()
            .map(|(z, w)| {
                for (s, xi) in scaled.iter_mut().zip(x) {
                    *s = z * xi;
                }
                w * (z - 1.0).exp() * self.f.eval(&scaled) / z
            })
            .sum()
    }

    /// `grad F(x) = integral_0^1 e^{z-1} grad f(z x) dz`.
    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        let mut scaled = vec![0.0; x.len()];
        for (z, w) in self.rule.points() {
            for (s, xi) in scaled.iter_mut().zip(x) {
                *s = z * xi;
            }
            let g = self.f.gradient(&scaled);
            let c = w * (z - 1.0).exp();
            for (o, gi) in out.iter_mut().zip(g) {
                *o += c * gi;
            }
        }
        out
    }
}
