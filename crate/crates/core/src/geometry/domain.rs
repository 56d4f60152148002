//! Products of standard simplexes.

use crate::error::{Error, Result};
use crate::sampling::RandomStream;

use super::{BOUNDARY_TOL, MEMBERSHIP_TOL};

/// A product of standard simplexes: block `i` holds `dims[i]` coordinates
/// `x_{i,1..d_i}` constrained by `x_{i,j} >= 0` and `sum_j x_{i,j} <= 1`.
///
/// Coordinates of all blocks are concatenated into one flat vector; helpers
/// translate between flat indices and `(block, within-block)` pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSimplexDomain {
    dims: Vec<usize>,
    offsets: Vec<usize>,
}

impl ProductSimplexDomain {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Parameter("domain needs at least one simplex".into()));
        }
        if dims.contains(&0) {
            return Err(Error::Parameter("simplex dimensions must be positive".into()));
        }
        let mut offsets = Vec::with_capacity(dims.len() + 1);
        let mut acc = 0;
        for &d in &dims {
            offsets.push(acc);
            acc += d;
        }
        offsets.push(acc);
        Ok(Self { dims, offsets })
    }

    /// Single simplex of the given dimension.
    pub fn simplex(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    /// The unit box `[0,1]^n`, i.e. `n` one-dimensional simplexes.
    pub fn unit_box(n: usize) -> Result<Self> {
        Self::new(vec![1; n])
    }

    pub fn total_dim(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn block_range(&self, block: usize) -> std::ops::Range<usize> {
        self.offsets[block]..self.offsets[block + 1]
    }

    /// Flat index of coordinate `j` of block `i`.
    pub fn flat_index(&self, block: usize, j: usize) -> usize {
        debug_assert!(j < self.dims[block]);
        self.offsets[block] + j
    }

    /// Block containing a flat coordinate index.
    pub fn block_of(&self, flat: usize) -> usize {
        match self.offsets.binary_search(&flat) {
            Ok(b) if b < self.dims.len() => b,
            Ok(b) => b - 1,
            Err(b) => b - 1,
        }
    }

    pub fn block_sum(&self, x: &[f64], block: usize) -> f64 {
        x[self.block_range(block)].iter().sum()
    }

    /// Largest constraint violation of `x`: coordinate negativity or block-sum
    /// excess. Zero or negative means the point is inside the closed domain.
    pub fn membership_violation(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.total_dim());
        let mut v = f64::NEG_INFINITY;
        for &c in x {
            v = v.max(-c);
        }
        for b in 0..self.num_blocks() {
            v = v.max(self.block_sum(x, b) - 1.0);
        }
        v
    }

    /// Closed-domain membership, with a small numerical slack.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.membership_violation(x) <= MEMBERSHIP_TOL
    }

    /// Checks that every barrier argument (`x_{i,j}` and `1 - sum_j x_{i,j}`)
    /// is at least `tol`, naming the first violated constraint otherwise.
    /// The negated comparisons also reject NaN coordinates.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn require_interior(&self, x: &[f64], tol: f64) -> Result<()> {
        if x.len() != self.total_dim() {
            return Err(Error::Contract(format!(
                "point has dimension {}, domain has {}",
                x.len(),
                self.total_dim()
            )));
        }
        for b in 0..self.num_blocks() {
            for j in 0..self.dims[b] {
                let c = x[self.flat_index(b, j)];
                if !(c >= tol) {
                    return Err(Error::Domain(format!(
                        "coordinate {} of simplex {} is {c:.3e}, below interior tolerance {tol:.1e}",
                        j, b
                    )));
                }
            }
            let slack = 1.0 - self.block_sum(x, b);
            if !(slack >= tol) {
                return Err(Error::Domain(format!(
                    "simplex {} has slack {slack:.3e}, below interior tolerance {tol:.1e}",
                    b
                )));
            }
        }
        Ok(())
    }

    pub fn is_interior(&self, x: &[f64]) -> bool {
        self.require_interior(x, BOUNDARY_TOL).is_ok()
    }

    /// Radius `D` of a Euclidean ball containing the domain: each block lies
    /// in its unit cross-polytope slice, so `D = sqrt(#blocks)`.
    pub fn euclidean_radius(&self) -> f64 {
        (self.num_blocks() as f64).sqrt()
    }

    /// Uniform sample from the solid domain (per block, uniform on the solid
    /// simplex via exponential spacings).
    pub fn sample_uniform(&self, stream: &mut RandomStream) -> Vec<f64> {
        let mut x = vec![0.0; self.total_dim()];
        for b in 0..self.num_blocks() {
            let d = self.dims[b];
            let mut e: Vec<f64> = (0..=d)
                .map(|_| -((1.0 - stream.uniform()).max(f64::MIN_POSITIVE)).ln())
                .collect();
            let total: f64 = e.iter().sum();
            for v in &mut e {
                *v /= total;
            }
            for j in 0..d {
                x[self.flat_index(b, j)] = e[j];
            }
        }
        x
    }

    /// Uniform sample shrunk toward the analytic-center scale so every barrier
    /// argument stays at least `margin`.
    pub fn sample_interior(&self, stream: &mut RandomStream, margin: f64) -> Vec<f64> {
        loop {
            let x = self.sample_uniform(stream);
            if self.require_interior(&x, margin).is_ok() {
                return x;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn construction_and_indexing() {
        let dom = ProductSimplexDomain::new(vec![2, 3]).unwrap();
        assert_eq!(dom.total_dim(), 5);
        assert_eq!(dom.num_blocks(), 2);
        assert_eq!(dom.block_range(1), 2..5);
        assert_eq!(dom.flat_index(1, 2), 4);
        assert_eq!(dom.block_of(0), 0);
        assert_eq!(dom.block_of(2), 1);
        assert_eq!(dom.block_of(4), 1);
        assert!(ProductSimplexDomain::new(vec![]).is_err());
        assert!(ProductSimplexDomain::new(vec![2, 0]).is_err());
    }

    #[test]
    fn membership_basics() {
        let dom = ProductSimplexDomain::new(vec![2]).unwrap();
        assert!(dom.contains(&[0.0, 0.0]));
        assert!(dom.contains(&[0.5, 0.5]));
        assert!(dom.contains(&[1.0, 0.0]));
        assert!(!dom.contains(&[0.6, 0.6]));
        assert!(!dom.contains(&[-0.1, 0.2]));
        assert!(dom.is_interior(&[0.3, 0.3]));
        assert!(!dom.is_interior(&[0.0, 0.3]));
        assert!(!dom.is_interior(&[0.5, 0.5]));
    }

    #[test]
    fn uniform_samples_are_members() {
        let dom = ProductSimplexDomain::new(vec![3, 1, 4]).unwrap();
        let mut s = RandomStream::new(11);
        for _ in 0..500 {
            let x = dom.sample_uniform(&mut s);
            assert!(dom.contains(&x));
        }
        for _ in 0..100 {
            let x = dom.sample_interior(&mut s, 1e-6);
            assert!(dom.require_interior(&x, 1e-6).is_ok());
        }
    }

    proptest! {
        #[test]
        fn uniform_samples_respect_arbitrary_shapes(
            dims in proptest::collection::vec(1usize..5, 1..5),
            seed in any::<u64>(),
        ) {
            let dom = ProductSimplexDomain::new(dims).unwrap();
            let mut s = RandomStream::new(seed);
            for _ in 0..20 {
                let x = dom.sample_uniform(&mut s);
                prop_assert!(dom.contains(&x));
            }
        }
    }
}
