//! Partition matroids and their simplex-product extension mapping.
//!
//! Ground-set elements are ids `0..n` encoded as bitmask bits. The continuous
//! relaxation attaches `r_k` copies of a `|G_k|`-dimensional simplex to block
//! `k`; each simplex is an independent distribution over `G_k` plus a reserved
//! null symbol carrying the residual mass, and a sampled outcome maps to the
//! union of drawn elements with nulls (and duplicate draws) discarded.

use crate::error::{Error, Result};
use crate::geometry::ProductSimplexDomain;
use crate::learners::ActionRecord;
use crate::objectives::{MultilinearPolynomial, SetFunction};
use crate::sampling::RandomStream;

use super::wrapper::ExtensionMapping;
use super::ENUMERATION_BUDGET;

/// Ground set partitioned into blocks with per-block capacities; feasible
/// sets pick at most `r_k` elements from block `k`.
#[derive(Debug, Clone)]
pub struct PartitionMatroid {
    blocks: Vec<Vec<usize>>,
    capacities: Vec<usize>,
    ground_size: usize,
}

impl PartitionMatroid {
    pub fn new(blocks: Vec<Vec<usize>>, capacities: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() || blocks.len() != capacities.len() {
            return Err(Error::Contract(
                "matroid needs matching non-empty blocks and capacities".into(),
            ));
        }
        if capacities.contains(&0) {
            return Err(Error::Contract("capacities must be at least 1".into()));
        }
        let ground_size: usize = blocks.iter().map(|b| b.len()).sum();
        if ground_size == 0 || ground_size > 32 {
            return Err(Error::Capacity(format!(
                "ground size {ground_size} outside supported range 1..=32"
            )));
        }
        let mut seen = vec![false; ground_size];
        for b in &blocks {
            for &e in b {
                if e >= ground_size || seen[e] {
                    return Err(Error::Contract(
                        "blocks must be disjoint and cover 0..ground_size".into(),
                    ));
                }
                seen[e] = true;
            }
        }
        Ok(Self {
            blocks,
            capacities,
            ground_size,
        })
    }

    /// Cardinality constraint: a single block over all of `0..n` with
    /// capacity `k`.
    pub fn cardinality(n: usize, k: usize) -> Result<Self> {
        Self::new(vec![(0..n).collect()], vec![k])
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn capacities(&self) -> &[usize] {
        &self.capacities
    }

    pub fn is_feasible(&self, set: u32) -> bool {
        self.blocks.iter().zip(&self.capacities).all(|(b, &r)| {
            b.iter().filter(|&&e| set & (1 << e) != 0).count() <= r
        })
    }

    /// All feasible sets, enumerated (ground size is capped, so at most
    /// `2^32` candidates are never reached; practical instances stay tiny).
    pub fn feasible_sets(&self) -> Result<Vec<u32>> {
        if self.ground_size > 20 {
            return Err(Error::Capacity(
                "feasible-set enumeration supports ground sizes up to 20".into(),
            ));
        }
        Ok((0u32..1 << self.ground_size)
            .filter(|&s| self.is_feasible(s))
            .collect())
    }
}

/// The extension mapping for partition matroids: one `|G_k|`-dimensional
/// simplex per `(block k, copy i <= r_k)`.
#[derive(Debug, Clone)]
pub struct PartitionExtension {
    matroid: PartitionMatroid,
    domain: ProductSimplexDomain,
    /// For every simplex: the matroid block it samples from.
    simplex_block: Vec<usize>,
}

impl PartitionExtension {
    pub fn new(matroid: PartitionMatroid) -> Result<Self> {
        let mut dims = Vec::new();
        let mut simplex_block = Vec::new();
        for (k, block) in matroid.blocks.iter().enumerate() {
            for _ in 0..matroid.capacities[k] {
                dims.push(block.len());
                simplex_block.push(k);
            }
        }
        let domain = ProductSimplexDomain::new(dims)?;
        Ok(Self {
            matroid,
            domain,
            simplex_block,
        })
    }

    pub fn matroid(&self) -> &PartitionMatroid {
        &self.matroid
    }

    /// Flat coordinate of element `element` in simplex `simplex`.
    pub fn coordinate(&self, simplex: usize, element: usize) -> usize {
        let block = &self.matroid.blocks[self.simplex_block[simplex]];
        let j = block
            .iter()
            .position(|&e| e == element)
            .expect("element belongs to the simplex's block");
        self.domain.flat_index(simplex, j)
    }

    /// Size of the outcome space `prod_k (|G_k| + 1)^{r_k}`.
    fn outcome_count(&self) -> usize {
        let mut n: usize = 1;
        for &k in &self.simplex_block {
            n = n.saturating_mul(self.matroid.blocks[k].len() + 1);
        }
        n
    }

    fn check_budget(&self) -> Result<()> {
        let n = self.outcome_count();
        if n > ENUMERATION_BUDGET {
            return Err(Error::Capacity(format!(
                "outcome space has {n} points, above the {ENUMERATION_BUDGET} budget"
            )));
        }
        Ok(())
    }

    /// Iterates all pre-extension outcomes: per simplex an index into the
    /// block's element list, or `len` for the null symbol. Calls the visitor
    /// with the outcome and its probability under `x`.
    fn for_each_outcome(&self, x: &[f64], mut visit: impl FnMut(&[usize], f64)) {
        let sims = self.simplex_block.len();
        let mut outcome = vec![0usize; sims];
        loop {
            let mut pr = 1.0;
            for (sim, &o) in outcome.iter().enumerate() {
                pr *= self.outcome_probability(x, sim, o);
            }
            visit(&outcome, pr);
            let mut s = 0;
            loop {
                if s == sims {
                    return;
                }
                let cap = self.matroid.blocks[self.simplex_block[s]].len();
                outcome[s] += 1;
                if outcome[s] <= cap {
                    break;
                }
                outcome[s] = 0;
                s += 1;
            }
        }
    }

    fn outcome_probability(&self, x: &[f64], simplex: usize, outcome: usize) -> f64 {
        let d = self.matroid.blocks[self.simplex_block[simplex]].len();
        if outcome < d {
            x[self.domain.flat_index(simplex, outcome)]
        } else {
            1.0 - self.domain.block_sum(x, simplex)
        }
    }

    fn outcome_to_set(&self, outcome: &[usize]) -> u32 {
        let mut set = 0u32;
        for (sim, &o) in outcome.iter().enumerate() {
            let block = &self.matroid.blocks[self.simplex_block[sim]];
            if o < block.len() {
                set |= 1 << block[o];
            }
        }
        set
    }

    /// Exact extension `f(x) = sum_omega Pr(omega) g(pick(omega))` by
    /// enumerating the outcome space.
    pub fn exact_extension(&self, g: &SetFunction, x: &[f64]) -> Result<f64> {
        self.check_budget()?;
        let mut total = 0.0;
        self.for_each_outcome(x, |outcome, pr| {
            total += pr * g.value(self.outcome_to_set(outcome));
        });
        Ok(total)
    }

    /// The extension as an explicit multi-linear polynomial, by expanding the
    /// outcome probabilities symbolically.
    pub fn extension_polynomial(&self, g: &SetFunction) -> Result<MultilinearPolynomial> {
        self.check_budget()?;
        let d = self.domain.total_dim();
        let mut acc: std::collections::BTreeMap<u32, f64> = std::collections::BTreeMap::new();
        self.for_each_outcome(&vec![0.0; d], |outcome, _| {
            let gval = g.value(self.outcome_to_set(outcome));
            if gval == 0.0 {
                return;
            }
            // Expand prod_simplex factor(outcome) into monomials.
            let mut terms: Vec<(u32, f64)> = vec![(0, gval)];
            for (sim, &o) in outcome.iter().enumerate() {
                let block_len = self.matroid.blocks[self.simplex_block[sim]].len();
                if o < block_len {
                    let bit = 1u32 << self.domain.flat_index(sim, o);
                    for t in &mut terms {
                        t.0 |= bit;
                    }
                } else {
                    // Null factor (1 - sum of the simplex's coordinates).
                    let mut next = Vec::with_capacity(terms.len() * (block_len + 1));
                    for &(mask, c) in &terms {
                        next.push((mask, c));
                        for j in 0..block_len {
                            next.push((mask | 1 << self.domain.flat_index(sim, j), -c));
                        }
                    }
                    terms = next;
                }
            }
            for (mask, c) in terms {
                *acc.entry(mask).or_insert(0.0) += c;
            }
        });
        MultilinearPolynomial::new(d, acc)
    }

    /// Expectation oracle for the coordinate-raised coupling: the raised point
    /// sets coordinate `(simplex, element)` to its residual `1 - sum of the
    /// other coordinates`, and the coupled outcome remaps null draws of that
    /// simplex to `element`.
    pub fn raised_coupling_expectation(
        &self,
        g: &SetFunction,
        x: &[f64],
        simplex: usize,
        element: usize,
    ) -> Result<f64> {
        self.check_budget()?;
        let block = &self.matroid.blocks[self.simplex_block[simplex]];
        let pos = block.iter().position(|&e| e == element).unwrap();
        let mut total = 0.0;
        self.for_each_outcome(x, |outcome, pr| {
            let mut mapped = outcome.to_vec();
            if mapped[simplex] == block.len() {
                mapped[simplex] = pos;
            }
            total += pr * g.value(self.outcome_to_set(&mapped));
        });
        Ok(total)
    }

    /// Expectation oracle for the coordinate-zeroed coupling: draws of
    /// `element` in `simplex` are remapped to the null symbol.
    pub fn zeroed_coupling_expectation(
        &self,
        g: &SetFunction,
        x: &[f64],
        simplex: usize,
        element: usize,
    ) -> Result<f64> {
        self.check_budget()?;
        let block = &self.matroid.blocks[self.simplex_block[simplex]];
        let pos = block.iter().position(|&e| e == element).unwrap();
        let mut total = 0.0;
        self.for_each_outcome(x, |outcome, pr| {
            let mut mapped = outcome.to_vec();
            if mapped[simplex] == pos {
                mapped[simplex] = block.len();
            }
            total += pr * g.value(self.outcome_to_set(&mapped));
        });
        Ok(total)
    }
}

impl ExtensionMapping for PartitionExtension {
    type Action = u32;

    fn domain(&self) -> &ProductSimplexDomain {
        &self.domain
    }

    fn sample(&self, x: &[f64], stream: &mut RandomStream) -> u32 {
        let mut set = 0u32;
        for (sim, &k) in self.simplex_block.iter().enumerate() {
            let block = &self.matroid.blocks[k];
            let u = stream.uniform();
            let mut acc = 0.0;
            for (j, &e) in block.iter().enumerate() {
                acc += x[self.domain.flat_index(sim, j)];
                if u < acc {
                    set |= 1 << e;
                    break;
                }
            }
            // Residual mass selects the null symbol: nothing added.
        }
        set
    }

    fn vertex_of(&self, action: &u32) -> Vec<f64> {
        let mut x = vec![0.0; self.domain.total_dim()];
        let mut sim = 0usize;
        for (k, block) in self.matroid.blocks.iter().enumerate() {
            let chosen: Vec<usize> = block
                .iter()
                .copied()
                .filter(|e| action & (1 << e) != 0)
                .collect();
            for (i, &e) in chosen.iter().enumerate().take(self.matroid.capacities[k]) {
                x[self.coordinate(sim + i, e)] = 1.0;
            }
            sim += self.matroid.capacities[k];
        }
        x
    }

    fn to_record(&self, action: &u32) -> ActionRecord {
        ActionRecord::Set(*action)
    }

    fn lipschitz_bound(&self, m: f64) -> f64 {
        m * (self.domain.total_dim() as f64).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::modular;
    use proptest::prelude::*;

    #[test]
    fn matroid_construction_and_feasibility() {
        let m = PartitionMatroid::new(vec![vec![0, 1], vec![2, 3, 4]], vec![1, 2]).unwrap();
        assert_eq!(m.ground_size(), 5);
        assert!(m.is_feasible(0b00101));
        assert!(m.is_feasible(0b01100));
        assert!(!m.is_feasible(0b00011)); // two from block 0
        assert!(!m.is_feasible(0b11100)); // three from block 1
        assert!(PartitionMatroid::new(vec![vec![0], vec![0]], vec![1, 1]).is_err());
        assert!(PartitionMatroid::new(vec![vec![0]], vec![0]).is_err());
    }

    #[test]
    fn domain_shape_follows_capacities() {
        // Single block {a, b} with capacity 1: one 2-dim simplex.
        let e = PartitionExtension::new(
            PartitionMatroid::new(vec![vec![0, 1]], vec![1]).unwrap(),
        )
        .unwrap();
        assert_eq!(e.domain().block_dims(), &[2]);
        // Blocks sized (2, 3) with capacities (2, 1): dims (2, 2, 3).
        let e2 = PartitionExtension::new(
            PartitionMatroid::new(vec![vec![0, 1], vec![2, 3, 4]], vec![2, 1]).unwrap(),
        )
        .unwrap();
        assert_eq!(e2.domain().block_dims(), &[2, 2, 3]);
        assert_eq!(e2.domain().total_dim(), 7);
        // Cardinality constraint is the single-block special case.
        let e3 = PartitionExtension::new(PartitionMatroid::cardinality(4, 2).unwrap()).unwrap();
        assert_eq!(e3.domain().block_dims(), &[4, 4]);
    }

    #[test]
    fn zero_point_always_samples_empty() {
        let e = PartitionExtension::new(
            PartitionMatroid::new(vec![vec![0, 1], vec![2]], vec![1, 1]).unwrap(),
        )
        .unwrap();
        let mut s = RandomStream::new(3);
        let x = vec![0.0; e.domain().total_dim()];
        for _ in 0..100 {
            assert_eq!(e.sample(&x, &mut s), 0);
        }
    }

    #[test]
    fn vertices_are_point_masses() {
        let e = PartitionExtension::new(
            PartitionMatroid::new(vec![vec![0, 1], vec![2, 3]], vec![1, 1]).unwrap(),
        )
        .unwrap();
        let mut s = RandomStream::new(4);
        for set in e.matroid().feasible_sets().unwrap() {
            let x = e.vertex_of(&set);
            assert!(e.domain().contains(&x));
            for _ in 0..20 {
                assert_eq!(e.sample(&x, &mut s), set);
            }
        }
    }

    #[test]
    fn sampler_frequencies_match_coordinates() {
        // G = {a, b}, r = 1, x = (0.3, 0.5): {a}: 0.3, {b}: 0.5, {}: 0.2.
        let e = PartitionExtension::new(
            PartitionMatroid::new(vec![vec![0, 1]], vec![1]).unwrap(),
        )
        .unwrap();
        let mut s = RandomStream::new(5);
        let x = vec![0.3, 0.5];
        let n = 100_000;
        let mut counts = [0usize; 3];
        for _ in 0..n {
            match e.sample(&x, &mut s) {
                0b01 => counts[0] += 1,
                0b10 => counts[1] += 1,
                0 => counts[2] += 1,
                other => panic!("impossible sample {other}"),
            }
        }
        for (c, p) in counts.iter().zip([0.3, 0.5, 0.2]) {
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((*c as f64 / n as f64 - p).abs() <= 3.0 * se);
        }
    }

    #[test]
    fn exact_extension_of_modular_instance() {
        // g({a}) = 1, g({b}) = 2: f(x) = x_a + 2 x_b.
        let g = modular(&[1.0, 2.0]).unwrap();
        let e = PartitionExtension::new(
            PartitionMatroid::new(vec![vec![0, 1]], vec![1]).unwrap(),
        )
        .unwrap();
        let f = e.extension_polynomial(&g).unwrap();
        assert_eq!(f.terms(), &[(0b01, 1.0), (0b10, 2.0)]);
        let x = [0.25, 0.5];
        assert!((e.exact_extension(&g, &x).unwrap() - 1.25).abs() < 1e-12);
        // f(0) = 0 and vertex agreement.
        assert_eq!(e.exact_extension(&g, &[0.0, 0.0]).unwrap(), 0.0);
        for set in e.matroid().feasible_sets().unwrap() {
            let v = e.vertex_of(&set);
            assert!((e.exact_extension(&g, &v).unwrap() - g.value(set)).abs() < 1e-12);
        }
    }

    #[test]
    fn oversized_outcome_spaces_hit_the_budget() {
        // 11^7 outcomes exceed the enumeration budget.
        let m = PartitionMatroid::cardinality(10, 7).unwrap();
        let e = PartitionExtension::new(m).unwrap();
        let g = modular(&[0.1; 10]).unwrap();
        let x = vec![0.01; e.domain().total_dim()];
        assert!(matches!(
            e.exact_extension(&g, &x),
            Err(crate::error::Error::Capacity(_))
        ));
    }

    #[test]
    fn polynomial_and_enumeration_agree() {
        let g = crate::objectives::coverage(
            4,
            &[vec![0], vec![0, 1], vec![1, 2], vec![2]],
            &[0.5, 1.0, 0.75],
        )
        .unwrap();
        let e = PartitionExtension::new(
            PartitionMatroid::new(vec![vec![0, 1], vec![2, 3]], vec![1, 1]).unwrap(),
        )
        .unwrap();
        let f = e.extension_polynomial(&g).unwrap();
        let mut s = RandomStream::new(6);
        for _ in 0..50 {
            let x = e.domain().sample_uniform(&mut s);
            let a = f.eval(&x);
            let b = e.exact_extension(&g, &x).unwrap();
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    proptest! {
        #[test]
        fn sampled_sets_are_always_feasible(
            sizes in proptest::collection::vec(1usize..4, 1..4),
            seed in any::<u64>(),
        ) {
            let mut blocks = Vec::new();
            let mut caps = Vec::new();
            let mut next = 0usize;
            for s in &sizes {
                blocks.push((next..next + s).collect::<Vec<_>>());
                caps.push(1 + (next % 2).min(*s - 1));
                next += s;
            }
            let matroid = PartitionMatroid::new(blocks, caps).unwrap();
            let ext = PartitionExtension::new(matroid).unwrap();
            let mut stream = RandomStream::new(seed);
            for _ in 0..20 {
                let x = ext.domain().sample_uniform(&mut stream);
                let set = ext.sample(&x, &mut stream);
                prop_assert!(ext.matroid().is_feasible(set));
            }
        }
    }
}
