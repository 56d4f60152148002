//! Ordered-list action spaces and position-weighted sequential objectives.
//!
//! An action is an ordered list of length `|G|` over the ground set `G`, which
//! contains a designated dummy element with zero marginal gain everywhere.
//! Rewards take the form `g(S) = sum_i lambda_i g_i({S_j | j <= i})` with
//! monotone submodular position functions `g_i`.

use crate::environments::{DiscreteBandit, ObliviousSequence};
use crate::error::{Error, Result};
use crate::geometry::ProductSimplexDomain;
use crate::learners::ActionRecord;
use crate::objectives::{MultilinearPolynomial, SetFunction};
use crate::sampling::RandomStream;

use super::wrapper::ExtensionMapping;
use super::ENUMERATION_BUDGET;

/// Lists of length `|G|` over ground set ids `0..|G|`, with `dummy` the
/// reserved no-op element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedListSpace {
    ground_size: usize,
    dummy: usize,
}

impl OrderedListSpace {
    pub fn new(ground_size: usize, dummy: usize) -> Result<Self> {
        if ground_size < 2 {
            return Err(Error::Contract(
                "ordered lists need at least the dummy and one real element".into(),
            ));
        }
        if ground_size > 16 {
            return Err(Error::Capacity(
                "ordered-list spaces support ground sizes up to 16".into(),
            ));
        }
        if dummy >= ground_size {
            return Err(Error::Contract("dummy element outside the ground set".into()));
        }
        Ok(Self { ground_size, dummy })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn list_len(&self) -> usize {
        self.ground_size
    }

    pub fn dummy(&self) -> usize {
        self.dummy
    }

    /// The effective alphabet: ground set minus the dummy, in id order.
    pub fn alphabet(&self) -> Vec<usize> {
        (0..self.ground_size).filter(|&e| e != self.dummy).collect()
    }

    /// All lists, enumerated (each position independently ranges over the
    /// alphabet plus the dummy).
    pub fn all_lists(&self) -> Result<Vec<Vec<u16>>> {
        let n = self.list_len();
        let count = (self.ground_size as f64).powi(n as i32);
        if count > ENUMERATION_BUDGET as f64 {
            return Err(Error::Capacity(format!(
                "list space has {count:.0} members, above the {ENUMERATION_BUDGET} budget"
            )));
        }
        let mut lists = Vec::with_capacity(count as usize);
        let mut cur = vec![0u16; n];
        loop {
            lists.push(cur.clone());
            let mut p = 0;
            loop {
                if p == n {
                    return Ok(lists);
                }
                cur[p] += 1;
                if (cur[p] as usize) < self.ground_size {
                    break;
                }
                cur[p] = 0;
                p += 1;
            }
        }
    }
}

/// Position-weighted sum of monotone submodular functions over list prefixes.
#[derive(Debug, Clone)]
pub struct SequentialObjective {
    space: OrderedListSpace,
    lambdas: Vec<f64>,
    position_fns: Vec<SetFunction>,
    bound: f64,
}

impl SequentialObjective {
    pub fn new(
        space: OrderedListSpace,
        lambdas: Vec<f64>,
        position_fns: Vec<SetFunction>,
    ) -> Result<Self> {
        let n = space.list_len();
        if lambdas.len() != n || position_fns.len() != n {
            return Err(Error::Contract(format!(
                "need {n} weights and {n} position functions"
            )));
        }
        if lambdas.iter().any(|l| *l < 0.0) {
            return Err(Error::Contract("position weights must be nonnegative".into()));
        }
        for (i, g) in position_fns.iter().enumerate() {
            if g.ground_size() != space.ground_size() {
                return Err(Error::Contract(format!(
                    "position function {i} has ground size {}, expected {}",
                    g.ground_size(),
                    space.ground_size()
                )));
            }
            if !g.is_monotone() || !g.is_submodular() {
                return Err(Error::Contract(format!(
                    "position function {i} is not monotone submodular"
                )));
            }
            // The dummy must have zero marginal gain everywhere.
            let dummy_bit = 1u32 << space.dummy();
            for s in 0..1u32 << space.ground_size() {
                if (g.value(s | dummy_bit) - g.value(s)).abs() > 1e-12 {
                    return Err(Error::Contract(format!(
                        "dummy element has nonzero marginal gain in position function {i}"
                    )));
                }
            }
        }
        let full = (1u32 << space.ground_size()) - 1;
        let bound = lambdas
            .iter()
            .zip(&position_fns)
            .map(|(l, g)| l * g.value(full))
            .sum();
        Ok(Self {
            space,
            lambdas,
            position_fns,
            bound,
        })
    }

    pub fn space(&self) -> &OrderedListSpace {
        &self.space
    }

    /// Range bound `M`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn value(&self, list: &[u16]) -> f64 {
        debug_assert_eq!(list.len(), self.space.list_len());
        let mut prefix = 0u32;
        let mut total = 0.0;
        for (i, &e) in list.iter().enumerate() {
            prefix |= 1 << e;
            total += self.lambdas[i] * self.position_fns[i].value(prefix);
        }
        total
    }
}

/// Oblivious adversary over sequential objectives; actions are ordered lists.
#[derive(Debug, Clone)]
pub struct ListBandit {
    seq: ObliviousSequence<SequentialObjective>,
    horizon: usize,
    bound: f64,
}

impl ListBandit {
    pub fn new(seq: ObliviousSequence<SequentialObjective>, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::Config("horizon must be positive".into()));
        }
        let space = seq.items()[0].space().clone();
        if seq.items().iter().any(|g| g.space() != &space) {
            return Err(Error::Config("sequence mixes list spaces".into()));
        }
        let bound = seq.items().iter().map(|g| g.bound()).fold(0.0, f64::max);
        Ok(Self { seq, horizon, bound })
    }

    pub fn sequence(&self) -> &ObliviousSequence<SequentialObjective> {
        &self.seq
    }
}

impl DiscreteBandit for ListBandit {
    type Action = Vec<u16>;

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn bound(&self) -> f64 {
        self.bound
    }

    fn reward(&self, t: usize, action: &Vec<u16>) -> f64 {
        self.seq.at(t).value(action)
    }

    fn benchmark_total(&self, action: &Vec<u16>) -> f64 {
        let counts = self.seq.round_counts(self.horizon);
        self.seq
            .items()
            .iter()
            .zip(counts)
            .map(|(g, c)| c as f64 * g.value(action))
            .sum()
    }

    fn benchmark_per_round(&self, action: &Vec<u16>) -> Vec<f64> {
        (1..=self.horizon)
            .map(|t| self.seq.at(t).value(action))
            .collect()
    }
}

/// Extension mapping for ordered lists: one `(|G| - 1)`-dimensional simplex
/// per position, each an independent distribution over the alphabet with the
/// residual mass on the dummy.
#[derive(Debug, Clone)]
pub struct OrderedListExtension {
    space: OrderedListSpace,
    domain: ProductSimplexDomain,
    alphabet: Vec<usize>,
}

impl OrderedListExtension {
    pub fn new(space: OrderedListSpace) -> Result<Self> {
        let alphabet = space.alphabet();
        let domain =
            ProductSimplexDomain::new(vec![alphabet.len(); space.list_len()])?;
        Ok(Self {
            space,
            domain,
            alphabet,
        })
    }

    pub fn space(&self) -> &OrderedListSpace {
        &self.space
    }

    /// Flat coordinate of alphabet element `element` at position `pos`.
    pub fn coordinate(&self, pos: usize, element: usize) -> usize {
        let j = self
            .alphabet
            .iter()
            .position(|&e| e == element)
            .expect("element belongs to the alphabet");
        self.domain.flat_index(pos, j)
    }

    fn check_budget(&self) -> Result<()> {
        let count = (self.space.ground_size() as f64).powi(self.space.list_len() as i32);
        if count > ENUMERATION_BUDGET as f64 {
            return Err(Error::Capacity(format!(
                "list enumeration needs {count:.0} outcomes, above the budget"
            )));
        }
        Ok(())
    }

    fn list_probability(&self, x: &[f64], list: &[u16]) -> f64 {
        let mut pr = 1.0;
        for (pos, &e) in list.iter().enumerate() {
            if e as usize == self.space.dummy() {
                pr *= 1.0 - self.domain.block_sum(x, pos);
            } else {
                pr *= x[self.coordinate(pos, e as usize)];
            }
        }
        pr
    }

    /// Exact extension by enumerating all lists.
    pub fn exact_extension(&self, g: &SequentialObjective, x: &[f64]) -> Result<f64> {
        self.check_budget()?;
        let mut total = 0.0;
        for list in self.space.all_lists()? {
            total += self.list_probability(x, &list) * g.value(&list);
        }
        Ok(total)
    }

    /// The extension as an explicit multi-linear polynomial.
    pub fn extension_polynomial(&self, g: &SequentialObjective) -> Result<MultilinearPolynomial> {
        self.check_budget()?;
        let d = self.domain.total_dim();
        let mut acc: std::collections::BTreeMap<u32, f64> = std::collections::BTreeMap::new();
        for list in self.space.all_lists()? {
            let gval = g.value(&list);
            if gval == 0.0 {
                continue;
            }
            let mut terms: Vec<(u32, f64)> = vec![(0, gval)];
            for (pos, &e) in list.iter().enumerate() {
                if e as usize == self.space.dummy() {
                    let mut next = Vec::with_capacity(terms.len() * (self.alphabet.len() + 1));
                    for &(mask, c) in &terms {
                        next.push((mask, c));
                        for j in 0..self.alphabet.len() {
                            next.push((mask | 1 << self.domain.flat_index(pos, j), -c));
                        }
                    }
                    terms = next;
                } else {
                    let bit = 1u32 << self.coordinate(pos, e as usize);
                    for t in &mut terms {
                        t.0 |= bit;
                    }
                }
            }
            for (mask, c) in terms {
                *acc.entry(mask).or_insert(0.0) += c;
            }
        }
        MultilinearPolynomial::new(d, acc)
    }
}

impl ExtensionMapping for OrderedListExtension {
    type Action = Vec<u16>;

    fn domain(&self) -> &ProductSimplexDomain {
        &self.domain
    }

    fn sample(&self, x: &[f64], stream: &mut RandomStream) -> Vec<u16> {
        let mut list = Vec::with_capacity(self.space.list_len());
        for pos in 0..self.space.list_len() {
            let u = stream.uniform();
            let mut acc = 0.0;
            let mut chosen = self.space.dummy() as u16;
            for (j, &e) in self.alphabet.iter().enumerate() {
                acc += x[self.domain.flat_index(pos, j)];
                if u < acc {
                    chosen = e as u16;
                    break;
                }
            }
            list.push(chosen);
        }
        list
    }

    fn vertex_of(&self, action: &Vec<u16>) -> Vec<f64> {
        let mut x = vec![0.0; self.domain.total_dim()];
        for (pos, &e) in action.iter().enumerate() {
            if e as usize != self.space.dummy() {
                x[self.coordinate(pos, e as usize)] = 1.0;
            }
        }
        x
    }

    fn to_record(&self, action: &Vec<u16>) -> ActionRecord {
        ActionRecord::List(action.clone())
    }

    fn lipschitz_bound(&self, m: f64) -> f64 {
        m * self.space.ground_size() as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::SetFunction;

    /// |G| = 2 with dummy id 1, alphabet {0}; both position functions
    /// indicate whether element 0 is present; unit weights.
    fn two_position_fixture() -> (OrderedListExtension, SequentialObjective) {
        let space = OrderedListSpace::new(2, 1).unwrap();
        let ind = SetFunction::from_oracle(2, 1.0, |s| if s & 1 != 0 { 1.0 } else { 0.0 }).unwrap();
        let g = SequentialObjective::new(space.clone(), vec![1.0, 1.0], vec![ind.clone(), ind])
            .unwrap();
        (OrderedListExtension::new(space).unwrap(), g)
    }

    #[test]
    fn domain_has_one_simplex_per_position() {
        let space = OrderedListSpace::new(4, 0).unwrap();
        let e = OrderedListExtension::new(space).unwrap();
        assert_eq!(e.domain().block_dims(), &[3, 3, 3, 3]);
        assert_eq!(e.domain().total_dim(), 12);
    }

    #[test]
    fn dummy_with_nonzero_gain_is_rejected() {
        let space = OrderedListSpace::new(2, 1).unwrap();
        let bad = SetFunction::from_oracle(2, 2.0, |s| s.count_ones() as f64).unwrap();
        assert!(SequentialObjective::new(space, vec![1.0, 1.0], vec![bad.clone(), bad]).is_err());
    }

    #[test]
    fn oversized_list_spaces_hit_the_budget() {
        // 8^8 lists exceed the enumeration budget.
        let space = OrderedListSpace::new(8, 0).unwrap();
        assert!(matches!(
            space.all_lists(),
            Err(crate::error::Error::Capacity(_))
        ));
    }

    #[test]
    fn exact_extension_matches_hand_expansion() {
        // f(x) = 2 x1 + x2 - x1 x2 for the indicator fixture.
        let (e, g) = two_position_fixture();
        let f = e.extension_polynomial(&g).unwrap();
        assert_eq!(f.terms(), &[(0b01, 2.0), (0b10, 1.0), (0b11, -1.0)]);
        let mut s = RandomStream::new(7);
        for _ in 0..30 {
            let x = e.domain().sample_uniform(&mut s);
            let want = 2.0 * x[0] + x[1] - x[0] * x[1];
            assert!((e.exact_extension(&g, &x).unwrap() - want).abs() < 1e-12);
            assert!((f.eval(&x) - want).abs() < 1e-12);
        }
        // Monotone DR by the mixed-partial sign.
        let dom = e.domain().clone();
        let report = crate::objectives::verify_monotone_dr(&f, &dom, 100, &mut s);
        assert!(report.passed());
    }

    #[test]
    fn zero_point_plays_all_dummies() {
        let (e, g) = two_position_fixture();
        let mut s = RandomStream::new(8);
        let x = vec![0.0; 2];
        for _ in 0..50 {
            let list = e.sample(&x, &mut s);
            assert_eq!(list, vec![1, 1]);
            assert_eq!(g.value(&list), 0.0);
        }
    }

    #[test]
    fn vertices_reproduce_lists() {
        let space = OrderedListSpace::new(3, 2).unwrap();
        let ind =
            SetFunction::from_oracle(3, 2.0, |s| (s & 0b11).count_ones() as f64).unwrap();
        let g = SequentialObjective::new(
            space.clone(),
            vec![0.5, 1.0, 0.25],
            vec![ind.clone(), ind.clone(), ind],
        )
        .unwrap();
        let e = OrderedListExtension::new(space.clone()).unwrap();
        let mut s = RandomStream::new(9);
        for list in space.all_lists().unwrap() {
            let x = e.vertex_of(&list);
            assert!(e.domain().contains(&x));
            for _ in 0..5 {
                assert_eq!(e.sample(&x, &mut s), list);
            }
            assert!((e.exact_extension(&g, &x).unwrap() - g.value(&list)).abs() < 1e-12);
        }
    }

    #[test]
    fn sampler_and_extension_agree_in_expectation() {
        let (e, g) = two_position_fixture();
        let mut s = RandomStream::new(10);
        let x = vec![0.35, 0.6];
        let exact = e.exact_extension(&g, &x).unwrap();
        let n = 100_000;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..n {
            let v = g.value(&e.sample(&x, &mut s));
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / n as f64;
        let var = (sumsq / n as f64 - mean * mean).max(0.0);
        let se = (var / n as f64).sqrt();
        assert!((mean - exact).abs() <= 3.0 * se, "{mean} vs {exact}");
    }
}
