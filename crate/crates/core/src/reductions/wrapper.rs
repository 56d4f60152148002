//! The wrapper loop: drive the product-simplex learner on a discrete bandit
//! through an extension mapping, substituting each requested continuous reward
//! with the sampled discrete reward (an unbiased surrogate).

use crate::environments::{BanditFeedback, DiscreteBandit};
use crate::error::Result;
use crate::geometry::{Barrier, ProductSimplexDomain};
use crate::learners::{run_bandit_mlsm4ps, ActionRecord, LearnerParams, RunHistory};
use crate::sampling::RandomStream;

/// A mapping from a product of simplexes to distributions over a finite
/// action space. Every feasible action has a vertex mapped to its point mass,
/// and the induced continuous surrogate of a monotone submodular reward is
/// multi-linear monotone DR-submodular with value zero at the origin.
pub trait ExtensionMapping {
    type Action: Clone;

    fn domain(&self) -> &ProductSimplexDomain;

    /// Draw a discrete action from the distribution the point encodes.
    fn sample(&self, x: &[f64], stream: &mut RandomStream) -> Self::Action;

    /// The vertex whose distribution is the point mass on `action`.
    fn vertex_of(&self, action: &Self::Action) -> Vec<f64>;

    /// History representation of an action.
    fn to_record(&self, action: &Self::Action) -> ActionRecord;

    /// Declared Lipschitz constant of extensions of rewards bounded by `m`.
    fn lipschitz_bound(&self, m: f64) -> f64;
}

/// Continuous feedback shim over a discrete bandit: every pulled point is
/// resolved to a sampled discrete action whose observed reward is returned
/// and recorded.
pub struct WrapperFeedback<'a, X: ExtensionMapping, D: DiscreteBandit<Action = X::Action>> {
    extension: &'a X,
    env: &'a D,
}

impl<'a, X: ExtensionMapping, D: DiscreteBandit<Action = X::Action>> WrapperFeedback<'a, X, D> {
    pub fn new(extension: &'a X, env: &'a D) -> Self {
        Self { extension, env }
    }
}

impl<X: ExtensionMapping, D: DiscreteBandit<Action = X::Action>> BanditFeedback
    for WrapperFeedback<'_, X, D>
{
    fn horizon(&self) -> usize {
        self.env.horizon()
    }

    fn reward_bound(&self) -> Option<f64> {
        Some(self.env.bound())
    }

    fn pull(&mut self, round: usize, action: &[f64], stream: &mut RandomStream) -> (f64, ActionRecord) {
        let discrete = self.extension.sample(action, stream);
        let reward = self.env.reward(round, &discrete);
        (reward, self.extension.to_record(&discrete))
    }
}

/// Runs the product-simplex learner against a discrete bandit through the
/// extension mapping. The history records the sampled discrete actions and
/// their observed rewards.
pub fn run_mlsm_wrapper<X, D, B>(
    extension: &X,
    barrier: &B,
    env: &D,
    params: &LearnerParams,
    stream: &mut RandomStream,
) -> Result<RunHistory>
where
    X: ExtensionMapping,
    D: DiscreteBandit<Action = X::Action>,
    B: Barrier,
{
    let mut feedback = WrapperFeedback::new(extension, env);
    run_bandit_mlsm4ps(barrier, &mut feedback, params, stream)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::{ObliviousSequence, SetBandit};
    use crate::geometry::ProductSimplexBarrier;
    use crate::objectives::modular;
    use crate::reductions::{PartitionExtension, PartitionMatroid};

    #[test]
    fn wrapper_records_discrete_actions_and_their_rewards() {
        let matroid = PartitionMatroid::new(vec![vec![0, 1], vec![2, 3]], vec![1, 1]).unwrap();
        let ext = PartitionExtension::new(matroid).unwrap();
        let g = modular(&[0.1, 0.4, 0.2, 0.3]).unwrap();
        let env = SetBandit::new(ObliviousSequence::constant(g.clone()), 120).unwrap();
        let barrier = ProductSimplexBarrier::new(ext.domain().clone());
        let params = LearnerParams::explicit(0.05, 6, None).unwrap();
        let mut stream = RandomStream::new(15);
        let hist = run_mlsm_wrapper(&ext, &barrier, &env, &params, &mut stream).unwrap();
        assert_eq!(hist.rounds.len(), 120);
        for r in &hist.rounds {
            match &r.action {
                ActionRecord::Set(s) => {
                    assert!(ext.matroid().is_feasible(*s));
                    assert_eq!(r.reward, g.value(*s));
                }
                _ => panic!("wrapper must record set actions"),
            }
        }
    }

    #[test]
    fn deterministic_reward_at_vertices_matches_extension() {
        // A point mass on a feasible set yields exactly that set's reward.
        let matroid = PartitionMatroid::new(vec![vec![0, 1]], vec![1]).unwrap();
        let ext = PartitionExtension::new(matroid).unwrap();
        let g = modular(&[1.0, 2.0]).unwrap();
        let env = SetBandit::new(ObliviousSequence::constant(g.clone()), 5).unwrap();
        let mut feedback = WrapperFeedback::new(&ext, &env);
        let mut stream = RandomStream::new(16);
        let vertex = ext.vertex_of(&0b10);
        for t in 1..=5 {
            let (r, a) = feedback.pull(t, &vertex, &mut stream);
            assert_eq!(r, 2.0);
            assert_eq!(a, ActionRecord::Set(0b10));
        }
    }
}
