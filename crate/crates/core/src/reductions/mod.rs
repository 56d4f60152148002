//! Discrete-to-continuous reductions: partition-matroid and ordered-list
//! action spaces, their extension mappings onto products of simplexes, and the
//! wrapper that drives the product-simplex learner with sampled discrete
//! rewards.

mod ordered_list;
mod partition;
mod wrapper;

pub use ordered_list::{ListBandit, OrderedListExtension, OrderedListSpace, SequentialObjective};
pub use partition::{PartitionExtension, PartitionMatroid};
pub use wrapper::{run_mlsm_wrapper, ExtensionMapping, WrapperFeedback};

/// Enumeration budget for exact extension computations.
pub const ENUMERATION_BUDGET: usize = 1_000_000;
