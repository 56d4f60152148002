//! Online bandit maximization of monotone multi-linear DR-submodular functions.
//!
//! The crate provides:
//! - interior-point machinery over products of standard simplexes (log barrier,
//!   local metrics, Dikin transforms, and the damped-Newton step behind the
//!   regularized-leader update),
//! - one-point gradient estimators driven by a single bandit reward,
//! - the block-scheduled bandit loops (`run_bandit_mlsm`, `run_bandit_drsm`,
//!   `run_bandit_mlsm4ps`) and the discrete-to-continuous wrapper for
//!   partition-matroid and ordered-list action spaces,
//! - oblivious / stochastic reward environments, offline optimum oracles, and
//!   `(1 - 1/e)`-regret traces,
//! - numerical property suites (`verify`) used both by the CLI and the
//!   acceptance tests.
//!
//! Everything is deterministic given a seed: one [`sampling::RandomStream`]
//! drives a run and equal seeds reproduce runs bit-for-bit.

pub mod environments;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod learners;
pub(crate) mod linalg;
pub mod objectives;
pub mod reductions;
pub mod report;
pub mod sampling;
pub mod scenarios;
pub mod verify;

pub use error::{Error, Result};
