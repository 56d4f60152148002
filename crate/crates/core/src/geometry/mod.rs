//! Barrier geometry over products of standard simplexes: domains, the log
//! barrier with its local metrics and Dikin transforms, and the damped-Newton
//! solver behind the regularized-leader step.

mod barrier;
mod domain;
mod newton;

pub use barrier::{Barrier, LocalMetric, ProductSimplexBarrier};
pub use domain::ProductSimplexDomain;
pub use newton::{rftl_argmin, rftl_argmin_traced, NewtonTrace};

/// Log arguments this close to zero count as boundary; iterates are kept at
/// least this far inside.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// First-order residual tolerance for the argmin step.
pub const ARGMIN_TOL: f64 = 1e-8;

/// Newton iteration cap for the argmin step.
pub const MAX_NEWTON_ITERS: usize = 200;

/// Slack allowed by closed-domain membership checks, to absorb rounding in
/// points assembled from metric products.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
