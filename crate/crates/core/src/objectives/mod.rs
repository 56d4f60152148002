//! Objective representations: set functions over small ground sets, explicit
//! multi-linear polynomials (including multi-linear extensions), the
//! reweighted-integral auxiliary function, and the monotone/DR verifiers used
//! as test oracles.

mod auxiliary;
mod library;
mod multilinear;
mod quadrature;
mod set_function;

pub use auxiliary::AuxiliaryFunction;
pub use library::{
    concave_over_modular, coverage, modular, random_monotone_dr_instance, uniform_weight_coverage,
};
pub use multilinear::{verify_monotone_dr, DrReport, DrViolation, MultilinearPolynomial};
pub use quadrature::GaussLegendre;
pub use set_function::SetFunction;

/// Cap on ground-set size for exhaustive `2^n` work.
pub const MAX_GROUND_SIZE: usize = 20;
