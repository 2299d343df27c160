//! Reduction procedures that turn the absolute ceilings from the bounds
//! module into small index ranges: certified continued fractions with the
//! largest-partial-quotient bound, the inhomogeneous-approximation lemma,
//! and a certified lattice (LLL) lower bound for linear forms.

pub mod cf;
pub mod dp;
pub mod lll;

pub use cf::{cf_expand, largest_alpha_exponent, legendre_apply, legendre_bound, ContinuedFraction};
pub use dp::{dp_reduce, DPQuery, DPResult};
pub use lll::{
    lll_form_lower_bound, lll_reduce_basis, pell_product_form_instance, pell_product_form_sweep,
    LLLInstance, LLLOutcome, SweepOutcome,
};

use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReduceError {
    /// The oracle value is rational; the complete finite continued fraction
    /// is attached.
    #[error("rational input; finite continued fraction has {} quotients", .0.len())]
    Terminated(Vec<BigInt>),
    /// Every attempted convergent produced a nonpositive separation.
    #[error("no convergent certified a positive epsilon")]
    AllConvergentsFailed,
    /// Basis vectors are linearly dependent.
    #[error("basis is singular")]
    SingularBasis,
    /// The reduced lattice is too short for the lower-bound formula
    /// (theta^2 < Q + R^2); the form may vanish inside the coefficient box.
    #[error("lattice condition theta^2 >= Q + R^2 failed")]
    ConditionFailed,
    #[error(transparent)]
    Arith(#[from] crate::ArithError),
}
