//! Baker-type lower bounds (three-log and two-log theorems), the fixpoint
//! solver for transcendental growth inequalities, and the scripted chain of
//! deductions that produces the absolute ceilings for each index scenario.

pub mod chain;
pub mod lmn;
pub mod matveev;
pub mod solver;

pub use chain::{lemma_chain, Scenario, ScenarioBounds, StageRecord, StageRole};
pub use lmn::{lmn_lower_bound, LMNInstance};
pub use matveev::{matveev_lower_bound, matveev_prefactor, MatveevInstance};
pub use solver::{solve_growth_inequality, GrowthFactor};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("fixpoint iteration failed to contract or certify")]
    Divergence,
    #[error(transparent)]
    Arith(#[from] crate::ArithError),
}
