//! Certified toolkit for the Diophantine problem "which Pell-equation
//! x-coordinates are products of two Pell numbers": ball arithmetic,
//! recurrence sequences, Pell-equation machinery, logarithmic heights,
//! Baker-type lower bounds, reduction procedures (continued fractions,
//! Dujella-Petho, LLL), and the final exhaustive search.

pub mod arith;
pub mod bounds;
pub mod driver;
pub mod heights;
pub mod pelleq;
pub mod reduce;
pub mod search;
pub mod sequences;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArithError {
    #[error("input ball is not strictly positive")]
    NonPositiveInput,
    #[error("precision ceiling of {ceiling} bits exhausted")]
    PrecisionExhausted { ceiling: u32 },
    #[error("division by a ball containing zero")]
    DivisionByZeroBall,
}
