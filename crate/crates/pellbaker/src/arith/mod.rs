//! Certified arbitrary-precision arithmetic: dyadic rationals, ball-valued
//! reals, exact quadratic values, and an exact expression language.

pub mod ball;
pub mod dyadic;
pub mod expr;
pub mod quad;

pub use ball::{escalate, ln2, ln_dyadic, prec_ceiling, BallOrdering, RealBall};
pub use dyadic::{rational_to_f64, Dyadic, RoundDir};
pub use expr::RealExpr;
pub use quad::QuadraticValue;
