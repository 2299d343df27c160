//! Certified solver for inequalities of the shape
//! X ≤ A·Π(1 + log(b_i·X^{c_i}))^{k_i}: fixpoint iteration followed by a
//! ball-certified check at X* and a violation check at 1.01·X*.

use super::BoundsError;
use crate::arith::{Dyadic, RealBall};
use num_bigint::BigInt;
use num_traits::{One, Signed};

/// One factor (1 + log(b·X^c))^k.
#[derive(Clone, Copy, Debug)]
pub struct GrowthFactor {
    pub b: u64,
    pub c: u32,
    pub k: u32,
}

impl GrowthFactor {
    pub fn new(b: u64, c: u32, k: u32) -> Self {
        GrowthFactor { b, c, k }
    }
}

fn rhs_ball(a: &RealBall, factors: &[GrowthFactor], x: &BigInt, prec: u32) -> RealBall {
    let wp = prec + 16;
    let mut acc = a.clone();
    let log_x = RealBall::from_bigint(x).ln(wp).expect("x >= 1");
    for f in factors {
        let log_b = RealBall::from_i64(f.b as i64).ln(wp).expect("b >= 1");
        let term = RealBall::from_i64(1)
            .add(&log_b)
            .add(&log_x.mul_i64(f.c as i64));
        acc = acc.mul(&term.pow(f.k as u64, wp)).round_to(wp);
    }
    acc.round_to(prec)
}

fn rhs_f64(a: f64, factors: &[GrowthFactor], x: f64) -> f64 {
    let mut acc = a;
    for f in factors {
        acc *= (1.0 + (f.b as f64).ln() + f.c as f64 * x.ln()).powi(f.k as i32);
    }
    acc
}

/// Largest certified X* with X* ≤ A·Π(1+log(b_i X*^{c_i}))^{k_i}; the value
/// ⌈1.01·X*⌉ provably violates the inequality.
pub fn solve_growth_inequality(
    a: &RealBall,
    factors: &[GrowthFactor],
) -> Result<BigInt, BoundsError> {
    assert!(a.is_positive());
    let a_f = a.to_f64();
    assert!(a_f.is_finite() && a_f > 0.0);
    // fixpoint iteration in floating point; the map is monotone with
    // f(x)/x decreasing, so it contracts toward the unique crossing
    let mut x = a_f;
    let mut converged = false;
    for _ in 0..500 {
        let next = rhs_f64(a_f, factors, x);
        if !next.is_finite() {
            return Err(BoundsError::Divergence);
        }
        if (next - x).abs() <= 1e-9 * x {
            x = next;
            converged = true;
            break;
        }
        x = next;
    }
    if !converged {
        return Err(BoundsError::Divergence);
    }
    let mut candidate = Dyadic::from_f64_approx(x).floor_int();
    if !candidate.is_positive() {
        candidate = BigInt::one();
    }
    let prec = 192;
    // shrink until the inequality at X* is ball-certified
    let mut shrinks = 0;
    loop {
        let f = rhs_ball(a, factors, &candidate, prec);
        if Dyadic::from_bigint(&candidate).le(&f.lo()) {
            break;
        }
        shrinks += 1;
        if shrinks > 64 {
            return Err(BoundsError::Divergence);
        }
        // step down by 1/2048 ≈ 0.05%
        candidate = &candidate - (&candidate >> 11) - BigInt::one();
        if !candidate.is_positive() {
            return Err(BoundsError::Divergence);
        }
    }
    // certify violation at ceil(1.01 X*)
    let violator = (&candidate * BigInt::from(101) + BigInt::from(99)) / BigInt::from(100);
    let fv = rhs_ball(a, factors, &violator, prec);
    if !Dyadic::from_bigint(&violator).gt(&fv.hi()) {
        return Err(BoundsError::Divergence);
    }
    Ok(candidate)
}
