//! Two-logarithm lower bound (Laurent, Mignotte, Nesterenko):
//! log|Γ| > −24.34·D⁴·(max{log b′ + 0.14, 21/D, 1/2})²·log B₁·log B₂.

use crate::arith::{Dyadic, RealBall};
use num_bigint::BigInt;
use num_rational::BigRational;

#[derive(Clone, Debug)]
pub struct LMNInstance {
    pub d_deg: u32,
    pub b_prime: RealBall,
    pub log_b1: RealBall,
    pub log_b2: RealBall,
}

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// Ball containing max(x, y): endpoint-wise maximum.
fn ball_max(x: &RealBall, y: &RealBall) -> RealBall {
    let lo = if x.lo().ge(&y.lo()) { x.lo() } else { y.lo() };
    let hi = if x.hi().ge(&y.hi()) { x.hi() } else { y.hi() };
    RealBall::from_endpoints(&lo, &hi)
}

/// The squared max-term of the theorem, exposed for branch inspection.
pub fn lmn_max_term(inst: &LMNInstance, prec: u32) -> RealBall {
    let wp = prec + 16;
    let log_bp = inst.b_prime.ln(wp).expect("b' > 0");
    let with_slack = log_bp.add(&RealBall::from_rational(&rat(7, 50), wp)); // 0.14
    let deg_floor = RealBall::from_rational(&rat(21, inst.d_deg as i64), wp);
    let half = RealBall::from_rational(&rat(1, 2), wp);
    ball_max(&ball_max(&with_slack, &deg_floor), &half).round_to(prec)
}

pub fn lmn_lower_bound(inst: &LMNInstance, prec: u32) -> RealBall {
    assert!(inst.d_deg >= 1);
    let wp = prec + 16;
    // log B_i >= 1/D
    let floor = Dyadic::div(
        &Dyadic::one(),
        &Dyadic::from_i64(inst.d_deg as i64),
        32,
        crate::arith::RoundDir::Floor,
    );
    assert!(!inst.log_b1.hi().lt(&floor) && !inst.log_b2.hi().lt(&floor));
    let m = lmn_max_term(inst, wp);
    let c = RealBall::from_rational(&rat(2434, 100), wp); // 24.34
    let d4 = BigInt::from(inst.d_deg).pow(4);
    c.mul_bigint(&d4)
        .mul(&m.mul(&m))
        .mul(&inst.log_b1)
        .mul(&inst.log_b2)
        .neg()
        .round_to(prec)
}

/// The folded coefficient 24.34·D⁴·log B₁·log B₂ (the factor that
/// multiplies the squared max-term).
pub fn lmn_folded_coefficient(inst: &LMNInstance, prec: u32) -> RealBall {
    let wp = prec + 16;
    let c = RealBall::from_rational(&rat(2434, 100), wp);
    let d4 = BigInt::from(inst.d_deg).pow(4);
    c.mul_bigint(&d4)
        .mul(&inst.log_b1)
        .mul(&inst.log_b2)
        .round_to(prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ln2;

    fn approx(ball: &RealBall, v: f64, rel: f64) {
        let got = ball.to_f64();
        assert!((got - v).abs() <= rel * v.abs(), "got {:e}, reference {:e}", got, v);
    }

    fn pair_instance(b_prime: i64) -> LMNInstance {
        LMNInstance {
            d_deg: 2,
            b_prime: RealBall::from_i64(b_prime),
            log_b1: ln2(128).mul_i64(2),
            log_b2: RealBall::from_rational(&rat(1, 2), 128),
        }
    }

    #[test]
    fn folded_coefficient_is_270() {
        // 24.34·2⁴·(2 log 2)·(1/2) = 269.94, published as 270
        let c = lmn_folded_coefficient(&pair_instance(100), 128);
        approx(&c, 269.94, 1e-4);
    }

    #[test]
    fn constant_branch_at_large_max() {
        // with max-term at the 21/D = 10.5 branch: -270·10.5² ≈ -29761
        let inst = pair_instance(100); // log 100 + 0.14 ≈ 4.75 < 10.5
        let b = lmn_lower_bound(&inst, 128);
        approx(&b, -269.94 * 10.5 * 10.5, 1e-4);
    }

    #[test]
    fn branch_invariance_below_threshold() {
        // output independent of b' while log b' + 0.14 < 10.5
        let b1 = lmn_lower_bound(&pair_instance(10), 128);
        let b2 = lmn_lower_bound(&pair_instance(15_000), 128);
        assert!(b1.sub(&b2).abs().hi().le(&Dyadic::pow2(-60)));
        // and sensitive above it: 2n₂ with n₂ > 15785 crosses 10.5
        let b3 = lmn_lower_bound(&pair_instance(100_000), 128);
        assert!(b3.hi().lt(&b1.lo()));
    }

    #[test]
    fn degree_one_branch() {
        // D=1, b'=1, log B₁ = log B₂ = 1: -24.34·21² = -10733.94
        let inst = LMNInstance {
            d_deg: 1,
            b_prime: RealBall::from_i64(1),
            log_b1: RealBall::from_i64(1),
            log_b2: RealBall::from_i64(1),
        };
        let b = lmn_lower_bound(&inst, 128);
        assert!(b.contains_rational(&rat(-1_073_394, 100)));
    }
}
