//! Lower bound for linear forms in logarithms of algebraic numbers:
//! log|Λ| > −1.4·30^{t+3}·t^{4.5}·D²(1+log D)(1+log B)·A₁⋯A_t.

use crate::arith::{ln2, RealBall};
use crate::ArithError;
use num_bigint::BigInt;
use num_rational::BigRational;

/// Parameter bundle: t numbers in a degree-D real field, B ≥ max|b_i|,
/// A_i ≥ max(D·h(γ_i), |log γ_i|, 0.16).
#[derive(Clone, Debug)]
pub struct MatveevInstance {
    pub t: u32,
    pub d_deg: u32,
    pub b: RealBall,
    pub a: Vec<RealBall>,
}

impl MatveevInstance {
    pub fn validate(&self) {
        assert!(self.t >= 1 && self.d_deg >= 1);
        assert_eq!(self.a.len(), self.t as usize);
        let min_a = RealBall::from_rational(&BigRational::new(BigInt::from(4), BigInt::from(25)), 64);
        for (i, ai) in self.a.iter().enumerate() {
            assert!(
                !ai.hi().lt(&min_a.lo()),
                "A_{} below the 0.16 floor: {}",
                i + 1,
                ai
            );
        }
    }
}

/// 1.4·30^{t+3}·t^{4.5}·D²·(1+log D), with the degree-log argument made
/// explicit so published foldings that evaluate it at a different value can
/// be reproduced verbatim.
pub fn matveev_base(t: u32, d_deg: u32, degree_log_arg: u32, prec: u32) -> RealBall {
    let wp = prec + 16;
    // 1.4 = 7/5 exactly
    let c = RealBall::from_rational(&BigRational::new(BigInt::from(7), BigInt::from(5)), wp);
    let thirty = BigInt::from(30).pow(t + 3);
    let t4 = BigInt::from(t).pow(4);
    let sqrt_t = RealBall::sqrt_bigint(&BigInt::from(t), wp).expect("t >= 1");
    let dsq = BigInt::from(d_deg).pow(2);
    let one_plus_logd = RealBall::from_i64(1).add(
        &RealBall::from_i64(degree_log_arg as i64)
            .ln(wp)
            .expect("degree >= 1"),
    );
    c.mul_bigint(&thirty)
        .mul_bigint(&t4)
        .mul(&sqrt_t)
        .mul_bigint(&dsq)
        .mul(&one_plus_logd)
        .round_to(prec)
}

/// The folded positive prefactor 1.4·30^{t+3}·t^{4.5}·D²(1+log D)·Π factors,
/// i.e. the theorem's constant with the chosen A_i (or their per-index units)
/// multiplied in and (1+log B) left out.
pub fn matveev_prefactor(
    t: u32,
    d_deg: u32,
    degree_log_arg: u32,
    factors: &[RealBall],
    prec: u32,
) -> RealBall {
    let wp = prec + 16;
    let mut acc = matveev_base(t, d_deg, degree_log_arg, wp);
    for f in factors {
        acc = acc.mul(f).round_to(wp);
    }
    acc.round_to(prec)
}

/// Full theorem evaluation; strictly negative.
pub fn matveev_lower_bound(inst: &MatveevInstance, prec: u32) -> Result<RealBall, ArithError> {
    inst.validate();
    let wp = prec + 16;
    let one_plus_logb = RealBall::from_i64(1).add(&inst.b.ln(wp)?);
    let pref = matveev_prefactor(inst.t, inst.d_deg, inst.d_deg, &inst.a, wp);
    Ok(pref.mul(&one_plus_logb).neg().round_to(prec))
}

/// Ball containing log 2 (convenience for A_i assembly).
pub fn log2_ball(prec: u32) -> RealBall {
    ln2(prec)
}

/// Ball containing log(1+√2).
pub fn log_alpha_ball(prec: u32) -> RealBall {
    crate::arith::QuadraticValue::pell_alpha()
        .ln(prec)
        .expect("alpha > 0")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::BallOrdering;

    fn approx(ball: &RealBall, v: f64, rel: f64) {
        let got = ball.to_f64();
        assert!(
            (got - v).abs() <= rel * v.abs(),
            "got {:e}, reference {:e}",
            got,
            v
        );
    }

    #[test]
    fn trivial_instance_exact_product() {
        // t=1, D=1, B=1, A=(0.16): -1.4·30⁴·0.16 = -181440
        let inst = MatveevInstance {
            t: 1,
            d_deg: 1,
            b: RealBall::from_i64(1),
            a: vec![RealBall::from_rational(
                &BigRational::new(BigInt::from(4), BigInt::from(25)),
                64,
            )],
        };
        let b = matveev_lower_bound(&inst, 96).unwrap();
        let reference = BigRational::from_integer(BigInt::from(-181_440));
        assert!(b.contains_rational(&reference));
        assert!(b.is_negative());
    }

    #[test]
    fn folded_constant_unit_ambient_field() {
        // t=3, D=4 with A = (2 log δ, 4 log 2, 2 log α): per unit of
        // log δ·(1+log 2m) the constant is 5.3438e13 (published as 5.34e13)
        let p = 192;
        let factors = [
            RealBall::from_i64(2),
            log2_ball(p).mul_i64(4),
            log_alpha_ball(p).mul_i64(2),
        ];
        let c = matveev_prefactor(3, 4, 4, &factors, p);
        approx(&c, 5.3438e13, 1e-3);
    }

    #[test]
    fn folded_constant_pair_field() {
        // t=3, D=2 with A = (4ℓ₁ log 2, 4ℓ₂ log 2, log α) per unit ℓ₁ℓ₂:
        // 6.5703e12 (published as 6.57e12)
        let p = 192;
        let factors = [
            log2_ball(p).mul_i64(4),
            log2_ball(p).mul_i64(4),
            log_alpha_ball(p),
        ];
        let c = matveev_prefactor(3, 2, 2, &factors, p);
        approx(&c, 6.5703e12, 1e-3);
    }

    #[test]
    fn monotone_in_a_and_b() {
        let p = 128;
        let mk = |a3: i64, b: i64| MatveevInstance {
            t: 3,
            d_deg: 2,
            b: RealBall::from_i64(b),
            a: vec![
                RealBall::from_i64(1),
                RealBall::from_i64(1),
                RealBall::from_i64(a3),
            ],
        };
        let base = matveev_lower_bound(&mk(1, 10), p).unwrap();
        let bigger_a = matveev_lower_bound(&mk(5, 10), p).unwrap();
        let bigger_b = matveev_lower_bound(&mk(1, 1000), p).unwrap();
        assert_eq!(bigger_a.compare(&base), BallOrdering::Less);
        assert_eq!(bigger_b.compare(&base), BallOrdering::Less);
    }

    #[test]
    #[should_panic(expected = "0.16 floor")]
    fn rejects_small_a() {
        let inst = MatveevInstance {
            t: 1,
            d_deg: 1,
            b: RealBall::from_i64(1),
            a: vec![RealBall::from_rational(
                &BigRational::new(BigInt::from(1), BigInt::from(10)),
                64,
            )],
        };
        let _ = matveev_lower_bound(&inst, 64);
    }
}
