//! Randomized property suites: soundness of the certified reduction
//! procedures against exhaustive oracles, and algebraic identities of the
//! sequence and Pell-equation layers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use pellbaker::arith::{QuadraticValue, RealExpr};
use pellbaker::pelleq::{fundamental_solution, invert_x, x_term_at};
use pellbaker::reduce::{
    cf_expand, dp_reduce, lll_form_lower_bound, DPQuery, LLLInstance, ReduceError,
};
use proptest::prelude::*;

fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn is_square(d: u64) -> bool {
    let r = (d as f64).sqrt().round() as u64;
    r * r == d
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// x_n^2 - d y_n^2 = epsilon^n implies d divides x_n^2 - epsilon^n;
    /// and inverting x_n at index n recovers the fundamental x-value.
    #[test]
    fn pell_identity_and_inversion(d in 2u64..=100, n in 1u64..=15) {
        prop_assume!(!is_square(d));
        let db = BigInt::from(d);
        let fund = fundamental_solution(&db).unwrap();
        let xn = x_term_at(&fund.x1, fund.epsilon, n);
        let eps_n = if fund.epsilon == -1 && n % 2 == 1 {
            BigInt::from(-1)
        } else {
            BigInt::one()
        };
        prop_assert!(((&xn * &xn - eps_n) % &db).is_zero());
        prop_assert_eq!(invert_x(&xn, n, fund.epsilon), Some(fund.x1.clone()));
    }

    /// Convergent determinant identity and denominator growth for square
    /// roots of random nonsquare integers.
    #[test]
    fn convergent_identities(d in 2u64..=200) {
        prop_assume!(!is_square(d));
        let oracle = RealExpr::Quad(QuadraticValue::sqrt_d(BigInt::from(d)));
        let cf = cf_expand(&oracle, 12).unwrap();
        for k in 1..cf.convergents.len() {
            let (ref p, ref q) = cf.convergents[k];
            let (ref pp, ref qp) = cf.convergents[k - 1];
            let want = if k % 2 == 1 { BigInt::one() } else { BigInt::from(-1) };
            prop_assert_eq!(p * qp - pp * q, want);
            if k >= 2 {
                prop_assert!(q > qp);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    /// The certified lattice lower bound never exceeds |x1 t1 + x2 t2 + x3 t3|
    /// for any nonzero coefficient vector in the box (exact rational check).
    #[test]
    fn lattice_bound_is_sound(
        nums in prop::array::uniform3(-60i64..=60),
        dens in prop::array::uniform3(1i64..=20),
        xs in prop::array::uniform3(1i64..=8),
    ) {
        let taus: Vec<BigRational> =
            (0..3).map(|i| rat(nums[i], dens[i])).collect();
        prop_assume!(taus.iter().any(|t| !t.is_zero()));
        let x: Vec<BigInt> = xs.iter().map(|&v| BigInt::from(v)).collect();
        let xmax = *xs.iter().max().unwrap();
        // any C above the lemma threshold (3 * max X)^3 is admissible
        let c = BigInt::from(3 * xmax).pow(3) + BigInt::from(1000);
        let inst = LLLInstance {
            tau: taus.iter().cloned().map(RealExpr::Rat).collect(),
            x,
            c,
        };
        match lll_form_lower_bound(&inst) {
            Err(ReduceError::ConditionFailed) => {
                // the form may vanish or come too close to zero in the box
            }
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {}", e))),
            Ok(out) => {
                for a in -xs[0]..=xs[0] {
                    for b in -xs[1]..=xs[1] {
                        for c3 in -xs[2]..=xs[2] {
                            if a == 0 && b == 0 && c3 == 0 {
                                continue;
                            }
                            let v = rat(a, 1) * &taus[0]
                                + rat(b, 1) * &taus[1]
                                + rat(c3, 1) * &taus[2];
                            prop_assert!(
                                v.abs() >= out.bound,
                                "|{}*t1 + {}*t2 + {}*t3| = {} < bound {}",
                                a, b, c3, v.abs(), out.bound
                            );
                        }
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(25))]

    /// The inhomogeneous-approximation reduction is sound: no u <= M admits
    /// an exponent w above the returned w_max (floating-point oracle).
    #[test]
    fn dp_reduction_is_sound(
        d in 2u64..=30,
        den in 1i64..=5,
        mu_p in 1i64..=20,
        mu_q in 2i64..=20,
        a_int in 1i64..=50,
        b_int in 2i64..=5,
        m in 10i64..=2000,
    ) {
        prop_assume!(!is_square(d));
        let tau_quad = QuadraticValue::new(
            BigRational::zero(),
            rat(1, den),
            BigInt::from(d),
        );
        let query = DPQuery {
            tau: RealExpr::Quad(tau_quad),
            mu: RealExpr::Rat(rat(mu_p, mu_q)),
            a: RealExpr::Rat(rat(a_int, 1)),
            b: RealExpr::Rat(rat(b_int, 1)),
            m: BigInt::from(m),
            max_attempts: 12,
        };
        match dp_reduce(&query) {
            Err(ReduceError::AllConvergentsFailed) => {
                // separation not certifiable for this mu; nothing to check
            }
            Err(e) => return Err(TestCaseError::fail(format!("unexpected error: {}", e))),
            Ok(res) => {
                prop_assert!(res.q > BigInt::from(6 * m));
                prop_assert!(res.epsilon.is_positive());
                let w_max = res.w_max.to_i64().unwrap();
                let tau = (d as f64).sqrt() / den as f64;
                let mu = mu_p as f64 / mu_q as f64;
                for u in 0..=m {
                    let v = u as f64 * tau + mu;
                    let dist = (v - v.round()).abs();
                    if dist == 0.0 {
                        continue;
                    }
                    let w_of = ((a_int as f64 / dist).ln() / (b_int as f64).ln()).floor() as i64;
                    prop_assert!(
                        w_of <= w_max,
                        "u = {} admits w = {} > w_max = {}",
                        u, w_of, w_max
                    );
                }
            }
        }
    }
}
