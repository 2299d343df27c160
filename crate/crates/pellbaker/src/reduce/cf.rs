//! Certified continued-fraction expansion and the largest-partial-quotient
//! reduction: every stored quotient is provably correct because it is the
//! common floor of an exact rational enclosure of the value, cross-checked
//! at doubled working precision.

use super::ReduceError;
use crate::arith::{escalate, prec_ceiling, QuadraticValue, RealExpr};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A certified prefix of the continued fraction of a real value, together
/// with its convergents p_k/q_k and the oracle needed to extend it.
#[derive(Clone, Debug)]
pub struct ContinuedFraction {
    oracle: RealExpr,
    pub quotients: Vec<BigInt>,
    pub convergents: Vec<(BigInt, BigInt)>,
}

/// Exact continued fraction of a rational number (Euclidean algorithm);
/// the canonical form with last quotient >= 2 unless the value is an integer.
fn rational_cf(r: &BigRational) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut num = r.numer().clone();
    let mut den = r.denom().clone();
    loop {
        let (q, rem) = num.div_mod_floor(&den);
        out.push(q);
        if rem.is_zero() {
            return out;
        }
        num = den;
        den = rem;
    }
}

/// Common continued-fraction prefix of every real in the closed interval
/// [lo, hi]; each emitted quotient is correct for every value the interval
/// contains, hence for the oracle value in particular.
fn interval_cf(mut lo: BigRational, mut hi: BigRational, depth: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    while out.len() < depth {
        let a = lo.floor().to_integer();
        if hi.floor().to_integer() != a {
            break;
        }
        let frac_lo = &lo - BigRational::from_integer(a.clone());
        let frac_hi = &hi - BigRational::from_integer(a.clone());
        out.push(a);
        if frac_lo.is_zero() || frac_hi.is_zero() {
            break;
        }
        // x in [lo, hi] => 1/frac(x) in [1/frac_hi, 1/frac_lo]
        lo = frac_hi.recip();
        hi = frac_lo.recip();
    }
    out
}

fn convergents_of(quotients: &[BigInt]) -> Vec<(BigInt, BigInt)> {
    let mut out = Vec::with_capacity(quotients.len());
    let (mut p_prev, mut q_prev) = (BigInt::zero(), BigInt::one());
    let (mut p, mut q) = (BigInt::one(), BigInt::zero());
    for a in quotients {
        let p_next = a * &p + &p_prev;
        let q_next = a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        out.push((p.clone(), q.clone()));
    }
    out
}

/// Expand the continued fraction of the oracle value to at least `depth`
/// certified partial quotients.
///
/// Rational oracles terminate with their complete finite expansion attached
/// to the error. Irrational oracles are evaluated at escalating precision;
/// a quotient is accepted only when the expansions read off the exact
/// rational enclosures at working precision p and 2p agree.
pub fn cf_expand(oracle: &RealExpr, depth: usize) -> Result<ContinuedFraction, ReduceError> {
    if let Some(r) = oracle.as_rational() {
        return Err(ReduceError::Terminated(rational_cf(&r)));
    }
    let start = 64 + 8 * depth as u32;
    let quotients = escalate(start, |prec| {
        let coarse = oracle.eval(prec).ok()?;
        let fine = oracle.eval(2 * prec).ok()?;
        let at_p = interval_cf(coarse.lo().to_rational(), coarse.hi().to_rational(), depth);
        let at_2p = interval_cf(fine.lo().to_rational(), fine.hi().to_rational(), depth);
        // both are certified prefixes of the same expansion, so the shorter
        // must be a prefix of the longer
        let n = at_p.len().min(at_2p.len());
        assert_eq!(at_p[..n], at_2p[..n], "certified prefixes disagree");
        if at_2p.len() >= depth {
            Some(at_2p)
        } else {
            None
        }
    })?;
    let convergents = convergents_of(&quotients);
    Ok(ContinuedFraction {
        oracle: oracle.clone(),
        quotients,
        convergents,
    })
}

impl ContinuedFraction {
    /// Extend the certified expansion to at least `depth` quotients.
    pub fn extend_to(&mut self, depth: usize) -> Result<(), ReduceError> {
        if self.quotients.len() >= depth {
            return Ok(());
        }
        *self = cf_expand(&self.oracle, depth)?;
        Ok(())
    }
}

/// Smallest index N with q_N > M, together with a(M) := max{a_i : i <= N}.
///
/// Guarantees |tau - r/s| > 1/((a(M)+2) s^2) for every 0 < s < M.
pub fn legendre_bound(
    cf: &mut ContinuedFraction,
    m: &BigInt,
) -> Result<(usize, BigInt), ReduceError> {
    loop {
        if let Some(n) = cf.convergents.iter().position(|(_, q)| q > m) {
            let am = cf.quotients[..=n].iter().max().unwrap().clone();
            return Ok((n, am));
        }
        let next = (cf.quotients.len() * 2).max(16);
        if 8 * next as u32 > prec_ceiling() {
            return Err(crate::ArithError::PrecisionExhausted {
                ceiling: prec_ceiling(),
            }
            .into());
        }
        cf.extend_to(next)?;
    }
}

/// Largest exponent L with alpha^(2L) < ratio, where alpha = 1 + sqrt(2);
/// computed as a certified floor of log(ratio) / (2 log alpha).
pub fn largest_alpha_exponent(ratio: &BigRational) -> Result<BigInt, ReduceError> {
    assert!(ratio.is_positive());
    let r = ratio.clone();
    let l = escalate(128, move |prec| {
        let num = crate::arith::RealBall::from_rational(&r, prec).ln(prec).ok()?;
        let den = QuadraticValue::pell_alpha().ln(prec).ok()?.mul_i64(2);
        num.div(&den, prec).ok()?.certified_floor()
    })?;
    Ok(l)
}

/// Largest L consistent with 1/((aM+2) s^2) <= c * n2 / (alpha^(2L) s log alpha)
/// for all 0 < s < n2max, i.e. alpha^(2L) < (aM+2) * c * n2max^2 / log alpha.
pub fn legendre_apply(
    am: &BigInt,
    c: &BigRational,
    n2max: &BigInt,
) -> Result<BigInt, ReduceError> {
    let numer = BigRational::from_integer((am + 2) * n2max * n2max) * c;
    // alpha^(2L) < numer / log alpha  <=>  2L < log(numer / log alpha) / log alpha;
    // log alpha is irrational so the floor below realises the strict inequality
    let n = numer.clone();
    let l = escalate(128, move |prec| {
        let log_alpha = QuadraticValue::pell_alpha().ln(prec).ok()?;
        let num_ball = crate::arith::RealBall::from_rational(&n, prec)
            .div(&log_alpha, prec)
            .ok()?
            .ln(prec)
            .ok()?;
        num_ball.div(&log_alpha.mul_i64(2), prec).ok()?.certified_floor()
    })?;
    Ok(l)
}
