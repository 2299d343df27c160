//! Reduction for inhomogeneous approximation: given tau, mu, and bounds
//! A > 0, B > 1, M >= 1, find w_max so that 0 < |u*tau - v + mu| < A*B^(-w)
//! has no solution with u <= M and w > w_max. The separation
//! eps := ||mu*q|| - M*||tau*q|| must be certified positive for some
//! convergent denominator q > 6M of tau.

use super::cf::cf_expand;
use super::ReduceError;
use crate::arith::{escalate, RealBall, RealExpr};
use num_bigint::BigInt;
use num_traits::Signed;

#[derive(Clone, Debug)]
pub struct DPQuery {
    pub tau: RealExpr,
    pub mu: RealExpr,
    /// A > 0.
    pub a: RealExpr,
    /// B > 1.
    pub b: RealExpr,
    /// M >= 1, the coefficient bound.
    pub m: BigInt,
    /// Convergents tried before giving up.
    pub max_attempts: usize,
}

#[derive(Clone, Debug)]
pub struct DPResult {
    /// No solution exists with w > w_max.
    pub w_max: BigInt,
    /// Convergent denominator that certified the separation.
    pub q: BigInt,
    /// The certified-positive eps = ||mu q|| - M ||tau q||.
    pub epsilon: RealBall,
}

/// Ball containing the distance from expr * q to the nearest integer.
/// Exact for rational expr; otherwise certified by precision escalation.
fn dist_to_nearest_int(expr: &RealExpr, q: &BigInt, start_prec: u32) -> Result<RealBall, ReduceError> {
    if let Some(r) = expr.as_rational() {
        let scaled = r * num_rational::BigRational::from_integer(q.clone());
        let nearest = (&scaled + num_rational::BigRational::new(BigInt::from(1), BigInt::from(2)))
            .floor()
            .to_integer();
        let dist = (scaled - num_rational::BigRational::from_integer(nearest)).abs();
        return Ok(escalate(start_prec, |prec| {
            Some(RealBall::from_rational(&dist, prec))
        })?);
    }
    let e = expr.clone();
    let q = q.clone();
    Ok(escalate(start_prec, move |prec| {
        let scaled = e.eval(prec).ok()?.mul_bigint(&q);
        let nearest = scaled.certified_nearest_int()?;
        Some(scaled.sub(&RealBall::from_bigint(&nearest)).abs())
    })?)
}

pub fn dp_reduce(query: &DPQuery) -> Result<DPResult, ReduceError> {
    assert!(query.m.is_positive());
    let six_m = 6 * &query.m;
    let mut cf = cf_expand(&query.tau, 16)?;
    let mut attempt = 0;
    let mut index = 0;
    while attempt < query.max_attempts {
        if index >= cf.convergents.len() {
            cf.extend_to(cf.quotients.len() * 2)?;
            continue;
        }
        let q = cf.convergents[index].1.clone();
        index += 1;
        if q <= six_m {
            continue;
        }
        attempt += 1;
        let start_prec = q.bits() as u32 + 96;
        let tau_dist = dist_to_nearest_int(&query.tau, &q, start_prec)?;
        let mu_dist = dist_to_nearest_int(&query.mu, &q, start_prec)?;
        let eps = mu_dist.sub(&tau_dist.mul_bigint(&query.m));
        if !eps.is_positive() {
            continue;
        }
        // w_max = floor(log(A q / eps) / log B); the floor of the upper
        // endpoint is a valid (conservative) bound
        let prec = q.bits() as u32 + 160;
        let a_ball = query.a.eval(prec)?;
        let b_log = query.b.eval(prec)?.ln(prec)?;
        let ratio = a_ball.mul_bigint(&q).div(&eps, prec)?.ln(prec)?;
        let w_max = ratio.div(&b_log, prec)?.hi().floor_int();
        return Ok(DPResult {
            w_max,
            q,
            epsilon: eps,
        });
    }
    Err(ReduceError::AllConvergentsFailed)
}
