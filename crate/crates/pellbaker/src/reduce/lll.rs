//! Exact-rational LLL lattice reduction and the certified lower bound for
//! |x_1 tau_1 + ... + x_t tau_t| over a coefficient box |x_i| <= X_i.
//!
//! The lattice is spanned by b_j = e_j + round(C tau_j) e_t for j < t and
//! b_t = round(C tau_t) e_t. With theta^2 the minimum squared Gram-Schmidt
//! norm of a reduced basis, Q = sum_{i<t} X_i^2 and R = (1 + sum X_i)/2,
//! every nonzero boxed coefficient vector satisfies
//! |sum x_i tau_i| >= (sqrt(theta^2 - Q) - R)/C whenever theta^2 >= Q + R^2.

use super::ReduceError;
use crate::arith::{escalate, RealExpr};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug)]
pub struct LLLInstance {
    pub tau: Vec<RealExpr>,
    /// Coefficient bounds X_i.
    pub x: Vec<BigInt>,
    /// Scaling constant C > (t * max X_i)^t.
    pub c: BigInt,
}

/// Certified lower bound together with the lattice quantities that derived it.
#[derive(Clone, Debug)]
pub struct LLLOutcome {
    pub bound: BigRational,
    pub theta_sq: BigRational,
    pub q: BigRational,
    pub r: BigRational,
}

/// The generic default scaling constant (t * max X_i)^(t+1); the lemma only
/// requires C > (t * max X_i)^t.
pub fn default_scaling(t: usize, x: &[BigInt]) -> BigInt {
    let xmax = x.iter().max().expect("nonempty bounds");
    (BigInt::from(t) * xmax).pow(t as u32 + 1)
}

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn to_rational_rows(b: &[Vec<BigInt>]) -> Vec<Vec<BigRational>> {
    b.iter()
        .map(|row| row.iter().map(|v| BigRational::from_integer(v.clone())).collect())
        .collect()
}

/// Exact Gram-Schmidt: returns (mu, squared norms of b*_i).
fn gram_schmidt(
    b: &[Vec<BigInt>],
) -> Result<(Vec<Vec<BigRational>>, Vec<BigRational>), ReduceError> {
    let n = b.len();
    let rows = to_rational_rows(b);
    let mut bstar: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut norm2 = Vec::with_capacity(n);
    for i in 0..n {
        let mut v = rows[i].clone();
        for j in 0..i {
            let m = &dot(&rows[i], &bstar[j]) / &norm2[j];
            for (vk, sk) in v.iter_mut().zip(&bstar[j]) {
                *vk -= &m * sk;
            }
            mu[i][j] = m;
        }
        let n2 = dot(&v, &v);
        if n2.is_zero() {
            return Err(ReduceError::SingularBasis);
        }
        bstar.push(v);
        norm2.push(n2);
    }
    Ok((mu, norm2))
}

fn round_rational(r: &BigRational) -> BigInt {
    (r + BigRational::new(BigInt::one(), BigInt::from(2)))
        .floor()
        .to_integer()
}

/// Exact LLL reduction of the row basis with the given Lovász parameter
/// (1/4 < lovasz < 1). Gram-Schmidt data is maintained incrementally with
/// exact rational updates; a final from-scratch recomputation re-verifies
/// both reduction conditions before returning.
pub fn lll_reduce_basis(
    basis: &[Vec<BigInt>],
    lovasz: &BigRational,
) -> Result<Vec<Vec<BigInt>>, ReduceError> {
    let n = basis.len();
    assert!(basis.iter().all(|row| row.len() == n), "basis must be square");
    let quarter = BigRational::new(BigInt::one(), BigInt::from(4));
    assert!(*lovasz > quarter && *lovasz < BigRational::one());
    let mut b = basis.to_vec();
    if n == 0 {
        return Ok(b);
    }
    let (mut mu, mut norm2) = gram_schmidt(&b)?;
    let half = BigRational::new(BigInt::one(), BigInt::from(2));

    // subtract round(mu[k][l]) * b_l from b_k and update mu exactly
    let reduce_entry = |b: &mut Vec<Vec<BigInt>>, mu: &mut Vec<Vec<BigRational>>, k: usize, l: usize| {
        if mu[k][l].abs() <= half {
            return;
        }
        let r = round_rational(&mu[k][l]);
        let bl = b[l].clone();
        for (vk, vl) in b[k].iter_mut().zip(&bl) {
            *vk -= &r * vl;
        }
        let rq = BigRational::from_integer(r);
        mu[k][l] = &mu[k][l] - &rq;
        for i in 0..l {
            mu[k][i] = &mu[k][i] - &rq * &mu[l][i];
        }
    };

    let mut k = 1;
    while k < n {
        reduce_entry(&mut b, &mut mu, k, k - 1);
        let m = mu[k][k - 1].clone();
        if norm2[k] < (lovasz - &m * &m) * &norm2[k - 1] {
            // swap b_k, b_{k-1} and patch the Gram-Schmidt data
            b.swap(k, k - 1);
            for j in 0..k - 1 {
                let t = mu[k][j].clone();
                mu[k][j] = mu[k - 1][j].clone();
                mu[k - 1][j] = t;
            }
            let b_new = &norm2[k] + &m * &m * &norm2[k - 1];
            if b_new.is_zero() {
                return Err(ReduceError::SingularBasis);
            }
            let mu_new = &m * &norm2[k - 1] / &b_new;
            norm2[k] = &norm2[k - 1] * &norm2[k] / &b_new;
            norm2[k - 1] = b_new;
            mu[k][k - 1] = mu_new.clone();
            for i in k + 1..n {
                let t = mu[i][k].clone();
                mu[i][k] = &mu[i][k - 1] - &m * &t;
                mu[i][k - 1] = &t + &mu_new * &mu[i][k];
            }
            k = k.max(2) - 1;
        } else {
            for l in (0..k.max(1) - 1).rev() {
                reduce_entry(&mut b, &mut mu, k, l);
            }
            k += 1;
        }
    }
    debug_assert!(is_reduced(&b, lovasz));
    Ok(b)
}

/// Check the two LLL conditions exactly (used by tests as the oracle).
pub fn is_reduced(basis: &[Vec<BigInt>], lovasz: &BigRational) -> bool {
    let (mu, norm2) = match gram_schmidt(basis) {
        Ok(v) => v,
        Err(_) => return false,
    };
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    for i in 0..basis.len() {
        for j in 0..i {
            if mu[i][j].abs() > half {
                return false;
            }
        }
        if i > 0 {
            let threshold = (lovasz - &mu[i][i - 1] * &mu[i][i - 1]) * &norm2[i - 1];
            if norm2[i] < threshold {
                return false;
            }
        }
    }
    true
}

/// Rational lower bound for sqrt(s): isqrt(p*q)/q <= sqrt(p/q).
fn sqrt_lower(s: &BigRational) -> BigRational {
    assert!(!s.is_negative());
    let p = s.numer();
    let q = s.denom();
    BigRational::new((p * q).sqrt(), q.clone())
}

/// Round(C * tau) with certified nearest-integer extraction.
fn scaled_nearest(tau: &RealExpr, c: &BigInt) -> Result<BigInt, ReduceError> {
    if let Some(r) = tau.as_rational() {
        return Ok(round_rational(&(r * BigRational::from_integer(c.clone()))));
    }
    let tau = tau.clone();
    let c = c.clone();
    Ok(escalate(c.bits() as u32 + 96, move |prec| {
        tau.eval(prec).ok()?.mul_bigint(&c).certified_nearest_int()
    })?)
}

/// Build the approximation lattice for the instance (rows are basis vectors).
pub fn form_lattice(inst: &LLLInstance) -> Result<Vec<Vec<BigInt>>, ReduceError> {
    let t = inst.tau.len();
    assert!(t >= 2, "need at least two form terms");
    assert_eq!(inst.x.len(), t);
    let m: Vec<BigInt> = inst
        .tau
        .iter()
        .map(|tau| scaled_nearest(tau, &inst.c))
        .collect::<Result<_, _>>()?;
    let mut rows = vec![vec![BigInt::zero(); t]; t];
    for j in 0..t - 1 {
        rows[j][j] = BigInt::one();
        rows[j][t - 1] = m[j].clone();
    }
    rows[t - 1][t - 1] = m[t - 1].clone();
    Ok(rows)
}

/// Certified positive lower bound on |sum x_i tau_i| over 0 < max|x_i|,
/// |x_i| <= X_i, or ConditionFailed when the reduced lattice is too short
/// (caller may retry with a larger C).
pub fn lll_form_lower_bound(inst: &LLLInstance) -> Result<LLLOutcome, ReduceError> {
    let t = inst.tau.len();
    let xmax = inst.x.iter().max().expect("nonempty bounds");
    assert!(
        inst.c > (BigInt::from(t) * xmax).pow(t as u32),
        "scaling constant too small"
    );
    let lattice = form_lattice(inst)?;
    let lovasz = BigRational::new(BigInt::from(99), BigInt::from(100));
    let reduced = lll_reduce_basis(&lattice, &lovasz)?;
    let (_, norm2) = gram_schmidt(&reduced)?;
    let theta_sq = norm2.iter().min().unwrap().clone();
    let q: BigRational = inst.x[..t - 1]
        .iter()
        .map(|x| BigRational::from_integer(x * x))
        .sum();
    let sum_x: BigInt = inst.x.iter().sum();
    let r = BigRational::new(BigInt::one() + sum_x, BigInt::from(2));
    if theta_sq < &q + &r * &r {
        return Err(ReduceError::ConditionFailed);
    }
    let root = sqrt_lower(&(&theta_sq - &q));
    let numer = root - &r;
    if !numer.is_positive() {
        return Err(ReduceError::ConditionFailed);
    }
    let bound = numer / BigRational::from_integer(inst.c.clone());
    Ok(LLLOutcome {
        bound,
        theta_sq,
        q,
        r,
    })
}

/// Instance for the reproduction sweep: tau = (log(sqrt2 / P_ell), log 4,
/// log(1 + sqrt2)) with a common coefficient bound and scaling constant.
pub fn pell_product_form_instance(ell: u64, x_bound: &BigInt, c: &BigInt) -> LLLInstance {
    use crate::arith::QuadraticValue;
    use crate::sequences::{FamilyName, SequenceFamily};
    let p_ell = SequenceFamily::get(FamilyName::Pell).term(ell);
    let tau1 = RealExpr::log_quad(QuadraticValue::new(
        BigRational::zero(),
        BigRational::new(BigInt::one(), p_ell),
        BigInt::from(2),
    ));
    let tau2 = RealExpr::log_rational(BigRational::from_integer(BigInt::from(4)));
    let tau3 = RealExpr::log_quad(QuadraticValue::pell_alpha());
    LLLInstance {
        tau: vec![tau1, tau2, tau3],
        x: vec![x_bound.clone(); 3],
        c: c.clone(),
    }
}

/// Result of minimizing the certified lower bound over a family of
/// form instances.
#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub min_bound: BigRational,
    /// Index attaining the minimum.
    pub argmin: u64,
    /// Indices whose form vanishes inside the coefficient box (exact
    /// multiplicative relation), excluded from the minimum.
    pub degenerate: Vec<u64>,
}

/// Minimize the certified lower bound of the three-term form over
/// ell in the given range (embarrassingly parallel).
pub fn pell_product_form_sweep(
    ell_lo: u64,
    ell_hi: u64,
    x_bound: &BigInt,
    c: &BigInt,
) -> Result<SweepOutcome, ReduceError> {
    use rayon::prelude::*;
    let results: Vec<(u64, Result<LLLOutcome, ReduceError>)> = (ell_lo..=ell_hi)
        .into_par_iter()
        .map(|ell| {
            let inst = pell_product_form_instance(ell, x_bound, c);
            (ell, lll_form_lower_bound(&inst))
        })
        .collect();
    let mut best: Option<(u64, BigRational)> = None;
    let mut degenerate = Vec::new();
    for (ell, res) in results {
        match res {
            Ok(out) => {
                if best.as_ref().map_or(true, |(_, b)| out.bound < *b) {
                    best = Some((ell, out.bound));
                }
            }
            Err(ReduceError::ConditionFailed) => degenerate.push(ell),
            Err(e) => return Err(e),
        }
    }
    let (argmin, min_bound) = best.ok_or(ReduceError::ConditionFailed)?;
    Ok(SweepOutcome {
        min_bound,
        argmin,
        degenerate,
    })
}
