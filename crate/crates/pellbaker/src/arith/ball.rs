//! Ball arithmetic: a real number as midpoint plus rigorous error radius.
//!
//! Every operation returns a ball containing the exact result. Comparisons
//! are certified: `Less`/`Greater` only when the balls are disjoint.

use super::dyadic::{Dyadic, RoundDir};
use crate::ArithError;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::sync::Mutex;

/// Mantissa bits kept for radii; radii only need a couple of digits.
const RAD_BITS: u32 = 32;

pub const DEFAULT_PREC_CEILING: u32 = 40_000;

/// Precision ceiling for escalation loops; override with PELLBAKER_PREC_CEILING.
pub fn prec_ceiling() -> u32 {
    std::env::var("PELLBAKER_PREC_CEILING")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_PREC_CEILING)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BallOrdering {
    Less,
    Greater,
    Undecided,
}

#[derive(Clone, PartialEq, Eq)]
pub struct RealBall {
    mid: Dyadic,
    rad: Dyadic,
}

impl RealBall {
    pub fn new(mid: Dyadic, rad: Dyadic) -> Self {
        debug_assert!(!rad.is_negative());
        RealBall { mid, rad }
    }

    pub fn exact(mid: Dyadic) -> Self {
        RealBall { mid, rad: Dyadic::zero() }
    }

    pub fn zero() -> Self {
        RealBall::exact(Dyadic::zero())
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        RealBall::exact(Dyadic::from_bigint(n))
    }

    pub fn from_i64(n: i64) -> Self {
        RealBall::exact(Dyadic::from_i64(n))
    }

    pub fn from_rational(r: &BigRational, prec: u32) -> Self {
        let num = Dyadic::from_bigint(r.numer());
        let den = Dyadic::from_bigint(r.denom());
        let lo = Dyadic::div(&num, &den, prec + 2, RoundDir::Floor);
        let hi = Dyadic::div(&num, &den, prec + 2, RoundDir::Ceil);
        RealBall::from_endpoints(&lo, &hi)
    }

    /// Ball covering [lo, hi].
    pub fn from_endpoints(lo: &Dyadic, hi: &Dyadic) -> Self {
        debug_assert!(lo.le(hi));
        let two_mid = lo.add(hi);
        let mid = two_mid.shl(-1);
        let rad = hi.sub(lo).shl(-1).abs();
        RealBall { mid, rad }
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> &Dyadic {
        &self.rad
    }

    pub fn lo(&self) -> Dyadic {
        self.mid.sub(&self.rad)
    }

    pub fn hi(&self) -> Dyadic {
        self.mid.add(&self.rad)
    }

    pub fn is_exact(&self) -> bool {
        self.rad.is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo().is_positive() && !self.hi().is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo().is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi().is_negative()
    }

    pub fn contains_rational(&self, r: &BigRational) -> bool {
        let lo = self.lo().to_rational();
        let hi = self.hi().to_rational();
        lo <= *r && *r <= hi
    }

    /// Round midpoint to `prec` bits, absorbing the rounding error into the
    /// radius, and cap the radius mantissa at a few words.
    pub fn round_to(&self, prec: u32) -> RealBall {
        let (mid, err) = self.mid.round_err(prec, RoundDir::Floor);
        let rad = self.rad.add(&err).round(RAD_BITS, RoundDir::Ceil);
        RealBall { mid, rad }
    }

    pub fn neg(&self) -> RealBall {
        RealBall { mid: -self.mid.clone(), rad: self.rad.clone() }
    }

    pub fn abs(&self) -> RealBall {
        if self.contains_zero() {
            let m = self.lo().abs();
            let m2 = self.hi().abs();
            let top = if m.ge(&m2) { m } else { m2 };
            RealBall::from_endpoints(&Dyadic::zero(), &top)
        } else if self.mid.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn add(&self, other: &RealBall) -> RealBall {
        RealBall {
            mid: self.mid.add(&other.mid),
            rad: self.rad.add(&other.rad).round(RAD_BITS, RoundDir::Ceil),
        }
    }

    pub fn sub(&self, other: &RealBall) -> RealBall {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &RealBall) -> RealBall {
        // |xy - mx my| <= |mx| ry + |my| rx + rx ry
        let mid = self.mid.mul(&other.mid);
        let rad = self
            .mid
            .abs()
            .mul(&other.rad)
            .add(&other.mid.abs().mul(&self.rad))
            .add(&self.rad.mul(&other.rad))
            .round(RAD_BITS, RoundDir::Ceil);
        RealBall { mid, rad }
    }

    pub fn mul_bigint(&self, n: &BigInt) -> RealBall {
        RealBall {
            mid: self.mid.mul_bigint(n),
            rad: self.rad.mul_bigint(&n.abs()).round(RAD_BITS, RoundDir::Ceil),
        }
    }

    pub fn mul_i64(&self, n: i64) -> RealBall {
        self.mul_bigint(&BigInt::from(n))
    }

    pub fn shl(&self, k: i64) -> RealBall {
        RealBall { mid: self.mid.shl(k), rad: self.rad.shl(k) }
    }

    /// Reciprocal; the ball must not contain zero.
    pub fn recip(&self, prec: u32) -> Result<RealBall, ArithError> {
        if self.contains_zero() {
            return Err(ArithError::DivisionByZeroBall);
        }
        let lo = self.lo();
        let hi = self.hi();
        let one = Dyadic::one();
        let a = Dyadic::div(&one, &hi, prec + 2, RoundDir::Floor);
        let b = Dyadic::div(&one, &lo, prec + 2, RoundDir::Ceil);
        Ok(RealBall::from_endpoints(&a, &b))
    }

    pub fn div(&self, other: &RealBall, prec: u32) -> Result<RealBall, ArithError> {
        Ok(self.mul(&other.recip(prec)?).round_to(prec))
    }

    pub fn div_int(&self, n: i64, prec: u32) -> RealBall {
        assert!(n != 0);
        let d = Dyadic::from_i64(n);
        let lo1 = Dyadic::div(&self.lo(), &d, prec + 2, RoundDir::Floor);
        let hi1 = Dyadic::div(&self.hi(), &d, prec + 2, RoundDir::Ceil);
        if n > 0 {
            RealBall::from_endpoints(&lo1, &hi1)
        } else {
            RealBall::from_endpoints(&hi1, &lo1)
        }
    }

    pub fn pow(&self, k: u64, prec: u32) -> RealBall {
        let mut acc = RealBall::from_i64(1);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).round_to(prec + 8);
            }
            base = base.mul(&base).round_to(prec + 8);
            k >>= 1;
        }
        acc.round_to(prec)
    }

    /// Ball containing sqrt(n) for integer n >= 0.
    pub fn sqrt_bigint(n: &BigInt, prec: u32) -> Result<RealBall, ArithError> {
        if n.is_negative() {
            return Err(ArithError::NonPositiveInput);
        }
        if n.is_zero() {
            return Ok(RealBall::zero());
        }
        let k = prec as u64 + 2;
        let shifted: BigInt = n << (2 * k);
        let s = shifted.sqrt();
        // s <= sqrt(n)*2^k < s+1
        let lo = Dyadic::new(s.clone(), -(k as i64));
        let hi = Dyadic::new(s + 1, -(k as i64));
        Ok(RealBall::from_endpoints(&lo, &hi).round_to(prec))
    }

    /// Certified comparison: Less/Greater only for disjoint balls.
    pub fn compare(&self, other: &RealBall) -> BallOrdering {
        if self.hi().lt(&other.lo()) {
            BallOrdering::Less
        } else if self.lo().gt(&other.hi()) {
            BallOrdering::Greater
        } else {
            BallOrdering::Undecided
        }
    }

    /// Sign of the ball if certified, else None.
    pub fn certified_sign(&self) -> Option<Ordering> {
        if self.is_positive() {
            Some(Ordering::Greater)
        } else if self.is_negative() {
            Some(Ordering::Less)
        } else if self.is_exact() && self.mid.is_zero() {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Nearest integer to the ball's value, certified: fails (None) when the
    /// ball straddles a half-integer.
    pub fn certified_nearest_int(&self) -> Option<BigInt> {
        let half = Dyadic::pow2(-1);
        let a = self.lo().add(&half).floor_int();
        let b = self.hi().add(&half).floor_int();
        if a == b {
            Some(a)
        } else {
            None
        }
    }

    /// Certified floor: fails when the ball straddles an integer.
    pub fn certified_floor(&self) -> Option<BigInt> {
        let a = self.lo().floor_int();
        let b = self.hi().floor_int();
        if a == b {
            Some(a)
        } else {
            None
        }
    }

    /// Natural logarithm of a strictly positive ball.
    pub fn ln(&self, prec: u32) -> Result<RealBall, ArithError> {
        let lo = self.lo();
        if !lo.is_positive() {
            return Err(ArithError::NonPositiveInput);
        }
        let point = ln_dyadic(&self.mid, prec + 8)?;
        if self.rad.is_zero() {
            return Ok(point.round_to(prec));
        }
        // |ln x - ln mid| <= rad / lo on [lo, hi]
        let extra = Dyadic::div(&self.rad, &lo, RAD_BITS, RoundDir::Ceil);
        Ok(RealBall {
            mid: point.mid,
            rad: point.rad.add(&extra).round(RAD_BITS, RoundDir::Ceil),
        }
        .round_to(prec))
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    /// Render as "mid ± rad" in scientific notation.
    pub fn to_sci_string(&self) -> String {
        format!("{:e} ± {:e}", self.mid.to_f64(), self.rad.to_f64())
    }
}

/// ln of an exact positive dyadic via argument reduction and the atanh series.
pub fn ln_dyadic(x: &Dyadic, prec: u32) -> Result<RealBall, ArithError> {
    if !x.is_positive() {
        return Err(ArithError::NonPositiveInput);
    }
    // x = m * 2^e with m in [1, 2)
    let e = x.mag_exp() - 1;
    let m = x.shl(-e);
    debug_assert!(m.ge(&Dyadic::one()) && m.lt(&Dyadic::from_i64(2)));
    // ln m = 2 atanh((m-1)/(m+1)), argument in [0, 1/3]
    let num = RealBall::exact(m.sub(&Dyadic::one()));
    let den = RealBall::exact(m.add(&Dyadic::one()));
    let z = num.div(&den, prec + 8)?;
    let ln_m = atanh_series(&z, prec + 8).mul_i64(2);
    let result = if e == 0 {
        ln_m
    } else {
        ln_m.add(&ln2(prec + 8).mul_i64(e))
    };
    Ok(result.round_to(prec))
}

/// atanh(z) for a ball with |z| <= 1/2.
fn atanh_series(z: &RealBall, prec: u32) -> RealBall {
    let half = Dyadic::pow2(-1);
    assert!(
        z.hi().abs().le(&half) && z.lo().abs().le(&half),
        "atanh series requires |z| <= 1/2"
    );
    // tail after N terms is < 2 * (1/2)^(2N+3); pick N so that is < 2^-(prec+4)
    let n_terms = (prec / 2 + 4) as u64;
    let wp = prec + 16;
    let zsq = z.mul(z).round_to(wp);
    let mut term = z.clone();
    let mut sum = RealBall::zero();
    for k in 0..n_terms {
        sum = sum.add(&term.div_int(2 * k as i64 + 1, wp)).round_to(wp);
        term = term.mul(&zsq).round_to(wp);
    }
    let tail = Dyadic::pow2(-(2 * n_terms as i64) - 1);
    RealBall::new(sum.mid, sum.rad.add(&tail).round(RAD_BITS, RoundDir::Ceil)).round_to(prec)
}

/// ln 2 = 2 atanh(1/3), cached at the highest precision computed so far.
pub fn ln2(prec: u32) -> RealBall {
    static CACHE: Mutex<Option<(u32, RealBall)>> = Mutex::new(None);
    let mut guard = CACHE.lock().unwrap();
    if let Some((p, ball)) = guard.as_ref() {
        if *p >= prec {
            return ball.round_to(prec);
        }
    }
    let third = RealBall::from_rational(
        &BigRational::new(BigInt::from(1), BigInt::from(3)),
        prec + 8,
    );
    let val = atanh_series(&third, prec + 8).mul_i64(2).round_to(prec);
    *guard = Some((prec, val.clone()));
    val
}

/// Run `f` at doubling precision until it produces a value or the ceiling is hit.
pub fn escalate<T>(
    start_prec: u32,
    mut f: impl FnMut(u32) -> Option<T>,
) -> Result<T, ArithError> {
    let ceiling = prec_ceiling();
    let mut prec = start_prec.max(8);
    loop {
        if let Some(v) = f(prec) {
            return Ok(v);
        }
        if prec >= ceiling {
            return Err(ArithError::PrecisionExhausted { ceiling });
        }
        prec = (prec * 2).min(ceiling);
    }
}

impl fmt::Debug for RealBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?} ± {:?}]", self.mid, self.rad)
    }
}

impl fmt::Display for RealBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_sci_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn arithmetic_contains_exact_value() {
        let a = RealBall::from_rational(&rat(1, 3), 64);
        let b = RealBall::from_rational(&rat(1, 7), 64);
        let s = a.add(&b);
        assert!(s.contains_rational(&rat(10, 21)));
        let p = a.mul(&b);
        assert!(p.contains_rational(&rat(1, 21)));
        let d = a.div(&b, 64).unwrap();
        assert!(d.contains_rational(&rat(7, 3)));
    }

    #[test]
    fn sqrt2_value() {
        let s = RealBall::sqrt_bigint(&BigInt::from(2), 128).unwrap();
        // 2^128-accurate reference: check square brackets 2
        let sq = s.mul(&s);
        assert!(sq.contains_rational(&rat(2, 1)));
        assert!(s.rad().le(&Dyadic::pow2(-120)));
    }

    #[test]
    fn ln_known_values() {
        // ln 1 = 0
        let one = RealBall::from_i64(1);
        let l = one.ln(64).unwrap();
        assert!(l.contains_zero());
        // ln 4 = 2 ln 2; reference digits 1.3862943611198906188...
        let four = RealBall::from_i64(4);
        let l4 = four.ln(192).unwrap();
        let reference = rat(13862943611198906i64, 10_000_000_000_000_000i64);
        let diff = l4.sub(&RealBall::from_rational(&reference, 192));
        assert!(diff.abs().hi().le(&Dyadic::pow2(-50)));
        // consistency: ln 4 = 2 ln 2
        let two = RealBall::from_i64(2);
        let l2 = two.ln(192).unwrap().mul_i64(2);
        assert_eq!(l4.compare(&l2), BallOrdering::Undecided);
    }

    #[test]
    fn ln_rejects_nonpositive() {
        let z = RealBall::zero();
        assert!(matches!(z.ln(64), Err(ArithError::NonPositiveInput)));
        let straddle = RealBall::new(Dyadic::from_i64(0), Dyadic::one());
        assert!(matches!(straddle.ln(64), Err(ArithError::NonPositiveInput)));
    }

    #[test]
    fn comparisons() {
        let a = RealBall::from_i64(0);
        let b = RealBall::from_i64(1);
        assert_eq!(a.compare(&b), BallOrdering::Less);
        let c = RealBall::from_endpoints(&Dyadic::from_i64(0), &Dyadic::from_i64(2));
        let d = RealBall::from_endpoints(&Dyadic::from_i64(1), &Dyadic::from_i64(3));
        assert_eq!(c.compare(&d), BallOrdering::Undecided);
        assert_eq!(d.compare(&a), BallOrdering::Greater);
    }

    #[test]
    fn inclusion_under_refinement() {
        // evaluating ln 3 at double precision shrinks the ball and stays inside
        let three = RealBall::from_i64(3);
        let lo_p = three.ln(64).unwrap();
        let hi_p = three.ln(128).unwrap();
        assert!(lo_p.lo().le(&hi_p.lo()));
        assert!(hi_p.hi().le(&lo_p.hi()));
    }

    #[test]
    fn nearest_int_certified() {
        // ball of nonzero radius around 3.5 straddles the half-integer
        let b = RealBall::new(
            Dyadic::new(BigInt::from(7), -1),
            Dyadic::pow2(-10),
        );
        assert_eq!(b.certified_nearest_int(), None);
        // exact 3.5 resolves by the tie rule
        let e = RealBall::from_rational(&rat(7, 2), 64);
        assert_eq!(e.certified_nearest_int(), Some(BigInt::from(4)));
        let c = RealBall::from_rational(&rat(10, 3), 64);
        assert_eq!(c.certified_nearest_int(), Some(BigInt::from(3)));
    }

    #[test]
    fn escalation_hits_ceiling() {
        std::env::set_var("PELLBAKER_PREC_CEILING", "256");
        let r: Result<(), ArithError> = escalate(64, |_| None);
        std::env::remove_var("PELLBAKER_PREC_CEILING");
        assert!(matches!(r, Err(ArithError::PrecisionExhausted { ceiling: 256 })));
    }
}
