//! Exact arithmetic in real quadratic fields: values a + b√D with rational
//! a, b and positive nonsquare integer D.

use super::ball::RealBall;
use crate::ArithError;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct QuadraticValue {
    a: BigRational,
    b: BigRational,
    d: BigInt,
}

/// Pull square factors of n (n > 0) into a cofactor: n = core * s².
fn extract_square_part(n: &BigInt) -> (BigInt, BigInt) {
    let mut core = n.clone();
    let mut s = BigInt::one();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(100_000);
    while &p * &p <= core && p <= limit {
        let psq = &p * &p;
        while (&core % &psq).is_zero() {
            core /= &psq;
            s *= &p;
        }
        p += 1;
    }
    // remaining core may itself be a perfect square
    let r = core.sqrt();
    if &r * &r == core {
        s *= &r;
        core = BigInt::one();
    }
    (core, s)
}

impl QuadraticValue {
    /// a + b√D; D > 0 is normalized by moving square factors of D into b.
    pub fn new(a: BigRational, b: BigRational, d: BigInt) -> Self {
        assert!(d.is_positive(), "radicand must be positive");
        let (core, s) = extract_square_part(&d);
        if core.is_one() {
            // √D is the integer s: rational value
            let a = a + &b * BigRational::from_integer(s);
            return QuadraticValue {
                a,
                b: BigRational::zero(),
                d: BigInt::from(2),
            };
        }
        QuadraticValue { a, b: b * BigRational::from_integer(s), d: core }
    }

    pub fn from_rational(a: BigRational) -> Self {
        QuadraticValue { a, b: BigRational::zero(), d: BigInt::from(2) }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// 1 + √2, the dominant root of the Pell recurrence.
    pub fn pell_alpha() -> Self {
        QuadraticValue {
            a: BigRational::one(),
            b: BigRational::one(),
            d: BigInt::from(2),
        }
    }

    /// 1 - √2
    pub fn pell_beta() -> Self {
        QuadraticValue {
            a: BigRational::one(),
            b: -BigRational::one(),
            d: BigInt::from(2),
        }
    }

    pub fn sqrt_d(d: BigInt) -> Self {
        QuadraticValue::new(BigRational::zero(), BigRational::one(), d)
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn conjugate(&self) -> Self {
        QuadraticValue { a: self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }

    /// Field norm a² − b²D (the product with the conjugate).
    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * BigRational::from_integer(self.d.clone())
    }

    /// Trace 2a (the sum with the conjugate).
    pub fn trace(&self) -> BigRational {
        &self.a + &self.a
    }

    fn same_field(&self, other: &Self) -> bool {
        self.is_rational() || other.is_rational() || self.d == other.d
    }

    fn field_of(&self, other: &Self) -> BigInt {
        if self.is_rational() { other.d.clone() } else { self.d.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert!(self.same_field(other), "mixed radicands");
        QuadraticValue {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            d: self.field_of(other),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        QuadraticValue { a: -self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert!(self.same_field(other), "mixed radicands");
        let dd = BigRational::from_integer(self.field_of(other));
        QuadraticValue {
            a: &self.a * &other.a + &self.b * &other.b * &dd,
            b: &self.a * &other.b + &self.b * &other.a,
            d: self.field_of(other),
        }
    }

    pub fn scale(&self, r: &BigRational) -> Self {
        QuadraticValue { a: &self.a * r, b: &self.b * r, d: self.d.clone() }
    }

    pub fn inverse(&self) -> Result<Self, ArithError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(ArithError::DivisionByZeroBall);
        }
        Ok(self.conjugate().scale(&n.recip()))
    }

    pub fn pow(&self, k: i64) -> Result<Self, ArithError> {
        if k < 0 {
            return self.inverse()?.pow(-k);
        }
        let mut acc = QuadraticValue::from_int(1);
        let mut base = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            k >>= 1;
        }
        Ok(acc)
    }

    /// Exact sign of a + b√D.
    pub fn sign(&self) -> Ordering {
        if self.b.is_zero() {
            return rational_sign(&self.a);
        }
        if self.a.is_zero() {
            return rational_sign(&self.b);
        }
        let sa = rational_sign(&self.a);
        let sb = rational_sign(&self.b);
        if sa == sb {
            return sa;
        }
        // opposite signs: compare a² with b²D
        let asq = &self.a * &self.a;
        let bsqd = &self.b * &self.b * BigRational::from_integer(self.d.clone());
        match asq.cmp(&bsqd) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => Ordering::Equal,
        }
    }

    pub fn cmp_exact(&self, other: &Self) -> Ordering {
        self.sub(other).sign()
    }

    pub fn cmp_rational(&self, r: &BigRational) -> Ordering {
        self.cmp_exact(&QuadraticValue::from_rational(r.clone()))
    }

    /// Ball containing the exact value; radius shrinks as 2^-prec.
    pub fn eval(&self, prec: u32) -> RealBall {
        let wp = prec + 8;
        let av = RealBall::from_rational(&self.a, wp);
        if self.b.is_zero() {
            return av.round_to(prec);
        }
        let sq = RealBall::sqrt_bigint(&self.d, wp).expect("positive radicand");
        let bv = RealBall::from_rational(&self.b, wp);
        av.add(&bv.mul(&sq)).round_to(prec)
    }

    /// Ball containing ln of the value; the value must be positive.
    pub fn ln(&self, prec: u32) -> Result<RealBall, ArithError> {
        if self.sign() != Ordering::Greater {
            return Err(ArithError::NonPositiveInput);
        }
        super::ball::escalate(prec + 8, |wp| {
            let ball = self.eval(wp);
            if !ball.is_positive() {
                return None;
            }
            let l = ball.ln(wp).ok()?;
            if l.rad().le(&super::dyadic::Dyadic::pow2(-(prec as i64 + 2))) || l.rad().is_zero() {
                Some(l.round_to(prec))
            } else {
                None
            }
        })
    }
}

fn rational_sign(r: &BigRational) -> Ordering {
    if r.is_positive() {
        Ordering::Greater
    } else if r.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

impl fmt::Debug for QuadraticValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for QuadraticValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
        }
    }
}
