//! Exact dyadic rationals `man * 2^exp` used as ball midpoints and radii.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::ops::Neg;

#[derive(Clone, PartialEq, Eq)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

/// Directed rounding for mantissa truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoundDir {
    /// Toward negative infinity.
    Floor,
    /// Toward positive infinity.
    Ceil,
}

impl Dyadic {
    pub fn new(man: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { man, exp };
        d.normalize();
        d
    }

    pub fn zero() -> Self {
        Dyadic { man: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { man: BigInt::one(), exp: 0 }
    }

    /// 2^e
    pub fn pow2(e: i64) -> Self {
        Dyadic { man: BigInt::one(), exp: e }
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Dyadic::new(n.clone(), 0)
    }

    pub fn from_i64(n: i64) -> Self {
        Dyadic::new(BigInt::from(n), 0)
    }

    fn normalize(&mut self) {
        if self.man.is_zero() {
            self.exp = 0;
            return;
        }
        if let Some(tz) = self.man.trailing_zeros() {
            if tz > 0 {
                self.man >>= tz;
                self.exp += tz as i64;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.man.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.man.is_negative()
    }

    /// Number of significant mantissa bits.
    pub fn bits(&self) -> u64 {
        self.man.bits()
    }

    /// Smallest e with |self| < 2^e (0 for zero).
    pub fn mag_exp(&self) -> i64 {
        if self.is_zero() {
            return i64::MIN / 2;
        }
        self.exp + self.man.bits() as i64
    }

    pub fn abs(&self) -> Self {
        Dyadic { man: self.man.abs(), exp: self.exp }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &other.man << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.clone().neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic::new(&self.man * &other.man, self.exp + other.exp)
    }

    pub fn mul_bigint(&self, n: &BigInt) -> Dyadic {
        Dyadic::new(&self.man * n, self.exp)
    }

    pub fn shl(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { man: self.man.clone(), exp: self.exp + k }
    }

    pub fn cmp(&self, other: &Dyadic) -> Ordering {
        let d = self.sub(other);
        if d.man.is_zero() {
            Ordering::Equal
        } else if d.man.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    pub fn lt(&self, other: &Dyadic) -> bool {
        self.cmp(other) == Ordering::Less
    }

    pub fn le(&self, other: &Dyadic) -> bool {
        self.cmp(other) != Ordering::Greater
    }

    pub fn gt(&self, other: &Dyadic) -> bool {
        self.cmp(other) == Ordering::Greater
    }

    pub fn ge(&self, other: &Dyadic) -> bool {
        self.cmp(other) != Ordering::Less
    }

    /// Round to at most `prec` mantissa bits in the given direction.
    pub fn round(&self, prec: u32, dir: RoundDir) -> Dyadic {
        let nbits = self.man.bits();
        if nbits <= prec as u64 {
            return self.clone();
        }
        let drop = nbits - prec as u64;
        let man = match dir {
            RoundDir::Floor => &self.man >> drop,
            RoundDir::Ceil => -((-&self.man) >> drop),
        };
        Dyadic::new(man, self.exp + drop as i64)
    }

    /// Round to `prec` bits; also return an upper bound on the absolute error.
    pub fn round_err(&self, prec: u32, dir: RoundDir) -> (Dyadic, Dyadic) {
        let nbits = self.man.bits();
        if nbits <= prec as u64 {
            return (self.clone(), Dyadic::zero());
        }
        let drop = nbits - prec as u64;
        let err = Dyadic::pow2(self.exp + drop as i64);
        (self.round(prec, dir), err)
    }

    /// floor(self) as an integer.
    pub fn floor_int(&self) -> BigInt {
        if self.exp >= 0 {
            &self.man << self.exp as u64
        } else {
            &self.man >> (-self.exp) as u64
        }
    }

    /// Nearest integer to self; ties round toward +infinity.
    pub fn nearest_int(&self) -> BigInt {
        self.add(&Dyadic::pow2(-1)).floor_int()
    }

    /// Directed division `a / b` with at least `prec` quotient bits.
    pub fn div(a: &Dyadic, b: &Dyadic, prec: u32, dir: RoundDir) -> Dyadic {
        assert!(!b.is_zero(), "dyadic division by zero");
        if a.is_zero() {
            return Dyadic::zero();
        }
        let s = (b.man.bits() as i64 - a.man.bits() as i64) + prec as i64 + 2;
        let s = s.max(0) as u64;
        let num = &a.man << s;
        let (q, r) = num_integer::Integer::div_mod_floor(&num, &b.man);
        let exact = r.is_zero();
        let mut q = q;
        if dir == RoundDir::Ceil && !exact {
            q += 1;
        }
        Dyadic::new(q, a.exp - b.exp - s as i64)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as u64)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn from_f64_approx(x: f64) -> Dyadic {
        assert!(x.is_finite());
        let (m, e) = frexp(x);
        // m * 2^53 is an exact integer
        let man = BigInt::from((m * (1u64 << 53) as f64) as i64);
        Dyadic::new(man, e - 53)
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.to_rational();
        rational_to_f64(&r)
    }
}

fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 {
        return (0.0, 0);
    }
    let mut e = 0i64;
    let mut m = x;
    while m.abs() >= 1.0 {
        m /= 2.0;
        e += 1;
    }
    while m.abs() < 0.5 {
        m *= 2.0;
        e -= 1;
    }
    (m, e)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.numer().is_zero() {
        return 0.0;
    }
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    // scale so the integer quotient keeps ~64 bits
    let s = db - nb + 64;
    let q = if s >= 0 {
        (r.numer() << s as u64) / r.denom()
    } else {
        r.numer() / (r.denom() << (-s) as u64)
    };
    let qd = approx_bigint_f64(&q);
    qd * 2f64.powi(-s as i32)
}

fn approx_bigint_f64(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 52 {
        let (s, digits) = n.to_u64_digits();
        let v = digits.first().copied().unwrap_or(0) as f64;
        return if s == num_bigint::Sign::Minus { -v } else { v };
    }
    let shift = bits - 52;
    let top = n >> shift;
    let (s, digits) = top.to_u64_digits();
    let v = digits.first().copied().unwrap_or(0) as f64;
    let v = if s == num_bigint::Sign::Minus { -v } else { v };
    v * 2f64.powi(shift as i32)
}

impl Neg for Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { man: -self.man, exp: self.exp }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.man, self.exp)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64())
    }
}
