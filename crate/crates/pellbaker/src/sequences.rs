//! Binary recurrence families (Pell, Fibonacci, Lucas), closed-form
//! verification, growth bounds, and two-term product tables.

use crate::arith::{QuadraticValue, RealBall};
use crate::ArithError;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum FamilyName {
    Pell,
    Fibonacci,
    Lucas,
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyName::Pell => "pell",
            FamilyName::Fibonacci => "fibonacci",
            FamilyName::Lucas => "lucas",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for FamilyName {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pell" => Ok(FamilyName::Pell),
            "fibonacci" | "fib" => Ok(FamilyName::Fibonacci),
            "lucas" => Ok(FamilyName::Lucas),
            other => Err(format!("unknown family {:?}", other)),
        }
    }
}

/// How the closed form produces terms: (α^m − β^m)/denom, or α^m + β^m.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum ClosedForm {
    ScaledDifference,
    Sum,
}

#[derive(Clone, Debug)]
pub struct SequenceFamily {
    pub name: FamilyName,
    pub t0: BigInt,
    pub t1: BigInt,
    /// t_{k+2} = p t_{k+1} + q t_k
    pub p: BigInt,
    pub q: BigInt,
    pub alpha: QuadraticValue,
    pub beta: QuadraticValue,
    binet_denom: QuadraticValue,
    form: ClosedForm,
}

impl SequenceFamily {
    pub fn get(name: FamilyName) -> SequenceFamily {
        match name {
            FamilyName::Pell => {
                let alpha = QuadraticValue::pell_alpha();
                let beta = QuadraticValue::pell_beta();
                SequenceFamily {
                    name,
                    t0: BigInt::from(0),
                    t1: BigInt::from(1),
                    p: BigInt::from(2),
                    q: BigInt::from(1),
                    binet_denom: alpha.sub(&beta), // 2√2
                    alpha,
                    beta,
                    form: ClosedForm::ScaledDifference,
                }
            }
            FamilyName::Fibonacci | FamilyName::Lucas => {
                let half = BigRational::new(BigInt::one(), BigInt::from(2));
                let alpha = QuadraticValue::new(half.clone(), half.clone(), BigInt::from(5));
                let beta = QuadraticValue::new(half.clone(), -half, BigInt::from(5));
                let (t0, t1, form) = if name == FamilyName::Fibonacci {
                    (BigInt::from(0), BigInt::from(1), ClosedForm::ScaledDifference)
                } else {
                    (BigInt::from(2), BigInt::from(1), ClosedForm::Sum)
                };
                SequenceFamily {
                    name,
                    t0,
                    t1,
                    p: BigInt::from(1),
                    q: BigInt::from(1),
                    binet_denom: alpha.sub(&beta), // √5
                    alpha,
                    beta,
                    form,
                }
            }
        }
    }

    /// Exact m-th term by iterated recurrence.
    pub fn term(&self, m: u64) -> BigInt {
        let mut a = self.t0.clone();
        let mut b = self.t1.clone();
        if m == 0 {
            return a;
        }
        for _ in 1..m {
            let next = &self.p * &b + &self.q * &a;
            a = b;
            b = next;
        }
        b
    }

    /// Ball containing term(m) minus its closed-form value; must contain 0.
    pub fn binet_residual(&self, m: u64, prec: u32) -> Result<RealBall, ArithError> {
        let am = self.alpha.pow(m as i64)?;
        let bm = self.beta.pow(m as i64)?;
        let closed = match self.form {
            ClosedForm::Sum => RealBall::from_rational(&am.add(&bm).a().clone(), prec),
            ClosedForm::ScaledDifference => {
                let num = am.sub(&bm).eval(prec + 8);
                let den = self.binet_denom.eval(prec + 8);
                num.div(&den, prec)?
            }
        };
        Ok(RealBall::from_bigint(&self.term(m)).sub(&closed).round_to(prec))
    }

    /// Certified check of α^{m−2} ≤ term(m) ≤ α^{m−1}, decided exactly.
    pub fn growth_check(&self, m: u64) -> Result<bool, ArithError> {
        assert!(m >= 1);
        let t = BigRational::from_integer(self.term(m));
        let lo = self.alpha.pow(m as i64 - 2)?;
        let hi = self.alpha.pow(m as i64 - 1)?;
        Ok(lo.cmp_rational(&t) != Ordering::Greater && hi.cmp_rational(&t) != Ordering::Less)
    }
}

/// All products term(ℓ)·term(m) for 1 ≤ ℓ ≤ ℓmax, ℓ ≤ m ≤ mmax, with exact
/// value-to-index-pairs lookup.
#[derive(Clone, Debug)]
pub struct ProductTable {
    pub family: FamilyName,
    pub lmax: u64,
    pub mmax: u64,
    map: BTreeMap<BigInt, Vec<(u64, u64)>>,
}

impl ProductTable {
    pub fn build(family: &SequenceFamily, lmax: u64, mmax: u64) -> ProductTable {
        assert!(1 <= lmax && lmax <= mmax);
        let mut terms = Vec::with_capacity(mmax as usize + 1);
        terms.push(family.t0.clone());
        for m in 1..=mmax {
            if m == 1 {
                terms.push(family.t1.clone());
            } else {
                let next = &family.p * &terms[m as usize - 1] + &family.q * &terms[m as usize - 2];
                terms.push(next);
            }
        }
        let mut map: BTreeMap<BigInt, Vec<(u64, u64)>> = BTreeMap::new();
        for l in 1..=lmax {
            for m in l..=mmax {
                let v = &terms[l as usize] * &terms[m as usize];
                map.entry(v).or_default().push((l, m));
            }
        }
        ProductTable { family: family.name, lmax, mmax, map }
    }

    /// All (ℓ, m) with term(ℓ)·term(m) = v inside the table's box.
    pub fn lookup(&self, v: &BigInt) -> &[(u64, u64)] {
        self.map.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, v: &BigInt) -> bool {
        self.map.contains_key(v)
    }

    pub fn max_value(&self) -> &BigInt {
        self.map.keys().next_back().expect("nonempty table")
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BigInt, &Vec<(u64, u64)>)> {
        self.map.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pell_terms_match_reference_list() {
        let f = SequenceFamily::get(FamilyName::Pell);
        let expected: [i64; 14] =
            [0, 1, 2, 5, 12, 29, 70, 169, 408, 985, 2378, 5741, 13860, 33461];
        for (m, e) in expected.iter().enumerate() {
            assert_eq!(f.term(m as u64), BigInt::from(*e), "m={}", m);
        }
    }

    #[test]
    fn fibonacci_and_lucas_terms() {
        let fib = SequenceFamily::get(FamilyName::Fibonacci);
        assert_eq!(fib.term(7), BigInt::from(13));
        assert_eq!(fib.term(10), BigInt::from(55));
        let luc = SequenceFamily::get(FamilyName::Lucas);
        assert_eq!(luc.term(0), BigInt::from(2));
        assert_eq!(luc.term(5), BigInt::from(11));
    }

    #[test]
    fn binet_residual_contains_zero() {
        for name in [FamilyName::Pell, FamilyName::Fibonacci, FamilyName::Lucas] {
            let f = SequenceFamily::get(name);
            for m in [0u64, 1, 5, 10, 20] {
                let r = f.binet_residual(m, 128).unwrap();
                assert!(r.contains_zero(), "{:?} m={} residual {:?}", name, m, r);
            }
        }
    }

    #[test]
    fn binet_residual_tight_at_m20() {
        let f = SequenceFamily::get(FamilyName::Pell);
        let r = f.binet_residual(20, 128).unwrap();
        assert!(
            r.abs().hi().to_rational()
                < BigRational::new(BigInt::one(), BigInt::from(1_000_000)),
        );
    }

    #[test]
    fn growth_bounds_hold() {
        let f = SequenceFamily::get(FamilyName::Pell);
        for m in 1..=60 {
            assert!(f.growth_check(m).unwrap(), "m={}", m);
        }
    }

    #[test]
    fn growth_boundary_m1() {
        // α^{-1} ≤ P₁ = 1 ≤ α^0 = 1
        let f = SequenceFamily::get(FamilyName::Pell);
        assert!(f.growth_check(1).unwrap());
    }

    #[test]
    fn product_table_small_boxes() {
        let f = SequenceFamily::get(FamilyName::Pell);
        let t = ProductTable::build(&f, 2, 2);
        assert_eq!(t.lookup(&BigInt::from(1)), &[(1, 1)]);
        assert_eq!(t.lookup(&BigInt::from(2)), &[(1, 2)]);
        assert_eq!(t.lookup(&BigInt::from(4)), &[(2, 2)]);
        assert_eq!(t.len(), 3);

        let t3 = ProductTable::build(&f, 3, 3);
        assert_eq!(t3.lookup(&BigInt::from(5)), &[(1, 3)]);
        assert_eq!(t3.lookup(&BigInt::from(10)), &[(2, 3)]);
        assert_eq!(t3.lookup(&BigInt::from(25)), &[(3, 3)]);
        assert!(t3.lookup(&BigInt::from(3)).is_empty());

        let fib = SequenceFamily::get(FamilyName::Fibonacci);
        let tf = ProductTable::build(&fib, 3, 4);
        assert_eq!(tf.lookup(&BigInt::from(6)), &[(3, 4)]);
    }

    #[test]
    fn product_table_matches_double_loop() {
        let f = SequenceFamily::get(FamilyName::Pell);
        let t = ProductTable::build(&f, 12, 12);
        for l in 1..=12u64 {
            for m in l..=12 {
                let v = f.term(l) * f.term(m);
                assert!(t.lookup(&v).contains(&(l, m)), "missing ({}, {})", l, m);
            }
        }
        // membership inside the (200, 200) box
        let big = ProductTable::build(&f, 30, 30);
        assert_eq!(big.lookup(&BigInt::from(4)), &[(2, 2)]);
        assert!(big.lookup(&BigInt::from(3)).is_empty());
    }
}
