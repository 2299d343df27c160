//! Logarithmic heights of the rational and quadratic numbers entering the
//! linear forms: h(p/q) = log max(|p|, q) and, in degree 2,
//! h(η) = ½(log a₀ + Σ log max(|η⁽ⁱ⁾|, 1)).

use crate::arith::{QuadraticValue, RealBall};
use crate::sequences::{FamilyName, SequenceFamily};
use crate::ArithError;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use std::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HeightError {
    #[error("claimed minimal polynomial factors over the rationals")]
    ReducibleInput,
    #[error("embedding does not satisfy the polynomial")]
    EmbeddingMismatch,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A degree-≤2 algebraic number: primitive integer minimal polynomial with
/// positive leading coefficient, plus the selected real embedding.
#[derive(Clone, Debug)]
pub struct AlgebraicDescriptor {
    /// Coefficients leading-first: [a₀, a₁] (degree 1) or [a₀, a₁, a₂].
    pub coeffs: Vec<BigInt>,
    pub embedding: QuadraticValue,
}

impl AlgebraicDescriptor {
    /// Descriptor of a quadratic value from its trace and norm, with the
    /// denominators cleared to a primitive polynomial.
    pub fn of_quadratic(v: &QuadraticValue) -> Result<Self, HeightError> {
        if v.is_rational() {
            let r = v.a();
            // q x - p
            let coeffs = vec![r.denom().clone(), -r.numer().clone()];
            return Ok(AlgebraicDescriptor { coeffs, embedding: v.clone() });
        }
        // x² - (trace) x + (norm)
        let tr = v.trace();
        let nm = v.norm();
        let lcm = tr.denom().lcm(nm.denom());
        let a0 = lcm.clone();
        let a1 = -(tr * BigRational::from_integer(lcm.clone())).to_integer();
        let a2 = (nm * BigRational::from_integer(lcm)).to_integer();
        let g = a0.gcd(&a1).gcd(&a2);
        let mut coeffs = vec![a0 / &g, a1 / &g, a2 / &g];
        if coeffs[0].is_negative() {
            for c in &mut coeffs {
                *c = -c.clone();
            }
        }
        let d = AlgebraicDescriptor { coeffs, embedding: v.clone() };
        d.validate()?;
        Ok(d)
    }

    pub fn from_coeffs(coeffs: Vec<BigInt>, embedding: QuadraticValue) -> Result<Self, HeightError> {
        assert!(coeffs.len() == 2 || coeffs.len() == 3);
        assert!(coeffs[0].is_positive());
        let d = AlgebraicDescriptor { coeffs, embedding };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<(), HeightError> {
        if self.coeffs.len() == 3 {
            // irreducible iff the discriminant is not a perfect square
            let disc = &self.coeffs[1] * &self.coeffs[1]
                - BigInt::from(4) * &self.coeffs[0] * &self.coeffs[2];
            if !disc.is_negative() {
                let r = disc.sqrt();
                if &r * &r == disc {
                    return Err(HeightError::ReducibleInput);
                }
            }
        }
        // exact substitution check
        let x = &self.embedding;
        let val = match self.coeffs.len() {
            2 => x
                .scale(&BigRational::from_integer(self.coeffs[0].clone()))
                .add(&QuadraticValue::from_rational(BigRational::from_integer(
                    self.coeffs[1].clone(),
                ))),
            _ => x
                .mul(x)
                .scale(&BigRational::from_integer(self.coeffs[0].clone()))
                .add(&x.scale(&BigRational::from_integer(self.coeffs[1].clone())))
                .add(&QuadraticValue::from_rational(BigRational::from_integer(
                    self.coeffs[2].clone(),
                ))),
        };
        if !val.is_zero() {
            return Err(HeightError::EmbeddingMismatch);
        }
        Ok(())
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// h(p/q) = log max(|p|, q) for a fraction in lowest terms.
pub fn height_rational(p: &BigInt, q: &BigInt, prec: u32) -> Result<RealBall, ArithError> {
    assert!(q.is_positive());
    let g = p.gcd(q);
    let (p, q) = (p / &g, q / &g);
    let top = p.abs().max(q);
    if top.is_one() {
        return Ok(RealBall::zero());
    }
    RealBall::from_bigint(&top).ln(prec)
}

/// h(η) = ½(log a₀ + Σ log max(|η⁽ⁱ⁾|, 1)) over the conjugates.
pub fn height_quadratic(desc: &AlgebraicDescriptor, prec: u32) -> Result<RealBall, HeightError> {
    if desc.degree() == 1 {
        let r = desc.embedding.a();
        return Ok(height_rational(r.numer(), r.denom(), prec)?);
    }
    let a0 = &desc.coeffs[0];
    let mut acc = RealBall::from_bigint(a0).ln(prec + 8)?;
    for conj in [desc.embedding.clone(), desc.embedding.conjugate()] {
        let absval = if conj.sign() == Ordering::Less { conj.neg() } else { conj };
        if absval.cmp_rational(&BigRational::one()) == Ordering::Greater {
            acc = acc.add(&absval.ln(prec + 8)?);
        }
    }
    Ok(acc.div_int(2, prec))
}

/// max(½ log 2, log P_ℓ), the closed form used by the Λ₁ and Λ₂ instances
/// for h(√2/P_ℓ). It dominates the true height (the minimal polynomial
/// P_ℓ² x² − 2 loses a content factor of 2 when P_ℓ is even), which is what
/// an A_i slot requires.
pub fn height_sqrt2_over_pell(l: u64, prec: u32) -> Result<RealBall, ArithError> {
    assert!(l >= 1);
    let pell = SequenceFamily::get(FamilyName::Pell);
    let pl = pell.term(l);
    let half_log2 = RealBall::from_i64(2).ln(prec + 8)?.div_int(2, prec + 8);
    if pl.is_one() {
        return Ok(half_log2.round_to(prec));
    }
    let log_pl = RealBall::from_bigint(&pl).ln(prec + 8)?;
    // P_ℓ ≥ 2 for ℓ ≥ 2, so log P_ℓ ≥ log 2 > ½ log 2
    Ok(log_pl.round_to(prec))
}
