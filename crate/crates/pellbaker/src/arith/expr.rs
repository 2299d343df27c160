//! Exact real-valued expressions for instance files and CLI arguments.
//!
//! Grammar (whitespace-insensitive):
//!   expr   := "log(" inner ")" | "div(" expr "," expr ")"
//!           | "mul(" expr "," expr ")" | inner
//!   inner  := "quad" rat rat int | rat
//!   rat    := int | int "/" int
//!
//! Examples: `log(4)`, `log(quad 1 1 2)`, `div(log(4), log(quad 1 1 2))`.

use super::ball::RealBall;
use super::quad::QuadraticValue;
use crate::ArithError;
use num_bigint::BigInt;
use num_rational::BigRational;
use std::str::FromStr;

#[derive(Clone, Debug)]
pub enum RealExpr {
    Rat(BigRational),
    Quad(QuadraticValue),
    Log(Box<RealExpr>),
    Div(Box<RealExpr>, Box<RealExpr>),
    Mul(Box<RealExpr>, Box<RealExpr>),
}

impl RealExpr {
    pub fn log_rational(r: BigRational) -> Self {
        RealExpr::Log(Box::new(RealExpr::Rat(r)))
    }

    pub fn log_quad(q: QuadraticValue) -> Self {
        RealExpr::Log(Box::new(RealExpr::Quad(q)))
    }

    /// log 4 / log(1+√2), the key ratio of the reduction stage.
    pub fn log4_over_log_alpha() -> Self {
        RealExpr::Div(
            Box::new(RealExpr::log_rational(BigRational::from_integer(BigInt::from(4)))),
            Box::new(RealExpr::log_quad(QuadraticValue::pell_alpha())),
        )
    }

    pub fn eval(&self, prec: u32) -> Result<RealBall, ArithError> {
        match self {
            RealExpr::Rat(r) => Ok(RealBall::from_rational(r, prec)),
            RealExpr::Quad(q) => Ok(q.eval(prec)),
            RealExpr::Log(inner) => match inner.as_ref() {
                RealExpr::Quad(q) => q.ln(prec),
                other => other.eval(prec + 8)?.ln(prec),
            },
            RealExpr::Div(a, b) => a.eval(prec + 8)?.div(&b.eval(prec + 8)?, prec),
            RealExpr::Mul(a, b) => Ok(a.eval(prec + 8)?.mul(&b.eval(prec + 8)?).round_to(prec)),
        }
    }

    /// Exact rational value, if the expression is log-free.
    pub fn as_rational(&self) -> Option<BigRational> {
        match self {
            RealExpr::Rat(r) => Some(r.clone()),
            RealExpr::Quad(q) if q.is_rational() => Some(q.a().clone()),
            RealExpr::Div(a, b) => Some(a.as_rational()? / b.as_rational()?),
            RealExpr::Mul(a, b) => Some(a.as_rational()? * b.as_rational()?),
            _ => None,
        }
    }
}

impl FromStr for RealExpr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser { s: s.trim(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.s.len() {
            return Err(format!("trailing input at byte {}: {:?}", p.pos, &p.s[p.pos..]));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    s: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.skip_ws();
        if self.s[self.pos..].starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), String> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(format!("expected {:?} at byte {}", tok, self.pos))
        }
    }

    fn expr(&mut self) -> Result<RealExpr, String> {
        self.skip_ws();
        if self.eat("log(") {
            let inner = self.inner()?;
            self.expect(")")?;
            return Ok(RealExpr::Log(Box::new(inner)));
        }
        if self.eat("div(") {
            let a = self.expr()?;
            self.expect(",")?;
            let b = self.expr()?;
            self.expect(")")?;
            return Ok(RealExpr::Div(Box::new(a), Box::new(b)));
        }
        if self.eat("mul(") {
            let a = self.expr()?;
            self.expect(",")?;
            let b = self.expr()?;
            self.expect(")")?;
            return Ok(RealExpr::Mul(Box::new(a), Box::new(b)));
        }
        self.inner()
    }

    fn inner(&mut self) -> Result<RealExpr, String> {
        self.skip_ws();
        if self.eat("quad") {
            let a = self.rational()?;
            let b = self.rational()?;
            let d = self.integer()?;
            return Ok(RealExpr::Quad(QuadraticValue::new(a, b, d)));
        }
        Ok(RealExpr::Rat(self.rational()?))
    }

    fn rational(&mut self) -> Result<BigRational, String> {
        let n = self.integer()?;
        self.skip_ws();
        if self.pos < self.s.len() && self.s.as_bytes()[self.pos] == b'/' {
            self.pos += 1;
            let d = self.integer()?;
            if d == BigInt::from(0) {
                return Err("zero denominator".into());
            }
            Ok(BigRational::new(n, d))
        } else {
            Ok(BigRational::from_integer(n))
        }
    }

    fn integer(&mut self) -> Result<BigInt, String> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.s.len() && self.s.as_bytes()[self.pos] == b'-' {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s.as_bytes()[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start || (self.pos == start + 1 && self.s.as_bytes()[start] == b'-') {
            return Err(format!("expected integer at byte {}", start));
        }
        self.s[start..self.pos]
            .parse()
            .map_err(|e| format!("bad integer: {}", e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ball::BallOrdering;
    use crate::arith::dyadic::Dyadic;

    #[test]
    fn parse_and_eval_log4() {
        let e: RealExpr = "log(4)".parse().unwrap();
        let b = e.eval(128).unwrap();
        // 1.38629436111989...
        let reference = BigRational::new(
            BigInt::from(138629436111989i64),
            BigInt::from(100_000_000_000_000i64),
        );
        let diff = b.sub(&RealBall::from_rational(&reference, 128)).abs();
        assert!(diff.hi().le(&Dyadic::pow2(-40)));
    }

    #[test]
    fn parse_quad_log() {
        let e: RealExpr = "log(quad 1 1 2)".parse().unwrap();
        let b = e.eval(128).unwrap();
        // log(1+√2) = 0.88137358701954...
        let reference = BigRational::new(
            BigInt::from(88137358701954i64),
            BigInt::from(100_000_000_000_000i64),
        );
        let diff = b.sub(&RealBall::from_rational(&reference, 128)).abs();
        assert!(diff.hi().le(&Dyadic::pow2(-40)));
    }

    #[test]
    fn ratio_expression() {
        let e = RealExpr::log4_over_log_alpha();
        let b = e.eval(128).unwrap();
        // 1.57287940271478...
        let reference = BigRational::new(
            BigInt::from(157287940271478i64),
            BigInt::from(100_000_000_000_000i64),
        );
        let diff = b.sub(&RealBall::from_rational(&reference, 128)).abs();
        assert!(diff.hi().le(&Dyadic::pow2(-40)));
        let parsed: RealExpr = "div(log(4), log(quad 1 1 2))".parse().unwrap();
        let b2 = parsed.eval(128).unwrap();
        assert_eq!(b.compare(&b2), BallOrdering::Undecided);
    }

    #[test]
    fn rejects_garbage() {
        assert!("log(".parse::<RealExpr>().is_err());
        assert!("log(4) extra".parse::<RealExpr>().is_err());
        assert!("1/0".parse::<RealExpr>().is_err());
    }
}
