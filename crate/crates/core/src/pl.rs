//! Exact algebra and calculus on sums of `a * (1-x)^b * L^c`, where
//! `L = ln(1/(1-x))`, `a` is rational, `b` is any integer and `c >= 0`.
//!
//! Polynomials in `x` are stored in the `(1-x)` basis, so every expression
//! has exactly one normalized form: a map from `(b, c)` to a nonzero
//! coefficient, iterated in ascending `(b, c)` order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, binomial, factorial, Rational};

/// Exponent pair `(b, c)` of `(1-x)^b * L^c`.
pub type TermKey = (i64, u32);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PLTerm {
    pub coeff: Rational,
    pub pow1mx: i64,
    pub powlog: u32,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PLExpr {
    terms: BTreeMap<TermKey, Rational>,
}

impl PLExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Rational::one(), 0, 0)
    }

    pub fn constant(a: Rational) -> Self {
        Self::monomial(a, 0, 0)
    }

    /// `a * (1-x)^b * L^c`.
    pub fn monomial(a: Rational, pow1mx: i64, powlog: u32) -> Self {
        let mut e = Self::zero();
        e.accumulate((pow1mx, powlog), a);
        e
    }

    /// `x`, stored as `1 - (1-x)`.
    pub fn x() -> Self {
        Self::x_pow(1)
    }

    /// `x^k = (1 - (1-x))^k`, expanded binomially.
    pub fn x_pow(k: u32) -> Self {
        let mut e = Self::zero();
        for j in 0..=k {
            let mut c = Rational::from_integer(binomial(k as u64, j as u64));
            if j % 2 == 1 {
                c = -c;
            }
            e.accumulate((j as i64, 0), c);
        }
        e
    }

    /// `(1-x)^b`.
    pub fn one_minus_x_pow(b: i64) -> Self {
        Self::monomial(Rational::one(), b, 0)
    }

    /// `L^c`.
    pub fn log_pow(c: u32) -> Self {
        Self::monomial(Rational::one(), 0, c)
    }

    /// Polynomial in `x` from ascending coefficients `[a0, a1, ...]`.
    pub fn from_x_poly(coeffs: &[Rational]) -> Self {
        let mut e = Self::zero();
        for (k, a) in coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            e = &e + &(&Self::x_pow(k as u32) * a);
        }
        e
    }

    pub fn from_terms<I: IntoIterator<Item = PLTerm>>(terms: I) -> Self {
        let mut e = Self::zero();
        for t in terms {
            e.accumulate((t.pow1mx, t.powlog), t.coeff);
        }
        e
    }

    fn accumulate(&mut self, key: TermKey, a: Rational) {
        if a.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(a);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += a;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `(1-x)^b * L^c`, zero if absent.
    pub fn coeff(&self, pow1mx: i64, powlog: u32) -> Rational {
        self.terms
            .get(&(pow1mx, powlog))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (TermKey, &Rational)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn terms(&self) -> Vec<PLTerm> {
        self.iter()
            .map(|((b, c), a)| PLTerm { coeff: a.clone(), pow1mx: b, powlog: c })
            .collect()
    }

    /// True when the expression lies in the unextended class: every power of
    /// `(1-x)` is non-negative.
    pub fn is_pl(&self) -> bool {
        self.terms.keys().all(|&(b, _)| b >= 0)
    }

    pub fn min_pow1mx(&self) -> Option<i64> {
        self.terms.keys().map(|&(b, _)| b).min()
    }

    pub fn max_powlog(&self) -> Option<u32> {
        self.terms.keys().map(|&(_, c)| c).max()
    }

    pub fn scale(&self, a: &Rational) -> Self {
        if a.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * a)).collect(),
        }
    }

    /// Value at `x = 0`: `L(0) = 0` and `(1-0)^b = 1`, so only log-free terms
    /// contribute.
    pub fn value_at_zero(&self) -> Rational {
        self.terms
            .iter()
            .filter(|((_, c), _)| *c == 0)
            .fold(Rational::zero(), |acc, (_, a)| acc + a)
    }

    pub fn differentiate(&self) -> Self {
        let mut out = Self::zero();
        for (&(b, c), a) in &self.terms {
            // d/dx (1-x)^b = -b (1-x)^(b-1);  d/dx L^c = c (1-x)^-1 L^(c-1)
            if b != 0 {
                out.accumulate((b - 1, c), -(a * Rational::from_integer(BigInt::from(b))));
            }
            if c > 0 {
                out.accumulate((b - 1, c - 1), a * Rational::from_integer(BigInt::from(c)));
            }
        }
        out
    }

    /// The antiderivative that vanishes at `x = 0`.
    pub fn integrate(&self) -> Self {
        let mut out = Self::zero();
        for (&(b, c), a) in &self.terms {
            integrate_term_into(&mut out, a, b, c);
        }
        out
    }

    pub fn to_json_terms(&self) -> Vec<JsonTerm> {
        self.iter()
            .map(|((b, c), a)| JsonTerm {
                num: a.numer().to_string(),
                den: a.denom().to_string(),
                b,
                c,
            })
            .collect()
    }

    pub fn from_json_terms(terms: &[JsonTerm]) -> Result<Self> {
        let mut e = Self::zero();
        for t in terms {
            let num: BigInt = t.num.parse().map_err(|_| Error::Parse {
                pos: 0,
                msg: format!("invalid numerator {:?}", t.num),
            })?;
            let den: BigInt = t.den.parse().map_err(|_| Error::Parse {
                pos: 0,
                msg: format!("invalid denominator {:?}", t.den),
            })?;
            if den <= BigInt::zero() {
                return Err(Error::Parse {
                    pos: 0,
                    msg: format!("denominator must be positive, got {}", t.den),
                });
            }
            e.accumulate((t.b, t.c), Rational::new(num, den));
        }
        Ok(e)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_terms()).expect("terms serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let terms: Vec<JsonTerm> = serde_json::from_str(s).map_err(|e| Error::Parse {
            pos: e.column(),
            msg: e.to_string(),
        })?;
        Self::from_json_terms(&terms)
    }

    pub fn parse(s: &str) -> Result<Self> {
        Parser { src: s.as_bytes(), pos: 0 }.expression()
    }
}

/// Adds `a * ∫_0^x (1-t)^b L(t)^c dt` to `out`.
fn integrate_term_into(out: &mut PLExpr, a: &Rational, b: i64, c: u32) {
    if b == -1 {
        // ∫ L^c / (1-x) = L^(c+1) / (c+1)
        out.accumulate((0, c + 1), a / Rational::from_integer(BigInt::from(c + 1)));
        return;
    }
    // Unrolled integration by parts:
    // ∫ (1-x)^b L^c = -(1-x)^(b+1) Σ_{j=0..c} c!/(c-j)! / (b+1)^(j+1) L^(c-j)
    let b1 = Rational::from_integer(BigInt::from(b + 1));
    let mut falling = Rational::one();
    let mut denom = b1.clone();
    for j in 0..=c {
        out.accumulate((b + 1, c - j), -(a * &falling / &denom));
        falling *= Rational::from_integer(BigInt::from(c - j));
        denom *= &b1;
    }
    // The log-free summand is -(c!/(b+1)^(c+1)) (1-x)^(b+1); it equals that
    // constant at zero, which is cancelled here.
    let at_zero = Rational::from_integer(factorial(c as usize)) / b1.pow(c as i32 + 1);
    out.accumulate((0, 0), a * at_zero);
}

impl Add<&PLExpr> for &PLExpr {
    type Output = PLExpr;
    fn add(self, rhs: &PLExpr) -> PLExpr {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.accumulate(*k, v.clone());
        }
        out
    }
}

impl Sub<&PLExpr> for &PLExpr {
    type Output = PLExpr;
    fn sub(self, rhs: &PLExpr) -> PLExpr {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.accumulate(*k, -v.clone());
        }
        out
    }
}

impl Neg for &PLExpr {
    type Output = PLExpr;
    fn neg(self) -> PLExpr {
        PLExpr {
            terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }
}

impl Mul<&PLExpr> for &PLExpr {
    type Output = PLExpr;
    fn mul(self, rhs: &PLExpr) -> PLExpr {
        let mut out = PLExpr::zero();
        for (&(b1, c1), a1) in &self.terms {
            for (&(b2, c2), a2) in &rhs.terms {
                out.accumulate((b1 + b2, c1 + c2), a1 * a2);
            }
        }
        out
    }
}

impl Mul<&Rational> for &PLExpr {
    type Output = PLExpr;
    fn mul(self, rhs: &Rational) -> PLExpr {
        self.scale(rhs)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<PLExpr> for PLExpr {
            type Output = PLExpr;
            fn $m(self, rhs: PLExpr) -> PLExpr {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for PLExpr {
    type Output = PLExpr;
    fn neg(self) -> PLExpr {
        -&self
    }
}

pub fn pl_add(e1: &PLExpr, e2: &PLExpr) -> PLExpr {
    e1 + e2
}

pub fn pl_mul(e1: &PLExpr, e2: &PLExpr) -> PLExpr {
    e1 * e2
}

pub fn pl_differentiate(e: &PLExpr) -> PLExpr {
    e.differentiate()
}

pub fn pl_integrate(e: &PLExpr) -> PLExpr {
    e.integrate()
}

pub fn pl_value_at_zero(e: &PLExpr) -> Rational {
    e.value_at_zero()
}

pub fn pl_parse(s: &str) -> Result<PLExpr> {
    PLExpr::parse(s)
}

pub fn pl_format(e: &PLExpr) -> String {
    e.to_string()
}

/// One entry of the JSON form. Numbers are decimal strings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub num: String,
    pub den: String,
    pub b: i64,
    pub c: u32,
}

impl fmt::Display for PLExpr {
    /// `a*(1-x)^b*L^c` terms joined by ` + `, ascending `(b, c)`; `0` when
    /// empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (&(b, c), a)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            f.write_str(&rational::to_fraction_string(a))?;
            match b {
                0 => {}
                1 => f.write_str("*(1-x)")?,
                _ => write!(f, "*(1-x)^{b}")?,
            }
            match c {
                0 => {}
                1 => f.write_str("*L")?,
                _ => write!(f, "*L^{c}")?,
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for PLExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

// expression := term (('+' | '-') term)*
// term       := rational ('*' factor)* | factor ('*' factor)*
// factor     := 'x' ['^' int] | '(1-x)' ['^' int] | 'L' ['^' int]
// rational   := int ['/' posint]
struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Parse { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expression(&mut self) -> Result<PLExpr> {
        let mut acc = PLExpr::zero();
        let first = self.term()?;
        acc = &acc + &first;
        loop {
            match self.peek() {
                None => return Ok(acc),
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc + &t;
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = &acc - &t;
                }
                Some(c) => return self.err(format!("expected '+' or end of input, found {:?}", c as char)),
            }
        }
    }

    fn term(&mut self) -> Result<PLExpr> {
        let mut acc = match self.peek() {
            Some(c) if c.is_ascii_digit() || c == b'-' || c == b'+' => {
                PLExpr::constant(self.rational()?)
            }
            Some(_) => self.factor()?,
            None => return self.err("expected a term, found end of input"),
        };
        while self.eat(b'*') {
            let f = self.factor()?;
            acc = &acc * &f;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<PLExpr> {
        match self.peek() {
            Some(b'x') => {
                self.pos += 1;
                let k = self.exponent()?;
                if k < 0 {
                    return self.err("negative power of x is not representable");
                }
                Ok(PLExpr::x_pow(k as u32))
            }
            Some(b'L') => {
                self.pos += 1;
                let c = self.exponent()?;
                if c < 0 {
                    return self.err("negative power of L is not representable");
                }
                Ok(PLExpr::log_pow(c as u32))
            }
            Some(b'(') => {
                let start = self.pos;
                let rest: Vec<u8> = self.src[self.pos..]
                    .iter()
                    .copied()
                    .filter(|b| !b.is_ascii_whitespace())
                    .take(5)
                    .collect();
                if rest != b"(1-x)" {
                    return self.err("expected '(1-x)'");
                }
                // consume exactly the five non-space bytes
                let mut seen = 0;
                while seen < 5 {
                    if !self.src[self.pos].is_ascii_whitespace() {
                        seen += 1;
                    }
                    self.pos += 1;
                }
                debug_assert!(self.pos > start);
                let b = self.exponent()?;
                Ok(PLExpr::one_minus_x_pow(b))
            }
            Some(c) => self.err(format!("expected 'x', 'L' or '(1-x)', found {:?}", c as char)),
            None => self.err("expected a factor, found end of input"),
        }
    }

    fn exponent(&mut self) -> Result<i64> {
        if !self.eat(b'^') {
            return Ok(1);
        }
        self.skip_ws();
        let start = self.pos;
        if matches!(self.src.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            return self.err("expected an integer exponent");
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<i64>()
            .or_else(|_| Err(Error::Parse { pos: start, msg: format!("exponent {text} out of range") }))
    }

    fn integer(&mut self, signed: bool) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        if signed && matches!(self.src.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
            self.skip_ws();
        }
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            return self.err("expected digits");
        }
        let text: String = std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii")
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        Ok(text.parse().expect("validated digits"))
    }

    fn rational(&mut self) -> Result<Rational> {
        let num = self.integer(true)?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let at = self.pos;
            let den = self.integer(false)?;
            if den.is_zero() {
                return Err(Error::Parse { pos: at, msg: "zero denominator".into() });
            }
            Ok(Rational::new(num, den))
        } else {
            Ok(Rational::from_integer(num))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn p(s: &str) -> PLExpr {
        PLExpr::parse(s).unwrap()
    }

    fn b2() -> PLExpr {
        p("2*L - 2*x - 1/3*x^3")
    }

    #[test]
    fn additive_inverse_is_empty() {
        let e = &p("(1-x)") + &p("-1*(1-x)");
        assert!(e.is_zero());
        assert_eq!(e.to_string(), "0");
    }

    #[test]
    fn x_plus_x_in_the_one_minus_x_basis() {
        let e = &PLExpr::x() + &PLExpr::x();
        assert_eq!(e.coeff(0, 0), int(2));
        assert_eq!(e.coeff(1, 0), int(-2));
        assert_eq!(e.len(), 2);
    }

    #[test]
    fn b1_plus_b2() {
        let sum = &PLExpr::x() + &b2();
        assert_eq!(sum, p("2*L - x - 1/3*x^3"));
    }

    #[test]
    fn products() {
        assert_eq!(&p("(1-x)") * &p("(1-x)"), p("(1-x)^2"));
        let xx = &PLExpr::x() * &PLExpr::x();
        assert_eq!(xx, p("1 + -2*(1-x) + (1-x)^2"));
        assert_eq!(xx, PLExpr::x_pow(2));
        let e = &p("(1-x)^-1") * &p("L");
        assert_eq!(e.terms(), vec![PLTerm { coeff: int(1), pow1mx: -1, powlog: 1 }]);
    }

    #[test]
    fn derivatives() {
        assert_eq!(p("L").differentiate(), p("(1-x)^-1"));
        let d = b2().differentiate();
        assert_eq!(d, p("2*(1-x)^-1 - 2 - x^2"));
        assert_eq!(d, &p("2*x*(1-x)^-1") - &p("x^2"));
        assert_eq!(p("(1-x)^2").differentiate(), p("-2*(1-x)"));
    }

    #[test]
    fn integrals() {
        assert_eq!(p("(1-x)^-1*L").integrate(), p("1/2*L^2"));
        for c in 0..7u32 {
            let e = PLExpr::monomial(int(1), -1, c);
            assert_eq!(e.integrate(), PLExpr::monomial(frac(1, c as i64 + 1), 0, c + 1));
        }
        assert_eq!(p("2*x*(1-x)^-1 - x^2").integrate(), b2());
        assert_eq!(PLExpr::one().integrate(), p("-1*(1-x) + 1"));
        assert_eq!(PLExpr::one().integrate(), PLExpr::x());
    }

    #[test]
    fn integrate_negative_powers() {
        // ∫ (1-x)^-2 = (1-x)^-1 - 1
        assert_eq!(p("(1-x)^-2").integrate(), p("(1-x)^-1 - 1"));
        let e = p("3/7*(1-x)^-4*L^3");
        assert_eq!(e.integrate().differentiate(), e);
        assert!(e.integrate().value_at_zero().is_zero());
    }

    #[test]
    fn values_at_zero() {
        assert!(PLExpr::zero().value_at_zero().is_zero());
        assert!(b2().value_at_zero().is_zero());
        assert_eq!(p("5*(1-x)^3").value_at_zero(), int(5));
    }

    #[test]
    fn parse_examples() {
        let x = p("x");
        assert_eq!(x.coeff(0, 0), int(1));
        assert_eq!(x.coeff(1, 0), int(-1));
        assert_eq!(x.len(), 2);
        assert_eq!(p("2*L^1 + -2*x + -1/3*x^3"), b2());
        assert_eq!(p("(1-x)^-2").terms(), vec![PLTerm { coeff: int(1), pow1mx: -2, powlog: 0 }]);
        assert_eq!(p(" ( 1 - x ) ^ 3 "), PLExpr::one_minus_x_pow(3));
    }

    #[test]
    fn parse_errors_carry_positions() {
        match PLExpr::parse("1/0*x") {
            Err(Error::Parse { pos, msg }) => {
                assert_eq!(pos, 2);
                assert!(msg.contains("zero denominator"));
            }
            other => panic!("unexpected {other:?}"),
        }
        match PLExpr::parse("2*y") {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(PLExpr::parse("").is_err());
        assert!(PLExpr::parse("x +").is_err());
        assert!(PLExpr::parse("x^-1").is_err());
        assert!(PLExpr::parse("(1+x)").is_err());
        assert!(PLExpr::parse("1/-3").is_err());
        assert!(PLExpr::parse("x x").is_err());
    }

    #[test]
    fn format_is_sorted_and_parses_back() {
        let e = p("L^2 + 3*(1-x)^-2 + 1/2*(1-x)*L");
        assert_eq!(e.to_string(), "3*(1-x)^-2 + 1*L^2 + 1/2*(1-x)*L");
        assert_eq!(p(&e.to_string()), e);
    }

    #[test]
    fn json_round_trip() {
        let e = b2();
        let s = e.to_json();
        assert_eq!(
            s,
            r#"[{"num":"-7","den":"3","b":0,"c":0},{"num":"2","den":"1","b":0,"c":1},{"num":"3","den":"1","b":1,"c":0},{"num":"-1","den":"1","b":2,"c":0},{"num":"1","den":"3","b":3,"c":0}]"#
        );
        assert_eq!(PLExpr::from_json(&s).unwrap(), e);
        assert!(PLExpr::from_json(r#"[{"num":"1","den":"0","b":0,"c":0}]"#).is_err());
    }

    #[test]
    fn pl_membership() {
        assert!(b2().is_pl());
        assert!(!p("(1-x)^-1").is_pl());
        assert!(PLExpr::zero().is_pl());
    }
}
