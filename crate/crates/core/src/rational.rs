//! Exact rational scalars.
//!
//! `Rational` is `num_rational::BigRational`, which always stores a reduced
//! fraction with a positive denominator. The helpers here cover the pieces
//! the rest of the crate needs on top of it: parsing, the `num/den` string
//! form used in JSON, factorials and binomials, and fixed-point decimal
//! rendering.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_bigint(v: BigInt) -> Rational {
    Rational::from_integer(v)
}

/// Parses `int` or `int/posint`, e.g. `-22/15`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = |msg: &str| Error::Parse { pos: 0, msg: format!("{msg}: {s:?}") };
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s.trim(), None),
    };
    let num: BigInt = num.parse().map_err(|_| bad("invalid numerator"))?;
    let den: BigInt = match den {
        Some(d) => {
            if d.starts_with('-') || d.starts_with('+') {
                return Err(bad("denominator must be a positive integer"));
            }
            d.parse().map_err(|_| bad("invalid denominator"))?
        }
        None => BigInt::one(),
    };
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// `num/den`, or just `num` for integers.
pub fn to_fraction_string(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Always `num/den`, even for integers. This is the form used in series JSON.
pub fn to_num_den_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Fixed-point decimal with `places` digits after the point, rounded
/// half-to-even.
pub fn to_decimal(r: &Rational, places: u32) -> String {
    let scale = BigInt::from(10u32).pow(places);
    let neg = r.is_negative();
    let num = r.numer().abs() * &scale;
    let den = r.denom().clone();
    let (mut q, rem) = num.div_rem(&den);
    let twice = rem * 2u32;
    if twice > den || (twice == den && q.is_odd()) {
        q += 1u32;
    }
    let digits = q.to_string();
    let places = places as usize;
    let body = if places == 0 {
        digits
    } else {
        let padded = format!("{:0>width$}", digits, width = places + 1);
        let split = padded.len() - places;
        format!("{}.{}", &padded[..split], &padded[split..])
    };
    if neg && !q.is_zero() {
        format!("-{body}")
    } else {
        body
    }
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Binomial coefficient C(n, k) for non-negative `n`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}
