//! Truncated power series in `x` with exact rational coefficients.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::pl::PLExpr;
use crate::rational::{binomial, Rational};

/// Coefficients of `x^0 ..= x^order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Series {
    coeffs: Vec<Rational>,
}

impl Series {
    pub fn zero(order: usize) -> Self {
        Self { coeffs: vec![Rational::zero(); order + 1] }
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series carries at least the x^0 coefficient");
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Result<&Rational> {
        self.coeffs
            .get(n)
            .ok_or(Error::IndexOutOfRange { index: n, order: self.order() })
    }

    pub fn truncate(&self, order: usize) -> Self {
        let keep = order.min(self.order()) + 1;
        Self { coeffs: self.coeffs[..keep].to_vec() }
    }

    pub fn add(&self, other: &Series) -> Series {
        let order = self.order().min(other.order());
        Series {
            coeffs: (0..=order).map(|i| &self.coeffs[i] + &other.coeffs[i]).collect(),
        }
    }

    pub fn mul(&self, other: &Series) -> Series {
        let order = self.order().min(other.order());
        let mut coeffs = vec![Rational::zero(); order + 1];
        for (i, a) in self.coeffs.iter().take(order + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(order + 1 - i).enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] += a * b;
                }
            }
        }
        Series { coeffs }
    }

    pub fn scale(&self, a: &Rational) -> Series {
        Series { coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    /// Termwise derivative; the result has order one less (order 0 stays 0).
    pub fn derivative(&self) -> Series {
        if self.order() == 0 {
            return Series::zero(0);
        }
        Series {
            coeffs: (1..=self.order())
                .map(|n| &self.coeffs[n] * Rational::from_integer(BigInt::from(n)))
                .collect(),
        }
    }

    /// `["num/den", ...]`.
    pub fn to_json(&self) -> String {
        let v: Vec<String> = self.coeffs.iter().map(crate::rational::to_num_den_string).collect();
        serde_json::to_string(&v).expect("strings serialize")
    }
}

pub fn series_add(s1: &Series, s2: &Series) -> Series {
    s1.add(s2)
}

pub fn series_mul(s1: &Series, s2: &Series) -> Series {
    s1.mul(s2)
}

pub fn series_coeff(s: &Series, n: usize) -> Result<Rational> {
    s.coeff(n).cloned()
}

/// Series of `(1-x)^b` through `x^order`.
fn one_minus_x_power(b: i64, order: usize) -> Series {
    let coeffs = (0..=order as u64)
        .map(|n| {
            let c = if b >= 0 {
                let c = binomial(b as u64, n);
                if n % 2 == 1 {
                    -c
                } else {
                    c
                }
            } else {
                let m = (-b - 1) as u64;
                binomial(n + m, m)
            };
            Rational::from_integer(c)
        })
        .collect();
    Series { coeffs }
}

/// `L = Σ_{m>=1} x^m / m`.
fn log_series(order: usize) -> Series {
    let mut coeffs = vec![Rational::zero(); order + 1];
    for (m, c) in coeffs.iter_mut().enumerate().skip(1) {
        *c = Rational::new(BigInt::one(), BigInt::from(m));
    }
    Series { coeffs }
}

/// Exact coefficients of `e` through `x^order`.
///
/// Terms are grouped by log power: the `(1-x)^b` parts sharing a power `c`
/// are summed first, then multiplied by `L^c` once.
pub fn expand(e: &PLExpr, order: usize) -> Series {
    let mut by_log: BTreeMap<u32, Series> = BTreeMap::new();
    for ((b, c), a) in e.iter() {
        let part = one_minus_x_power(b, order).scale(a);
        let slot = by_log.entry(c).or_insert_with(|| Series::zero(order));
        *slot = slot.add(&part);
    }
    let log = log_series(order);
    let mut log_power = Series::from_coeffs(
        std::iter::once(Rational::one())
            .chain(std::iter::repeat_n(Rational::zero(), order))
            .collect(),
    );
    let mut power = 0u32;
    let mut out = Series::zero(order);
    for (c, part) in by_log {
        while power < c {
            log_power = log_power.mul(&log);
            power += 1;
        }
        out = out.add(&part.mul(&log_power));
    }
    out
}
