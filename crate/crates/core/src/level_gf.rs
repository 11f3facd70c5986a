//! Generating functions for vertex levels and their limit constants.
//!
//! `B_k` is the exponential generating function of trees whose root is at
//! level `k`; `A_k` counts (tree, level-`k` vertex) pairs, so `[x^n] A_k` is
//! the expected number of level-`k` vertices in a random tree of size `n`.
//! Both are built exactly in the `PLExpr` algebra:
//!
//! ```text
//! B_1 = x
//! B_k' = 2 B_{k-1} (1/(1-x) - B_1 - ... - B_{k-2}) - B_{k-1}^2
//! A_k  = (1-x)^-2 ∫ (1-x)^2 B_k'
//! ```
//!
//! The limit `c_k = lim a_{n,k} / (n+1)!` is the coefficient of `(1-x)^-2`
//! in `A_k`.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::pl::PLExpr;
use crate::rational::Rational;
use crate::series::expand;

/// Levels above this are accepted but slow; callers may want to warn.
pub const TESTED_MAX_LEVEL: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GFBundle {
    pub k: usize,
    pub b: PLExpr,
    pub b_prime: PLExpr,
    pub a: PLExpr,
    pub c: Rational,
}

/// Bundles `1..=k`, computed in order and kept.
#[derive(Debug, Default, Clone)]
pub struct GfCache {
    bundles: Vec<GFBundle>,
    // running sum B_1 + ... + B_{len}
    b_sum: PLExpr,
}

impl GfCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn computed(&self) -> usize {
        self.bundles.len()
    }

    pub fn bundle(&mut self, k: usize) -> Result<&GFBundle> {
        if k == 0 {
            return Err(Error::InvalidLevel(k));
        }
        while self.bundles.len() < k {
            self.push_next()?;
        }
        Ok(&self.bundles[k - 1])
    }

    fn push_next(&mut self) -> Result<()> {
        let k = self.bundles.len() + 1;
        let b_prime = if k == 1 {
            PLExpr::one()
        } else {
            let prev = &self.bundles[k - 2].b;
            // 1/(1-x) - (B_1 + ... + B_{k-2}) = 1/(1-x) - (sum through k-1) + B_{k-1}
            let rest = &(&PLExpr::one_minus_x_pow(-1) - &self.b_sum) + prev;
            let two = Rational::from_integer(BigInt::from(2));
            &(prev * &rest).scale(&two) - &(prev * prev)
        };
        let b = if k == 1 { PLExpr::x() } else { b_prime.integrate() };
        let a = solve_a(&b_prime);
        let c = a.coeff(-2, 0);
        let bundle = GFBundle { k, b, b_prime, a, c };
        check_structure(&bundle, self.bundles.last())?;
        self.b_sum = &self.b_sum + &bundle.b;
        self.bundles.push(bundle);
        Ok(())
    }
}

/// Solution of `A' = 2/(1-x) A + B'` with `A(0) = 0`.
fn solve_a(b_prime: &PLExpr) -> PLExpr {
    let weighted = b_prime * &PLExpr::one_minus_x_pow(2);
    &weighted.integrate() * &PLExpr::one_minus_x_pow(-2)
}

fn check_structure(bundle: &GFBundle, prev: Option<&GFBundle>) -> Result<()> {
    let k = bundle.k;
    let fail = |msg: String| Err(Error::StructuralViolation { k, msg });
    if !bundle.b.value_at_zero().is_zero() {
        return fail("B(0) != 0".into());
    }
    if !bundle.b.is_pl() {
        return fail("B has a negative power of (1-x)".into());
    }
    if !bundle.a.value_at_zero().is_zero() {
        return fail("A(0) != 0".into());
    }
    for ((b, c), _) in bundle.a.iter() {
        if b <= -3 {
            return fail(format!("term with (1-x)^{b}"));
        }
        if b < 0 && c > 0 {
            return fail(format!("term (1-x)^{b} L^{c} mixes a pole with a logarithm"));
        }
    }
    if bundle.c.is_zero() {
        return fail("(1-x)^-2 coefficient vanishes".into());
    }
    if !bundle.c.is_positive() || bundle.c > Rational::one() {
        return fail(format!("c = {} is not in (0, 1]", bundle.c));
    }
    if let Some(p) = prev {
        if bundle.c > p.c {
            return fail(format!("c_{k} = {} exceeds c_{} = {}", bundle.c, p.k, p.c));
        }
    }
    Ok(())
}

fn shared() -> &'static Mutex<GfCache> {
    static CACHE: OnceLock<Mutex<GfCache>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(GfCache::new()))
}

/// Bundle `k` from the process-wide cache. The lock is held while missing
/// levels are computed, so each level is built once.
pub fn bundle(k: usize) -> Result<GFBundle> {
    let mut cache = shared().lock().unwrap_or_else(|e| e.into_inner());
    cache.bundle(k).cloned()
}

pub fn compute_b(k: usize) -> Result<PLExpr> {
    Ok(bundle(k)?.b)
}

pub fn compute_b_prime(k: usize) -> Result<PLExpr> {
    Ok(bundle(k)?.b_prime)
}

pub fn compute_a(k: usize) -> Result<PLExpr> {
    Ok(bundle(k)?.a)
}

pub fn extract_ck(k: usize) -> Result<Rational> {
    Ok(bundle(k)?.c)
}

/// `[x^n] A_k`, the exact value of `a_{n,k} / n!`.
pub fn expected_level_count(k: usize, n: usize) -> Result<Rational> {
    let a = compute_a(k)?;
    Ok(expand(&a, n).coeffs()[n].clone())
}

/// `[x^n] A_k` for every `n <= order` in one expansion.
pub fn expected_level_counts(k: usize, order: usize) -> Result<Vec<Rational>> {
    let a = compute_a(k)?;
    Ok(expand(&a, order).coeffs().to_vec())
}

fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

/// Probability that a random permutation of length `2^k - 1` has a perfect
/// tree: `Q_1 = 1`, `Q_{k+1} = Q_k^2 / (2^{k+1} - 1)`.
pub fn qk(k: usize) -> Result<Rational> {
    if k == 0 {
        return Err(Error::InvalidLevel(k));
    }
    let mut q = Rational::one();
    for j in 2..=k {
        q = &q * &q / Rational::from_integer(pow2(j) - 1);
    }
    Ok(q)
}

/// Probability that a fixed interior position roots a perfect subtree whose
/// root is at level `k`: `Q_k * 2 / ((2^k + 1) 2^k)`.
pub fn pk(k: usize) -> Result<Rational> {
    let q = qk(k)?;
    let m = pow2(k);
    Ok(q * Rational::new(BigInt::from(2), (&m + 1) * &m))
}

/// Lower bound `P_k / 2` on the fraction of level-`k` vertices.
pub fn gamma_k(k: usize) -> Result<Rational> {
    Ok(pk(k)? / Rational::from_integer(BigInt::from(2)))
}

/// Smallest `n` for which the `gamma_k` bound is established, `2^(k+1)`.
pub fn gamma_threshold(k: usize) -> usize {
    1usize << (k + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn first_levels() {
        let mut cache = GfCache::new();
        assert_eq!(cache.bundle(1).unwrap().b, PLExpr::x());
        assert_eq!(cache.bundle(1).unwrap().c, frac(1, 3));
        let b2 = cache.bundle(2).unwrap();
        assert_eq!(b2.b, PLExpr::parse("2*L - 2*x - 1/3*x^3").unwrap());
        assert_eq!(b2.c, frac(3, 10));
        assert_eq!(cache.computed(), 2);
        assert_eq!(cache.bundle(0), Err(Error::InvalidLevel(0)));
    }

    #[test]
    fn a1_closed_form() {
        let a1 = compute_a(1).unwrap();
        assert_eq!(a1, PLExpr::parse("1/3*(1-x)^-2 - 1/3*(1-x)").unwrap());
        for n in 2..12 {
            assert_eq!(expected_level_count(1, n).unwrap(), frac(n as i64 + 1, 3));
        }
    }

    #[test]
    fn bounds() {
        assert_eq!(qk(1).unwrap(), int(1));
        assert_eq!(qk(2).unwrap(), frac(1, 3));
        assert_eq!(qk(3).unwrap(), frac(1, 63));
        // Q_3^2 / (2^4 - 1)
        assert_eq!(qk(4).unwrap(), frac(1, 59535));
        assert_eq!(pk(1).unwrap(), frac(1, 3));
        assert_eq!(pk(2).unwrap(), frac(1, 30));
        assert_eq!(pk(3).unwrap(), frac(1, 2268));
        assert_eq!(gamma_k(1).unwrap(), frac(1, 6));
        assert_eq!(gamma_k(3).unwrap(), frac(1, 4536));
        assert_eq!(gamma_threshold(3), 16);
        assert!(qk(0).is_err() && pk(0).is_err() && gamma_k(0).is_err());
    }
}
