#![allow(dead_code)]

use bstlevels::{PLExpr, PLTerm, Rational};
use num_bigint::BigInt;
use proptest::prelude::*;

/// Up to 8 terms, |b| <= 5, c <= 4.
pub fn arb_expr() -> impl Strategy<Value = PLExpr> {
    prop::collection::vec((-20i64..=20, 1i64..=12, -5i64..=5, 0u32..=4), 0..=8).prop_map(|terms| {
        PLExpr::from_terms(terms.into_iter().map(|(num, den, b, c)| PLTerm {
            coeff: Rational::new(BigInt::from(num), BigInt::from(den)),
            pow1mx: b,
            powlog: c,
        }))
    })
}

pub fn p(s: &str) -> PLExpr {
    PLExpr::parse(s).unwrap()
}

/// Permutation of 1..=n in lexicographic rank order, used by brute-force
/// oracles that must not share code with the library's enumerator.
pub fn all_permutations(n: usize) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, used: &mut Vec<bool>, n: usize, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for v in 1..=n {
            if !used[v] {
                used[v] = true;
                prefix.push(v as u32);
                rec(prefix, used, n, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n + 1], n, &mut out);
    out
}

/// The expression of A_3 displayed with the k = 3 worked example.
pub const A3_DISPLAY: &str = "1721/8100*(1-x)^-2 - 1/81*x^7 + 1/324*x^6 - 5/54*x^5 + 2/9*x^4*L \
    + 23/324*x^4 - 4/45*x^3*L + 349/2025*x^3 + 14/15*x^2*L + 979/2700*x^2 - 8/5*x*L \
    + 4219/4050*x - 4/3*x*L^2 + 4/3*L^2 - 1721/8100 - 22/15*L";

pub const B3_PRIME_DISPLAY: &str = "4*(1-x)^-1*L + 4*x*L - 2/3*x^3*(1-x)^-1 - 2/3*x^4 \
    - 4*x*(1-x)^-1 - 4*L^2 + 4/3*x^3*L - 1/9*x^6";

pub const A2_DISPLAY: &str =
    "-1/5*x^5*(1-x)^-2 + 1/2*x^4*(1-x)^-2 - x^3*(1-x)^-2 + x^2*(1-x)^-2";

pub const B2_DISPLAY: &str = "2*L - 2*x - 1/3*x^3";

pub const C4: &str = "250488312501647783/2294809143026400000";
