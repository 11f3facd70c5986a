//! Acceptance criteria. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use bstlevels::level_gf::{
    compute_a, compute_b, compute_b_prime, expected_level_counts, extract_ck, pk, qk,
};
use bstlevels::pl::{pl_add, pl_differentiate, pl_format, pl_integrate, pl_mul, pl_parse, pl_value_at_zero};
use bstlevels::rational::{factorial, frac, parse_rational};
use bstlevels::series::{expand, series_add, series_mul};
use bstlevels::tree::{build_tree, enumerate_levels, is_perfect, protected_expectation, sample_levels};
use bstlevels::{PLExpr, Permutation, Rational};
use common::{all_permutations, arb_expr, p, A2_DISPLAY, A3_DISPLAY, B2_DISPLAY, B3_PRIME_DISPLAY, C4};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::{Config, TestRng, TestRunner};

/// Monte Carlo tolerance on level frequencies.
const SAMPLE_TOLERANCE: (i64, i64) = (2, 1000);
/// Upper bound on |[x^80]A_3/81 - c_3|.
const CONVERGENCE_TOLERANCE: (i64, i64) = (1, 100);
const SAMPLE_N: usize = 100_000;
const SAMPLE_TRIALS: u64 = 1_000;
const SAMPLE_SEED: u64 = 7;
const RANDOM_EXPRESSIONS: usize = 1000;

fn ac1_constants() {
    assert_eq!(extract_ck(1).unwrap(), frac(1, 3));
    assert_eq!(extract_ck(2).unwrap(), frac(3, 10));
    assert_eq!(extract_ck(3).unwrap(), frac(1721, 8100));
    assert_eq!(extract_ck(4).unwrap(), parse_rational(C4).unwrap());
}

fn ac2_closed_forms() {
    assert_eq!(compute_b(2).unwrap(), p(B2_DISPLAY));
    assert_eq!(compute_b_prime(3).unwrap(), p(B3_PRIME_DISPLAY));
    assert_eq!(compute_a(2).unwrap(), p(A2_DISPLAY));
    assert_eq!(compute_a(3).unwrap(), p(A3_DISPLAY));
}

fn ac3_oracle_equivalence() {
    let n_max = 9;
    // every level up to 5 is compared, which covers all k <= log2(n+1)
    let k_max = 5;
    let series: Vec<Vec<Rational>> = (1..=k_max).map(|k| expected_level_counts(k, n_max).unwrap()).collect();
    for n in 1..=n_max {
        let table = enumerate_levels(n).unwrap();
        let nf = factorial(n);
        for k in 1..=n.min(k_max) {
            let symbolic = &series[k - 1][n] * Rational::from_integer(nf.clone());
            assert_eq!(symbolic, Rational::from_integer(table.count(k)), "n={n} k={k}");
        }
        assert_eq!(table.total(), BigInt::from(n) * &nf);
        if n >= 2 {
            assert_eq!(table.count(1), factorial(n + 1) / 3, "a_(n,1), n={n}");
        }
        if n >= 4 {
            assert_eq!(table.count(2), factorial(n + 1) * 3 / 10, "a_(n,2), n={n}");
            assert_eq!(table.two_leaf_parents, factorial(n + 1) / 30, "d_n, n={n}");
            assert_eq!(protected_expectation(n).unwrap(), frac(11 * n as i64 - 19, 30), "n={n}");
        }
    }
}

fn ac4_local_patterns() {
    let hits = all_permutations(5)
        .into_iter()
        .filter(|q| {
            let t = build_tree(&Permutation::new(q.clone()).unwrap()).unwrap();
            t.left(q[2]) == Some(q[1]) && t.right(q[2]) == Some(q[3]) && t.is_leaf(q[1]) && t.is_leaf(q[3])
        })
        .count();
    assert_eq!(hits, 4);
    for (n, q) in [(3usize, 2usize), (7, 3)] {
        let all = all_permutations(n);
        let perfect = all
            .iter()
            .filter(|v| is_perfect(&build_tree(&Permutation::new(v.to_vec()).unwrap()).unwrap()))
            .count();
        assert_eq!(Rational::new(BigInt::from(perfect), BigInt::from(all.len())), qk(q).unwrap());
    }
    assert_eq!(qk(2).unwrap(), frac(1, 3));
    assert_eq!(qk(3).unwrap(), frac(1, 63));
    assert_eq!(pk(3).unwrap(), frac(1, 2268));
}

fn ac5_ode_residuals() {
    for k in 1..=5 {
        let b = compute_b(k).unwrap();
        let rhs = if k == 1 {
            PLExpr::one()
        } else {
            let prev = compute_b(k - 1).unwrap();
            let mut bracket = PLExpr::one_minus_x_pow(-1);
            for j in 1..k - 1 {
                bracket = &bracket - &compute_b(j).unwrap();
            }
            &(&prev * &bracket).scale(&frac(2, 1)) - &(&prev * &prev)
        };
        assert!((&b.differentiate() - &rhs).is_zero(), "B_{k}");
        let a = compute_a(k).unwrap();
        let a_rhs = &(&a * &PLExpr::monomial(frac(2, 1), -1, 0)) + &compute_b_prime(k).unwrap();
        assert!((&a.differentiate() - &a_rhs).is_zero(), "A_{k}");
    }
}

fn ac6_structure() {
    for k in 1..=5 {
        let a = compute_a(k).unwrap();
        for ((b, c), _) in a.iter() {
            assert!(b >= -2, "A_{k} has (1-x)^{b}");
            assert!(b >= 0 || c == 0, "A_{k} has (1-x)^{b} L^{c}");
        }
        assert!(!a.coeff(-2, 0).is_zero(), "A_{k}");
    }
}

fn ac7_convergence() {
    let c3 = frac(1721, 8100);
    let s = expected_level_counts(3, 80).unwrap();
    let gaps: Vec<Rational> = [20usize, 40, 80]
        .iter()
        .map(|&n| (&s[n] / Rational::from_integer(BigInt::from(n + 1)) - &c3).abs())
        .collect();
    assert!(gaps[1] < gaps[0] && gaps[2] < gaps[1], "gaps not decreasing");
    assert!(gaps[2] < frac(CONVERGENCE_TOLERANCE.0, CONVERGENCE_TOLERANCE.1));

    let sample = sample_levels(SAMPLE_N, SAMPLE_TRIALS, SAMPLE_SEED).unwrap();
    let tol = frac(SAMPLE_TOLERANCE.0, SAMPLE_TOLERANCE.1);
    for k in 1..=4 {
        let dev = (sample.frequency(k) - extract_ck(k).unwrap()).abs();
        assert!(dev <= tol, "level {k}: deviation {dev}");
    }
}

fn ac8_calculus_properties() {
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(Default::default()));
    let strategy = arb_expr();
    let mut draw = || strategy.new_tree(&mut runner).unwrap().current();
    for i in 0..RANDOM_EXPRESSIONS {
        let (a, b, c) = (draw(), draw(), draw());
        assert_eq!(pl_differentiate(&pl_integrate(&a)), a, "case {i}");
        assert_eq!(pl_integrate(&pl_differentiate(&a)), &a - &PLExpr::constant(pl_value_at_zero(&a)), "case {i}");
        assert_eq!(pl_add(&a, &b), pl_add(&b, &a));
        assert_eq!(pl_mul(&a, &b), pl_mul(&b, &a));
        assert_eq!(pl_mul(&pl_mul(&a, &b), &c), pl_mul(&a, &pl_mul(&b, &c)));
        assert_eq!(pl_add(&pl_add(&a, &b), &c), pl_add(&a, &pl_add(&b, &c)));
        assert_eq!(pl_mul(&a, &pl_add(&b, &c)), pl_add(&pl_mul(&a, &b), &pl_mul(&a, &c)));
        let order = i % 21;
        assert_eq!(expand(&pl_add(&a, &b), order), series_add(&expand(&a, order), &expand(&b, order)));
        assert_eq!(expand(&pl_mul(&a, &b), order), series_mul(&expand(&a, order), &expand(&b, order)));
        assert_eq!(pl_parse(&pl_format(&a)).unwrap(), a);
        assert_eq!(PLExpr::from_json(&a.to_json()).unwrap(), a);
    }
}

fn main() {
    // keep panic messages for the report instead of the default hook output
    std::panic::set_hook(Box::new(|_| {}));
    let criteria: [(&str, fn()); 8] = [
        ("AC1 constants c_1..c_4 exact", ac1_constants),
        ("AC2 closed forms B_2, B_3', A_2, A_3", ac2_closed_forms),
        ("AC3 oracle equivalence n <= 9", ac3_oracle_equivalence),
        ("AC4 local patterns and perfect trees", ac4_local_patterns),
        ("AC5 ODE residuals k <= 5", ac5_ode_residuals),
        ("AC6 pole structure of A_k, k <= 5", ac6_structure),
        ("AC7 convergence and Monte Carlo", ac7_convergence),
        ("AC8 calculus property suite", ac8_calculus_properties),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("PASS  {name}  ({secs:.2}s)"),
            Err(e) => {
                failed += 1;
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("FAIL  {name}  ({secs:.2}s): {msg}");
            }
        }
    }
    println!("{} of 8 acceptance criteria passed", 8 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
