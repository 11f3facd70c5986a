//! Decreasing binary trees of permutations, vertex levels, exhaustive
//! enumeration and seeded sampling.
//!
//! The level of a vertex is one more than its distance to the closest leaf,
//! so leaves are at level 1.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::{factorial, Rational};

/// Default upper bound on `n` for exhaustive enumeration (10! trees).
pub const DEFAULT_ENUMERATION_LIMIT: usize = 10;

const NONE: u32 = 0;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    entries: Vec<u32>,
}

impl Permutation {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        let n = entries.len();
        let mut seen = vec![false; n + 1];
        for &v in &entries {
            let i = v as usize;
            if i == 0 || i > n {
                return Err(Error::InvalidPermutation { n, reason: format!("entry {v} out of range") });
            }
            if seen[i] {
                return Err(Error::InvalidPermutation { n, reason: format!("entry {v} repeated") });
            }
            seen[i] = true;
        }
        Ok(Self { entries })
    }

    pub fn identity(n: usize) -> Self {
        Self { entries: (1..=n as u32).collect() }
    }

    /// Parses one-line notation. Digits are read one per entry when there are
    /// no separators (`328794615`); otherwise entries are split on commas or
    /// whitespace.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |reason: String| Error::InvalidPermutation { n: 0, reason };
        let entries: Vec<u32> = if s.contains([',', ' ']) {
            s.split([',', ' '])
                .filter(|t| !t.is_empty())
                .map(|t| t.parse().map_err(|_| bad(format!("invalid entry {t:?}"))))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| bad(format!("invalid digit {c:?}"))))
                .collect::<Result<_>>()?
        };
        Self::new(entries)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }
}

impl std::fmt::Display for Permutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let sep = if self.entries.len() > 9 { "," } else { "" };
        let parts: Vec<String> = self.entries.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join(sep))
    }
}

/// A decreasing binary tree on the labels `1..=n`, stored by label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    root: u32,
    // index 0 unused; NONE marks a missing child
    left: Vec<u32>,
    right: Vec<u32>,
}

impl Tree {
    pub fn len(&self) -> usize {
        self.left.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    pub fn left(&self, v: u32) -> Option<u32> {
        Some(self.left[v as usize]).filter(|&c| c != NONE)
    }

    pub fn right(&self, v: u32) -> Option<u32> {
        Some(self.right[v as usize]).filter(|&c| c != NONE)
    }

    pub fn is_leaf(&self, v: u32) -> bool {
        self.left[v as usize] == NONE && self.right[v as usize] == NONE
    }
}

/// Reference builder: place the maximum, recurse on both flanks.
pub fn build_tree_naive(p: &Permutation) -> Result<Tree> {
    let e = p.entries();
    if e.is_empty() {
        return Err(Error::EmptyPermutation);
    }
    let n = e.len();
    let mut left = vec![NONE; n + 1];
    let mut right = vec![NONE; n + 1];
    let mut root = NONE;
    // (lo, hi, parent, is_left); an explicit stack keeps sorted inputs from
    // exhausting the call stack
    let mut work = vec![(0usize, n, NONE, false)];
    while let Some((lo, hi, parent, is_left)) = work.pop() {
        if lo >= hi {
            continue;
        }
        let (at, &max) = e[lo..hi]
            .iter()
            .enumerate()
            .max_by_key(|&(_, v)| *v)
            .expect("nonempty range");
        let at = lo + at;
        if parent == NONE {
            root = max;
        } else if is_left {
            left[parent as usize] = max;
        } else {
            right[parent as usize] = max;
        }
        work.push((lo, at, max, true));
        work.push((at + 1, hi, max, false));
    }
    Ok(Tree { root, left, right })
}

/// Linear-time builder using a decreasing monotone stack.
pub fn build_tree(p: &Permutation) -> Result<Tree> {
    let e = p.entries();
    if e.is_empty() {
        return Err(Error::EmptyPermutation);
    }
    let n = e.len();
    let mut left = vec![NONE; n + 1];
    let mut right = vec![NONE; n + 1];
    let mut stack: Vec<u32> = Vec::with_capacity(n);
    link_cartesian(e, &mut stack, &mut left, &mut right);
    Ok(Tree { root: stack[0], left, right })
}

/// Fills `left`/`right` (indexed by label) for the max-rooted Cartesian tree
/// of `entries`. On return the stack bottom is the root.
fn link_cartesian(entries: &[u32], stack: &mut Vec<u32>, left: &mut [u32], right: &mut [u32]) {
    stack.clear();
    for &v in entries {
        let mut last = NONE;
        while let Some(&top) = stack.last() {
            if top > v {
                break;
            }
            last = top;
            stack.pop();
        }
        left[v as usize] = last;
        right[v as usize] = NONE;
        if let Some(&top) = stack.last() {
            right[top as usize] = v;
        }
        stack.push(v);
    }
}

pub fn inorder(t: &Tree) -> Permutation {
    let mut out = Vec::with_capacity(t.len());
    let mut stack = Vec::new();
    let mut cur = t.root;
    while cur != NONE || !stack.is_empty() {
        while cur != NONE {
            stack.push(cur);
            cur = t.left[cur as usize];
        }
        let v = stack.pop().expect("nonempty");
        out.push(v);
        cur = t.right[v as usize];
    }
    Permutation { entries: out }
}

/// Level of every vertex, keyed by label.
pub fn levels(t: &Tree) -> BTreeMap<u32, u32> {
    let lv = level_vector(&t.left, &t.right);
    (1..=t.len() as u32).map(|v| (v, lv[v as usize])).collect()
}

// Children carry smaller labels than their parent, so ascending label order
// is a valid post-order.
fn level_vector(left: &[u32], right: &[u32]) -> Vec<u32> {
    let mut lv = vec![0u32; left.len()];
    fill_levels(left, right, &mut lv);
    lv
}

fn fill_levels(left: &[u32], right: &[u32], lv: &mut [u32]) {
    for v in 1..left.len() {
        let (l, r) = (left[v], right[v]);
        lv[v] = match (l, r) {
            (NONE, NONE) => 1,
            (NONE, c) | (c, NONE) => lv[c as usize] + 1,
            (a, b) => lv[a as usize].min(lv[b as usize]) + 1,
        };
    }
}

/// Histogram of levels: `hist[k]` vertices at level `k` (index 0 unused).
pub fn level_histogram(t: &Tree) -> Vec<u64> {
    let lv = level_vector(&t.left, &t.right);
    let mut hist = vec![0u64; t.len() + 1];
    for &l in &lv[1..] {
        hist[l as usize] += 1;
    }
    hist
}

/// Vertices with two children that are both leaves.
pub fn two_leaf_parents(t: &Tree) -> usize {
    (1..=t.len() as u32)
        .filter(|&v| match (t.left(v), t.right(v)) {
            (Some(a), Some(b)) => t.is_leaf(a) && t.is_leaf(b),
            _ => false,
        })
        .count()
}

/// Every internal vertex has two children and all leaves share one depth.
pub fn is_perfect(t: &Tree) -> bool {
    is_perfect_subtree(t, t.root)
}

/// Whether the subtree rooted at `v` is perfect.
pub fn is_perfect_subtree(t: &Tree, v: u32) -> bool {
    let mut leaf_depth = None;
    let mut stack = vec![(v, 0u32)];
    while let Some((u, d)) = stack.pop() {
        match (t.left(u), t.right(u)) {
            (None, None) => match leaf_depth {
                None => leaf_depth = Some(d),
                Some(ld) if ld != d => return false,
                _ => {}
            },
            (Some(a), Some(b)) => {
                stack.push((a, d + 1));
                stack.push((b, d + 1));
            }
            _ => return false,
        }
    }
    true
}

/// Reusable buffers for computing level statistics of many permutations.
pub struct LevelScratch {
    stack: Vec<u32>,
    left: Vec<u32>,
    right: Vec<u32>,
    level: Vec<u32>,
}

impl LevelScratch {
    pub fn new(n: usize) -> Self {
        Self {
            stack: Vec::with_capacity(n),
            left: vec![NONE; n + 1],
            right: vec![NONE; n + 1],
            level: vec![0; n + 1],
        }
    }

    /// Adds the level counts of `T(entries)` into `hist` and returns the
    /// number of vertices with two leaf children. `entries` must be a
    /// permutation of `1..=n` for the `n` given to `new`.
    pub fn accumulate(&mut self, entries: &[u32], hist: &mut [u64]) -> u64 {
        link_cartesian(entries, &mut self.stack, &mut self.left, &mut self.right);
        fill_levels(&self.left, &self.right, &mut self.level);
        let mut two_leaf = 0;
        for v in 1..self.left.len() {
            hist[self.level[v] as usize] += 1;
            let (l, r) = (self.left[v], self.right[v]);
            if l != NONE && r != NONE && self.level[l as usize] == 1 && self.level[r as usize] == 1 {
                two_leaf += 1;
            }
        }
        two_leaf
    }
}

/// Exact level counts `a_{n,k}` summed over all `n!` trees of size `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelTable {
    pub n: usize,
    /// `k -> a_{n,k}` for every `1 <= k <= n`, zeros included.
    pub counts: BTreeMap<usize, BigInt>,
    /// `d_n`: vertices having two leaf children, over all trees.
    pub two_leaf_parents: BigInt,
}

impl LevelTable {
    pub fn count(&self, k: usize) -> BigInt {
        self.counts.get(&k).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn total(&self) -> BigInt {
        self.counts.values().sum()
    }

    /// `{"n": .., "counts": {"k": "a_nk"}, "d_n": ".."}` with decimal strings.
    pub fn to_json(&self) -> serde_json::Value {
        let counts: serde_json::Map<String, serde_json::Value> = self
            .counts
            .iter()
            .map(|(k, v)| (k.to_string(), serde_json::Value::String(v.to_string())))
            .collect();
        serde_json::json!({
            "n": self.n,
            "counts": counts,
            "d_n": self.two_leaf_parents.to_string(),
        })
    }
}

/// Advances to the next permutation in lexicographic order; false after the
/// last one.
pub fn next_permutation(a: &mut [u32]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Calls `f` on every permutation of `1..=n`, split across threads by first
/// entry. Each worker folds into its own accumulator; the accumulators are
/// then merged in first-entry order.
pub fn par_fold_permutations<A, F, M>(n: usize, init: impl Fn() -> A + Sync, f: F, merge: M) -> A
where
    A: Send,
    F: Fn(&mut A, &[u32]) + Sync,
    M: Fn(A, A) -> A,
{
    if n == 0 {
        return init();
    }
    let parts: Vec<A> = (1..=n as u32)
        .into_par_iter()
        .map(|first| {
            let mut acc = init();
            let mut perm: Vec<u32> = std::iter::once(first)
                .chain((1..=n as u32).filter(|&v| v != first))
                .collect();
            loop {
                f(&mut acc, &perm);
                if !next_permutation(&mut perm[1..]) {
                    break;
                }
            }
            acc
        })
        .collect();
    let mut it = parts.into_iter();
    let first = it.next().expect("n >= 1");
    it.fold(first, merge)
}

pub fn enumerate_levels(n: usize) -> Result<LevelTable> {
    enumerate_levels_with_limit(n, DEFAULT_ENUMERATION_LIMIT)
}

pub fn enumerate_levels_with_limit(n: usize, limit: usize) -> Result<LevelTable> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if n > limit {
        return Err(Error::LimitExceeded { n, limit });
    }
    let (hist, d, _) = par_fold_permutations(
        n,
        || (vec![0u64; n + 1], 0u64, LevelScratch::new(n)),
        |(hist, d, scratch), perm| *d += scratch.accumulate(perm, hist),
        |(mut h1, d1, s), (h2, d2, _)| {
            h1.iter_mut().zip(&h2).for_each(|(a, b)| *a += b);
            (h1, d1 + d2, s)
        },
    );
    Ok(LevelTable {
        n,
        counts: (1..=n).map(|k| (k, BigInt::from(hist[k]))).collect(),
        two_leaf_parents: BigInt::from(d),
    })
}

/// Expected number of vertices that are not at level 1 or 2,
/// `(n*n! - a_{n,1} - a_{n,2}) / n!`.
pub fn protected_expectation(n: usize) -> Result<Rational> {
    protected_expectation_with_limit(n, DEFAULT_ENUMERATION_LIMIT)
}

pub fn protected_expectation_with_limit(n: usize, limit: usize) -> Result<Rational> {
    let table = enumerate_levels_with_limit(n, limit)?;
    let nf = factorial(n);
    let protected = BigInt::from(n) * &nf - table.count(1) - table.count(2);
    Ok(Rational::new(protected, nf))
}

/// Seed for trial `i`, derived from the master seed with a SplitMix64 step so
/// that results do not depend on how trials are scheduled.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(trial.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The permutation used for trial `trial` of a sampling run.
pub fn random_permutation(n: usize, master: u64, trial: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(master, trial));
    let mut perm: Vec<u32> = (1..=n as u32).collect();
    perm.shuffle(&mut rng);
    perm
}

/// Aggregate level histogram over `trials` uniformly random trees of size `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleResult {
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    /// `k -> number of sampled vertices at level k`, for `1 <= k <=` the
    /// highest level observed.
    pub counts: BTreeMap<usize, u64>,
}

impl SampleResult {
    pub fn vertices(&self) -> u64 {
        self.n as u64 * self.trials
    }

    pub fn frequency(&self, k: usize) -> Rational {
        let c = self.counts.get(&k).copied().unwrap_or(0);
        Rational::new(BigInt::from(c), BigInt::from(self.vertices()))
    }

    pub fn frequencies(&self) -> BTreeMap<usize, Rational> {
        self.counts.keys().map(|&k| (k, self.frequency(k))).collect()
    }
}

pub fn sample_levels(n: usize, trials: u64, seed: u64) -> Result<SampleResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let hist = (0..trials)
        .into_par_iter()
        .fold(
            || (vec![0u64; n + 1], LevelScratch::new(n)),
            |(mut hist, mut scratch), t| {
                let perm = random_permutation(n, seed, t);
                scratch.accumulate(&perm, &mut hist);
                (hist, scratch)
            },
        )
        .map(|(h, _)| h)
        .reduce(
            || vec![0u64; n + 1],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let top = hist.iter().rposition(|&c| c > 0).unwrap_or(1);
    Ok(SampleResult {
        n,
        trials,
        seed,
        counts: (1..=top).map(|k| (k, hist[k])).collect(),
    })
}

/// Number of trees among `trials` random permutations of length `n` that are
/// perfect.
pub fn sample_perfect_count(n: usize, trials: u64, seed: u64) -> u64 {
    (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let p = Permutation { entries: random_permutation(n, seed, t) };
            is_perfect(&build_tree(&p).expect("n >= 1"))
        })
        .count() as u64
}
