//! Exact generating functions for the levels of vertices in random binary
//! search trees, with brute-force and Monte Carlo cross-checks.
//!
//! - [`pl`]: the expression algebra `Σ a (1-x)^b ln(1/(1-x))^c`
//! - [`series`]: truncated power series and coefficient extraction
//! - [`tree`]: trees of permutations, enumeration and sampling
//! - [`level_gf`]: `B_k`, `A_k`, the constants `c_k` and the perfect-tree bounds

pub mod cli;
pub mod error;
pub mod level_gf;
pub mod pl;
pub mod rational;
pub mod series;
pub mod tree;

pub use error::{Error, Result};
pub use level_gf::{GFBundle, GfCache};
pub use pl::{PLExpr, PLTerm};
pub use rational::Rational;
pub use series::Series;
pub use tree::{LevelTable, Permutation, SampleResult, Tree};
