//! Python bindings for `bstlevels`.
//!
//! Exact rationals cross the boundary as `fractions.Fraction`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use bstlevels::level_gf;
use bstlevels::series::expand;
use bstlevels::tree::{self, DEFAULT_ENUMERATION_LIMIT};
use bstlevels::{Error, PLExpr, Permutation, Rational};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    let cls = py.import("fractions")?.getattr("Fraction")?;
    cls.call1((r.numer().clone(), r.denom().clone()))
}

fn rational(value: &Bound<'_, PyAny>) -> PyResult<Rational> {
    if let Ok(s) = value.extract::<String>() {
        return bstlevels::rational::parse_rational(&s).map_err(err);
    }
    if let Ok(n) = value.extract::<BigInt>() {
        return Ok(Rational::from_integer(n));
    }
    let num: BigInt = value.getattr("numerator")?.extract()?;
    let den: BigInt = value.getattr("denominator")?.extract()?;
    if den == BigInt::from(0) {
        return Err(PyValueError::new_err("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

fn permutation(entries: Vec<u32>) -> PyResult<Permutation> {
    Permutation::new(entries).map_err(err)
}

/// Sum of terms `a * (1-x)^b * L^c` with `L = ln(1/(1-x))`.
#[pyclass(name = "PLExpr", module = "pybstlevels", eq, frozen, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyPLExpr(PLExpr);

#[pymethods]
impl PyPLExpr {
    #[new]
    #[pyo3(signature = (text = "0"))]
    fn new(text: &str) -> PyResult<Self> {
        PLExpr::parse(text).map(Self).map_err(err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Self::new(text)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        PLExpr::from_json(text).map(Self).map_err(err)
    }

    #[staticmethod]
    fn monomial(a: &Bound<'_, PyAny>, b: i64, c: u32) -> PyResult<Self> {
        Ok(Self(PLExpr::monomial(rational(a)?, b, c)))
    }

    #[staticmethod]
    fn x() -> Self {
        Self(PLExpr::x())
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    /// `[(a, b, c), ...]` in ascending `(b, c)` order.
    fn terms<'py>(&self, py: Python<'py>) -> PyResult<Vec<(Bound<'py, PyAny>, i64, u32)>> {
        self.0.iter().map(|((b, c), a)| Ok((fraction(py, a)?, b, c))).collect()
    }

    fn coeff<'py>(&self, py: Python<'py>, b: i64, c: u32) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.coeff(b, c))
    }

    fn is_pl(&self) -> bool {
        self.0.is_pl()
    }

    fn differentiate(&self) -> Self {
        Self(self.0.differentiate())
    }

    fn integrate(&self) -> Self {
        Self(self.0.integrate())
    }

    fn value_at_zero<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.0.value_at_zero())
    }

    /// Exact coefficients of `x^0 ..= x^order`.
    fn series<'py>(&self, py: Python<'py>, order: usize) -> PyResult<Vec<Bound<'py, PyAny>>> {
        expand(&self.0, order).coeffs().iter().map(|r| fraction(py, r)).collect()
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    fn __neg__(&self) -> Self {
        Self(-&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("PLExpr('{}')", self.0)
    }
}

fn level_expr(kind: &str, k: usize) -> PyResult<PyPLExpr> {
    let e = match kind {
        "B" => level_gf::compute_b(k),
        "Bprime" => level_gf::compute_b_prime(k),
        "A" => level_gf::compute_a(k),
        _ => return Err(PyValueError::new_err(format!("unknown kind {kind:?}, expected B, Bprime or A"))),
    };
    e.map(PyPLExpr).map_err(err)
}

#[pyfunction]
fn compute_b(k: usize) -> PyResult<PyPLExpr> {
    level_expr("B", k)
}

#[pyfunction]
fn compute_b_prime(k: usize) -> PyResult<PyPLExpr> {
    level_expr("Bprime", k)
}

#[pyfunction]
fn compute_a(k: usize) -> PyResult<PyPLExpr> {
    level_expr("A", k)
}

#[pyfunction]
fn extract_ck(py: Python<'_>, k: usize) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &level_gf::extract_ck(k).map_err(err)?)
}

/// `[x^n] A_k`, the mean number of level-`k` vertices in a tree of size `n`.
#[pyfunction]
fn expected_level_count(py: Python<'_>, k: usize, n: usize) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &level_gf::expected_level_count(k, n).map_err(err)?)
}

#[pyfunction]
fn qk(py: Python<'_>, k: usize) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &level_gf::qk(k).map_err(err)?)
}

#[pyfunction]
fn pk(py: Python<'_>, k: usize) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &level_gf::pk(k).map_err(err)?)
}

#[pyfunction]
fn gamma_k(py: Python<'_>, k: usize) -> PyResult<Bound<'_, PyAny>> {
    fraction(py, &level_gf::gamma_k(k).map_err(err)?)
}

/// Max-rooted tree of a permutation, as `(root, {label: (left, right)})` with
/// `None` for a missing child.
#[pyfunction]
fn build_tree(entries: Vec<u32>) -> PyResult<(u32, BTreeMap<u32, (Option<u32>, Option<u32>)>)> {
    let t = tree::build_tree(&permutation(entries)?).map_err(err)?;
    let nodes = (1..=t.len() as u32).map(|v| (v, (t.left(v), t.right(v)))).collect();
    Ok((t.root(), nodes))
}

/// `{label: level}` for the tree of a permutation.
#[pyfunction]
fn levels(entries: Vec<u32>) -> PyResult<BTreeMap<u32, u32>> {
    let t = tree::build_tree(&permutation(entries)?).map_err(err)?;
    Ok(tree::levels(&t))
}

/// Exact totals over all `n!` permutations: `{"n", "counts": {k: a_nk}, "d_n"}`.
#[pyfunction]
#[pyo3(signature = (n, limit = DEFAULT_ENUMERATION_LIMIT))]
fn enumerate_levels(py: Python<'_>, n: usize, limit: usize) -> PyResult<Bound<'_, PyDict>> {
    let table = py
        .detach(|| tree::enumerate_levels_with_limit(n, limit))
        .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("n", table.n)?;
    out.set_item("counts", table.counts)?;
    out.set_item("d_n", table.two_leaf_parents)?;
    Ok(out)
}

/// Level histogram over `trials` seeded random trees: `{k: count}`.
#[pyfunction]
fn sample_levels(py: Python<'_>, n: usize, trials: u64, seed: u64) -> PyResult<BTreeMap<usize, u64>> {
    let result = py.detach(|| tree::sample_levels(n, trials, seed)).map_err(err)?;
    Ok(result.counts)
}

#[pymodule]
fn pybstlevels(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPLExpr>()?;
    m.add_function(wrap_pyfunction!(compute_b, m)?)?;
    m.add_function(wrap_pyfunction!(compute_b_prime, m)?)?;
    m.add_function(wrap_pyfunction!(compute_a, m)?)?;
    m.add_function(wrap_pyfunction!(extract_ck, m)?)?;
    m.add_function(wrap_pyfunction!(expected_level_count, m)?)?;
    m.add_function(wrap_pyfunction!(qk, m)?)?;
    m.add_function(wrap_pyfunction!(pk, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_k, m)?)?;
    m.add_function(wrap_pyfunction!(build_tree, m)?)?;
    m.add_function(wrap_pyfunction!(levels, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_levels, m)?)?;
    m.add_function(wrap_pyfunction!(sample_levels, m)?)?;
    Ok(())
}
