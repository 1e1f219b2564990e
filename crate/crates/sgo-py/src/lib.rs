//! Python bindings. Matrices and divisors cross the boundary as the same
//! JSON documents the CLI reads.

use std::collections::BTreeMap;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use sgo_core::config::{ColoredDivisor, DivisorJson};
use sgo_core::io::{parse_json, parse_matrix, parse_point_or_matrix};
use sgo_core::laurent::with_precision_retry;
use sgo_core::loopmat::d_matrix;
use sgo_core::orbits::{classify as core_classify, semi_infinite_weight, OrbitPoint};
use sgo_core::superroots as roots;
use sgo_core::verify::{run_suite as core_run_suite, SuiteParams};
use sgo_core::zastava;

create_exception!(sgo, SgoError, PyException);
create_exception!(sgo, InsufficientPrecision, SgoError);

fn err(e: sgo_core::Error) -> PyErr {
    match e {
        sgo_core::Error::InsufficientPrecision => InsufficientPrecision::new_err(e.to_string()),
        _ => SgoError::new_err(e.to_string()),
    }
}

#[pyclass(name = "SuperWeight", module = "sgo", eq, frozen, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PySuperWeight(roots::SuperWeight);

#[pymethods]
impl PySuperWeight {
    #[new]
    #[pyo3(signature = (lam, theta, theta_prime=vec![]))]
    fn new(lam: Vec<i64>, theta: Vec<i64>, theta_prime: Vec<i64>) -> PyResult<Self> {
        roots::SuperWeight::from_parts(lam, theta, theta_prime).map(Self).map_err(err)
    }

    #[staticmethod]
    fn zero(m: usize, n: usize) -> PyResult<Self> {
        roots::check_rank(m, n).map_err(err)?;
        Ok(Self(roots::SuperWeight::zero(m, n)))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        parse_json(text).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0).expect("weights serialize")
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn lam(&self) -> Vec<i64> {
        self.0.lambda.clone()
    }

    #[getter]
    fn theta(&self) -> Vec<i64> {
        self.0.theta.clone()
    }

    #[getter]
    fn theta_prime(&self) -> Vec<i64> {
        self.0.theta_prime.clone()
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.0.add(&other.0).map(Self).map_err(err)
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.0.sub(&other.0).map(Self).map_err(err)
    }

    fn __neg__(&self) -> Self {
        Self(self.0.neg())
    }

    /// True when `other - self` is a nonnegative sum of simple roots.
    fn leq(&self, other: &Self) -> PyResult<bool> {
        roots::leq(&self.0, &other.0).map_err(err)
    }

    fn leq_g(&self, other: &Self) -> PyResult<bool> {
        roots::leq_g(&self.0, &other.0).map_err(err)
    }

    /// Coefficients of `self - other` in the simple roots, if integral.
    fn decompose(&self, other: &Self) -> PyResult<Option<PyRootVector>> {
        Ok(roots::decompose(&self.0, &other.0).map_err(err)?.map(PyRootVector))
    }

    fn is_relevant(&self) -> bool {
        roots::is_relevant(&self.0)
    }

    fn is_hw_dominant(&self) -> bool {
        roots::is_hw_dominant(&self.0)
    }

    fn is_orbit_index(&self) -> bool {
        roots::is_orbit_index(&self.0)
    }

    fn minor_profile(&self) -> PyResult<Vec<i64>> {
        zastava::minor_profile(&self.0).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("SuperWeight({:?}, {:?}, {:?})", self.0.lambda, self.0.theta, self.0.theta_prime)
    }
}

#[pyclass(name = "RootVector", module = "sgo", eq, frozen, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PyRootVector(roots::RootVector);

#[pymethods]
impl PyRootVector {
    #[new]
    fn new(m: usize, n: usize, coeffs: Vec<i64>) -> PyResult<Self> {
        roots::RootVector::new(m, n, coeffs).map(Self).map_err(err)
    }

    /// The simple root α_i, 1-based.
    #[staticmethod]
    fn simple(m: usize, n: usize, i: usize) -> PyResult<Self> {
        roots::check_rank(m, n).map_err(err)?;
        if i == 0 || i >= m + n {
            return Err(PyValueError::new_err(format!("simple root index must lie in 1..{}", m + n - 1)));
        }
        Ok(Self(roots::RootVector::simple(m, n, i)))
    }

    #[getter]
    fn coeffs(&self) -> Vec<i64> {
        self.0.coeffs.clone()
    }

    fn to_weight(&self) -> PySuperWeight {
        PySuperWeight(self.0.to_weight())
    }

    fn is_nonnegative(&self) -> bool {
        self.0.is_nonnegative()
    }

    fn zastava_dim(&self) -> PyResult<i64> {
        zastava::zastava_dim(&self.0).map_err(err)
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        if (self.0.m, self.0.n) != (other.0.m, other.0.n) {
            return Err(err(sgo_core::Error::RankMismatch));
        }
        Ok(Self(self.0.add(&other.0)))
    }

    fn __repr__(&self) -> String {
        format!("RootVector({}, {}, {:?})", self.0.m, self.0.n, self.0.coeffs)
    }
}

#[pyfunction]
fn orbit_weights(m: usize, n: usize, box_bound: i64) -> PyResult<Vec<PySuperWeight>> {
    Ok(roots::orbit_weights(m, n, box_bound).map_err(err)?.into_iter().map(PySuperWeight).collect())
}

/// Orbit index of a single 𝔾𝕣_N matrix given as matrix JSON.
#[pyfunction]
#[pyo3(signature = (matrix_json, m, n, precision=24))]
fn classify(py: Python<'_>, matrix_json: &str, m: usize, n: usize, precision: i64) -> PyResult<PySuperWeight> {
    let a = parse_matrix(matrix_json).map_err(err)?;
    let w = py.detach(|| with_precision_retry(precision, |p| core_classify(&a.truncate(p), m, n)));
    w.map(PySuperWeight).map_err(err)
}

/// Semi-infinite orbit of a point `{"grM": …, "grN": …}`, or of a bare
/// matrix read as the given component.
#[pyfunction]
#[pyo3(signature = (point_json, m, n, component="grN"))]
fn semi_infinite(point_json: &str, m: usize, n: usize, component: &str) -> PyResult<PySuperWeight> {
    let p = match parse_point_or_matrix(point_json).map_err(err)? {
        Ok(p) => p,
        Err(a) => match component {
            "grN" => OrbitPoint { gr_m: None, gr_n: a },
            "grM" => OrbitPoint { gr_m: Some(a), gr_n: d_matrix(m, n) },
            other => return Err(PyValueError::new_err(format!("component must be grM or grN, got {other:?}"))),
        },
    };
    semi_infinite_weight(&p, m, n).map(PySuperWeight).map_err(err)
}

/// `(zastava_dim, bound, witnesses)` for `w_s ≤ w_o`.
#[pyfunction]
fn intersection_dim_bound(w_o: &PySuperWeight, w_s: &PySuperWeight) -> PyResult<(i64, i64, Vec<PySuperWeight>)> {
    let r = zastava::intersection_dim_bound(&w_o.0, &w_s.0).map_err(err)?;
    Ok((r.zastava_dim, r.bound, r.witnesses.into_iter().map(PySuperWeight).collect()))
}

#[pyfunction]
fn closure_predicate(w: &PySuperWeight, w_tilde: &PySuperWeight) -> PyResult<bool> {
    zastava::closure_predicate(&w.0, &w_tilde.0).map_err(err)
}

#[pyfunction]
fn line_bundle_exponents(divisor_json: &str) -> PyResult<BTreeMap<String, i64>> {
    let d = ColoredDivisor::from_json(parse_json::<DivisorJson>(divisor_json).map_err(err)?).map_err(err)?;
    Ok(d.line_bundle_exponents())
}

/// Runs a verification suite and returns its report as JSON.
#[pyfunction]
#[pyo3(signature = (name, m, n, box_bound=2, samples=50, seed=0, precision=24, pole_bound=2, failure_cap=20))]
#[allow(clippy::too_many_arguments)]
fn run_suite(
    py: Python<'_>,
    name: &str,
    m: usize,
    n: usize,
    box_bound: i64,
    samples: usize,
    seed: u64,
    precision: i64,
    pole_bound: i64,
    failure_cap: usize,
) -> PyResult<String> {
    let params = SuiteParams { box_bound, samples, seed, precision, pole_bound, failure_cap, ..SuiteParams::new(m, n) };
    let report = py.detach(|| core_run_suite(name, &params)).map_err(err)?;
    Ok(serde_json::to_string(&report).expect("reports serialize"))
}

#[pymodule]
fn sgo(py: Python<'_>, module: &Bound<'_, PyModule>) -> PyResult<()> {
    module.add_class::<PySuperWeight>()?;
    module.add_class::<PyRootVector>()?;
    module.add("SgoError", py.get_type::<SgoError>())?;
    module.add("InsufficientPrecision", py.get_type::<InsufficientPrecision>())?;
    for f in [
        wrap_pyfunction!(orbit_weights, module)?,
        wrap_pyfunction!(classify, module)?,
        wrap_pyfunction!(semi_infinite, module)?,
        wrap_pyfunction!(intersection_dim_bound, module)?,
        wrap_pyfunction!(closure_predicate, module)?,
        wrap_pyfunction!(line_bundle_exponents, module)?,
        wrap_pyfunction!(run_suite, module)?,
    ] {
        module.add_function(f)?;
    }
    Ok(())
}
