//! Python bindings. Reports cross the boundary as JSON-compatible dicts.

use infconvex::checkers::{self, SampleOptions};
use infconvex::funcparse::resolve_function;
use infconvex::search::{self, SearchOptions};
use infconvex::{
    BoundedSequence, ConvexDomain, ConvexityParams, DiscreteDistribution, ScalarFunction,
    WeightSequence,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyModule;
use serde::Serialize;

fn err(e: infconvex::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_json<T: serde::de::DeserializeOwned>(text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Weight sequence in the class Λ.
#[pyclass(
    name = "WeightSequence",
    module = "infconvex",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
pub struct PyWeights(pub WeightSequence);

#[pymethods]
impl PyWeights {
    /// λₙ = (1 − r)·r^(n−1)
    #[staticmethod]
    fn geometric(ratio: f64) -> PyResult<Self> {
        WeightSequence::geometric(ratio).map(Self).map_err(err)
    }

    #[staticmethod]
    fn explicit_prefix(prefix: Vec<f64>, ratio: f64) -> PyResult<Self> {
        WeightSequence::explicit_prefix(prefix, ratio)
            .map(Self)
            .map_err(err)
    }

    /// λₙ = n^(−p)/ζ(p)
    #[staticmethod]
    fn zeta_like(exponent: f64) -> PyResult<Self> {
        WeightSequence::zeta_like(exponent).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        from_json(text).map(Self)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn weight_at(&self, n: usize) -> PyResult<f64> {
        self.0.weight_at(n).map_err(err)
    }

    fn tail_mass(&self, n: usize) -> PyResult<f64> {
        self.0.tail_mass(n).map_err(err)
    }

    fn partial_sum(&self, n: usize) -> PyResult<f64> {
        self.0.partial_sum(n).map_err(err)
    }

    #[getter]
    fn first(&self) -> f64 {
        self.0.first()
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.0.family()
    }

    fn default_depth(&self) -> usize {
        self.0.default_depth()
    }

    fn __repr__(&self) -> String {
        format!("WeightSequence({})", self.to_json().unwrap_or_default())
    }
}

#[pyclass(name = "Domain", module = "infconvex", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyDomain(pub ConvexDomain);

#[pymethods]
impl PyDomain {
    #[staticmethod]
    fn interval(lower: f64, upper: f64) -> PyResult<Self> {
        ConvexDomain::interval(lower, upper).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(name = "box")]
    fn boxed(lower: Vec<f64>, upper: Vec<f64>) -> PyResult<Self> {
        ConvexDomain::boxed(lower, upper).map(Self).map_err(err)
    }

    #[staticmethod]
    fn ball(center: Vec<f64>, radius: f64) -> PyResult<Self> {
        ConvexDomain::ball(center, radius).map(Self).map_err(err)
    }

    #[staticmethod]
    fn whole_space(dimension: usize) -> PyResult<Self> {
        ConvexDomain::whole_space(dimension).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        from_json(text).map(Self)
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.0.dimension()
    }

    #[pyo3(signature = (x, tol = 1e-9))]
    fn contains(&self, x: Vec<f64>, tol: f64) -> PyResult<bool> {
        self.0.contains(&x, tol).map_err(err)
    }
}

#[pyclass(name = "Sequence", module = "infconvex", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PySequence(pub BoundedSequence);

#[pymethods]
impl PySequence {
    #[staticmethod]
    fn finite_support(points: Vec<Vec<f64>>, fill: Vec<f64>) -> PyResult<Self> {
        BoundedSequence::finite_support(points, fill)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn periodic(points: Vec<Vec<f64>>) -> PyResult<Self> {
        BoundedSequence::periodic(points).map(Self).map_err(err)
    }

    #[staticmethod]
    fn constant(point: Vec<f64>) -> PyResult<Self> {
        BoundedSequence::constant(point).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        from_json(text).map(Self)
    }

    /// The i-th term, 1-based.
    fn point(&self, i: usize) -> PyResult<Vec<f64>> {
        if i == 0 {
            return Err(PyValueError::new_err("sequence indices start at 1"));
        }
        Ok(self.0.point(i).to_vec())
    }

    #[getter]
    fn bound(&self) -> f64 {
        self.0.bound()
    }
}

#[pyclass(name = "Function", module = "infconvex", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyFunction(pub ScalarFunction);

#[pymethods]
impl PyFunction {
    /// Expression text in x1..xd, or `builtin:<name>`.
    #[new]
    #[pyo3(signature = (source, arity = 1))]
    fn new(source: &str, arity: usize) -> PyResult<Self> {
        resolve_function(source, arity).map(Self).map_err(err)
    }

    fn __call__(&self, x: Vec<f64>) -> PyResult<f64> {
        self.0
            .eval(&x)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    #[getter]
    fn arity(&self) -> usize {
        self.0.arity()
    }

    fn pretty(&self) -> String {
        self.0.pretty()
    }

    #[getter]
    fn known_convex(&self) -> bool {
        self.0.is_known_convex()
    }
}

#[pyfunction]
#[pyo3(signature = (f, domain, t, samples = 1000, tol = 1e-9, seed = 0))]
fn check_t<'py>(
    py: Python<'py>,
    f: &PyFunction,
    domain: &PyDomain,
    t: f64,
    samples: usize,
    tol: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = SampleOptions { samples, tol, seed };
    let v = checkers::check_t_convexity(&f.0, &domain.0, t, opts).map_err(err)?;
    to_py(py, &v)
}

#[pyfunction]
#[pyo3(signature = (f, domain, t, s, samples = 1000, tol = 1e-9, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn check_ts<'py>(
    py: Python<'py>,
    f: &PyFunction,
    domain: &PyDomain,
    t: f64,
    s: f64,
    samples: usize,
    tol: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let params = ConvexityParams::new(t, s).map_err(err)?;
    let opts = SampleOptions { samples, tol, seed };
    let v = checkers::check_ts_convexity(&f.0, &domain.0, params, opts).map_err(err)?;
    to_py(py, &v)
}

/// `atoms` is a list of `(point, probability)` pairs.
#[pyfunction]
#[pyo3(signature = (f, domain, atoms, tol = 1e-9))]
fn jensen<'py>(
    py: Python<'py>,
    f: &PyFunction,
    domain: &PyDomain,
    atoms: Vec<(Vec<f64>, f64)>,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let dist = DiscreteDistribution::new(atoms).map_err(err)?;
    let v = checkers::check_jensen_discrete(&f.0, &domain.0, &dist, tol).map_err(err)?;
    to_py(py, &v)
}

#[pyfunction]
#[pyo3(signature = (f, domain, lam, mu, seq, depth = None, tol = 1e-9))]
#[allow(clippy::too_many_arguments)]
fn check_inf<'py>(
    py: Python<'py>,
    f: &PyFunction,
    domain: &PyDomain,
    lam: &PyWeights,
    mu: &PyWeights,
    seq: &PySequence,
    depth: Option<usize>,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let depth = depth.unwrap_or_else(|| lam.0.default_depth());
    let r =
        checkers::infinite_combination_report(&f.0, &domain.0, &lam.0, &mu.0, &seq.0, depth, tol)
            .map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (f, a, b, lam, seq, depth = None, tol = 1e-9))]
#[allow(clippy::too_many_arguments)]
fn bracket<'py>(
    py: Python<'py>,
    f: &PyFunction,
    a: f64,
    b: f64,
    lam: &PyWeights,
    seq: &PySequence,
    depth: Option<usize>,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let depth = depth.unwrap_or_else(|| lam.0.default_depth());
    let r = checkers::pavic_bracket(&f.0, a, b, &lam.0, &seq.0, depth, tol).map_err(err)?;
    to_py(py, &r)
}

#[pyfunction]
#[pyo3(signature = (lam, t, depth = 40, denominator_bound = 4096))]
fn expand<'py>(
    py: Python<'py>,
    lam: &PyWeights,
    t: f64,
    depth: usize,
    denominator_bound: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let e =
        infconvex::expansion::lambda_expand(&lam.0, t, depth, denominator_bound).map_err(err)?;
    to_py(py, &e)
}

/// Returns the witness dict, or None.
#[pyfunction]
#[pyo3(signature = (f, domain, lam, mu, support = 1, budget = 10_000, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn hunt<'py>(
    py: Python<'py>,
    f: &PyFunction,
    domain: &PyDomain,
    lam: &PyWeights,
    mu: &PyWeights,
    support: usize,
    budget: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = SearchOptions {
        support_size: support,
        budget,
        seed,
        ..SearchOptions::default()
    };
    let w =
        search::find_counterexample(&f.0, &domain.0, &lam.0, &mu.0, opts, |_| {}).map_err(err)?;
    to_py(py, &w)
}

#[pyfunction]
fn exp_condition(lambda1: f64, mu1: f64) -> PyResult<bool> {
    search::exp_condition(lambda1, mu1).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (mu_ratio = 2.0 / 3.0, lambda_ratio = 0.5))]
fn remark_demo(py: Python<'_>, mu_ratio: f64, lambda_ratio: f64) -> PyResult<Bound<'_, PyAny>> {
    let r = infconvex::cli::remark_demo(lambda_ratio, mu_ratio).map_err(err)?;
    to_py(py, &r)
}

#[pymodule(name = "infconvex")]
pub fn infconvex_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyWeights>()?;
    m.add_class::<PyDomain>()?;
    m.add_class::<PySequence>()?;
    m.add_class::<PyFunction>()?;
    m.add_function(wrap_pyfunction!(check_t, m)?)?;
    m.add_function(wrap_pyfunction!(check_ts, m)?)?;
    m.add_function(wrap_pyfunction!(jensen, m)?)?;
    m.add_function(wrap_pyfunction!(check_inf, m)?)?;
    m.add_function(wrap_pyfunction!(bracket, m)?)?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(hunt, m)?)?;
    m.add_function(wrap_pyfunction!(exp_condition, m)?)?;
    m.add_function(wrap_pyfunction!(remark_demo, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
