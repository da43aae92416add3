use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use surf_core::distributions::{self, MixtureSpec};
use surf_core::interp::{self, MassRule, NodeTable};
use surf_core::merge::{self, SurfConfig};
use surf_core::polynomial::PiecewiseEstimate;
use surf_core::samples::subsample;
use surf_core::SurfError;

fn to_py(e: SurfError) -> PyErr {
    match e {
        SurfError::Io(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// A piecewise polynomial density on the sample hull.
#[pyclass(name = "Estimate", module = "pysurf", frozen)]
struct PyEstimate {
    inner: PiecewiseEstimate,
}

#[pymethods]
impl PyEstimate {
    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    #[getter]
    fn hull(&self) -> (f64, f64) {
        self.inner.hull()
    }

    /// `(lo, hi, coeffs)` per piece; coefficients are in the local
    /// coordinate `t = (x - lo) / (hi - lo)`, lowest order first.
    fn pieces(&self) -> Vec<(f64, f64, Vec<f64>)> {
        self.inner
            .pieces()
            .iter()
            .map(|p| (p.lo, p.hi, p.local.coeffs().to_vec()))
            .collect()
    }

    fn total_mass(&self) -> f64 {
        self.inner.total_mass()
    }

    fn __call__(&self, x: f64) -> f64 {
        self.inner.eval(x)
    }

    fn eval_many(&self, xs: Vec<f64>) -> Vec<f64> {
        xs.into_iter().map(|x| self.inner.eval(x)).collect()
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: PiecewiseEstimate::from_json(text).map_err(to_py)?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.pieces().len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        let (lo, hi) = self.inner.hull();
        format!(
            "Estimate(degree={}, pieces={}, hull=({lo}, {hi}))",
            self.inner.degree(),
            self.inner.pieces().len()
        )
    }
}

/// A finite mixture of beta, Gaussian and gamma components.
#[pyclass(name = "Mixture", module = "pysurf", frozen)]
struct PyMixture {
    name: Option<String>,
    inner: MixtureSpec,
}

#[pymethods]
impl PyMixture {
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        Ok(Self {
            name: Some(name.to_string()),
            inner: distributions::builtin(name).map_err(to_py)?,
        })
    }

    /// A JSON list of components such as
    /// `[{"weight": 1, "family": "beta", "a": 2, "b": 5}]`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            name: None,
            inner: MixtureSpec::from_json(text).map_err(to_py)?,
        })
    }

    fn to_json(&self) -> PyResult<String> {
        self.inner.to_json().map_err(to_py)
    }

    #[pyo3(signature = (count, seed = 0))]
    fn sample(&self, py: Python<'_>, count: usize, seed: u64) -> PyResult<Vec<f64>> {
        py.detach(|| self.inner.sample(count, seed)).map_err(to_py)
    }

    fn pdf(&self, x: f64) -> f64 {
        self.inner.pdf(x)
    }

    fn cdf(&self, x: f64) -> f64 {
        self.inner.cdf(x)
    }

    fn mean(&self) -> f64 {
        self.inner.mean()
    }

    fn __len__(&self) -> usize {
        self.inner.components().len()
    }

    fn __repr__(&self) -> String {
        match &self.name {
            Some(n) => format!("Mixture.builtin({n:?})"),
            None => format!("Mixture({} components)", self.inner.components().len()),
        }
    }
}

/// Fit a piecewise polynomial density. With more than `n - 1` samples for
/// the largest power of two `n`, a seeded random subset is used.
#[pyfunction]
#[pyo3(signature = (
    samples, degree = 1, alpha = merge::DEFAULT_ALPHA, delta = merge::DEFAULT_DELTA,
    eps = None, raw_mass = false, halt_t = None, seed = 0, parallel = true
))]
#[allow(clippy::too_many_arguments)]
fn fit(
    py: Python<'_>,
    samples: Vec<f64>,
    degree: usize,
    alpha: f64,
    delta: f64,
    eps: Option<f64>,
    raw_mass: bool,
    halt_t: Option<usize>,
    seed: u64,
    parallel: bool,
) -> PyResult<PyEstimate> {
    let cfg = SurfConfig {
        alpha,
        delta,
        epsilon: eps,
        seed,
        parallel,
        halt_t,
        mass_rule: if raw_mass {
            MassRule::Raw
        } else {
            MassRule::AddOne
        },
        ..SurfConfig::new(degree)
    };
    let inner = py
        .detach(|| {
            cfg.validate()?;
            let s = subsample(&samples, seed)?;
            merge::surf(&s, &cfg)
        })
        .map_err(to_py)?;
    Ok(PyEstimate { inner })
}

/// ℓ1 distance between an estimate and a mixture, tails included.
#[pyfunction]
fn l1_error(py: Python<'_>, estimate: &PyEstimate, mixture: &PyMixture) -> PyResult<f64> {
    py.detach(|| distributions::l1_error(&estimate.inner, &mixture.inner))
        .map_err(to_py)
}

#[pyfunction]
fn builtin_names() -> Vec<&'static str> {
    distributions::builtin_names().to_vec()
}

/// `(degree, nodes, published ratio, recomputed ratio)` for degrees 0..=8.
#[pyfunction]
fn node_table() -> Vec<(usize, Vec<f64>, f64, f64)> {
    NodeTable::get()
        .entries()
        .iter()
        .enumerate()
        .map(|(d, e)| (d, e.partition.nodes().to_vec(), e.published, e.recomputed))
        .collect()
}

/// Search node partitions of degree `d`; returns `(nodes, ratio)`.
#[pyfunction]
#[pyo3(signature = (d, grid = 2001))]
fn optimize_nodes(py: Python<'_>, d: usize, grid: usize) -> PyResult<(Vec<f64>, f64)> {
    let p = py
        .detach(|| interp::optimize_nodes(d, grid))
        .map_err(to_py)?;
    let r = p.ratio().unwrap_or(f64::NAN);
    Ok((p.nodes().to_vec(), r))
}

#[pymodule]
fn pysurf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEstimate>()?;
    m.add_class::<PyMixture>()?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(l1_error, m)?)?;
    m.add_function(wrap_pyfunction!(builtin_names, m)?)?;
    m.add_function(wrap_pyfunction!(node_table, m)?)?;
    m.add_function(wrap_pyfunction!(optimize_nodes, m)?)?;
    m.add("MAX_DEGREE", interp::MAX_FIT_DEGREE)?;
    Ok(())
}
