//! Python bindings for networks, the approximation pipeline and the planner.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use relu_forge::approximator::{self, BuildOptions, Norm, SamplePlan};
use relu_forge::constructions;
use relu_forge::fixtures::zoo_with_dim;
use relu_forge::fnn_core;
use relu_forge::planner::{self, CostQuery};
use relu_forge::ForgeError;

fn py_err(e: ForgeError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A feed-forward ReLU network.
#[pyclass(name = "ReluNetwork", module = "relu_forge", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyNetwork {
    inner: fnn_core::ReluNetwork,
}

#[pymethods]
impl PyNetwork {
    /// Parses a network document.
    #[staticmethod]
    fn from_json(doc: &str) -> PyResult<Self> {
        Ok(Self { inner: fnn_core::deserialize(doc.as_bytes()).map_err(py_err)? })
    }

    fn to_json(&self) -> String {
        String::from_utf8(fnn_core::serialize(&self.inner)).expect("documents are UTF-8")
    }

    fn evaluate(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.evaluate(&x).map_err(py_err)
    }

    /// Evaluates a scalar network at each row.
    fn evaluate_many(&self, xs: Vec<Vec<f64>>) -> PyResult<Vec<f64>> {
        xs.iter().map(|x| self.inner.evaluate_scalar(x).map_err(py_err)).collect()
    }

    #[getter]
    fn input_dim(&self) -> usize {
        self.inner.input_dim()
    }

    #[getter]
    fn output_dim(&self) -> usize {
        self.inner.output_dim()
    }

    #[getter]
    fn depth(&self) -> usize {
        self.inner.depth()
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn hidden_widths(&self) -> Vec<usize> {
        self.inner.hidden_widths()
    }

    #[getter]
    fn metadata(&self) -> BTreeMap<String, String> {
        self.inner.metadata().clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "ReluNetwork(input_dim={}, depth={}, width={})",
            self.inner.input_dim(),
            self.inner.depth(),
            self.inner.width()
        )
    }
}

/// A network with the parameters and bounds of its construction.
#[pyclass(name = "Approximant", module = "relu_forge", frozen)]
struct PyApproximant {
    inner: approximator::Approximant,
}

#[pymethods]
impl PyApproximant {
    #[getter]
    fn network(&self) -> PyNetwork {
        PyNetwork { inner: self.inner.network.clone() }
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn l(&self) -> usize {
        self.inner.l
    }

    #[getter]
    fn d(&self) -> usize {
        self.inner.d
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.inner.delta
    }

    #[getter]
    fn bound_outside_trifling(&self) -> f64 {
        self.inner.bound_outside_trifling
    }

    #[getter]
    fn bound_global(&self) -> f64 {
        self.inner.bound_global
    }

    #[getter]
    fn uniform(&self) -> bool {
        self.inner.uniform
    }

    fn __repr__(&self) -> String {
        format!(
            "Approximant(N={}, L={}, d={}, K={}, bound_global={})",
            self.inner.n, self.inner.l, self.inner.d, self.inner.k, self.inner.bound_global
        )
    }
}

/// Builds the approximant of a named fixture.
#[pyfunction]
#[pyo3(signature = (target, n, l, norm = "2", uniform = false, d = None))]
fn build_approximant(
    target: &str,
    n: usize,
    l: usize,
    norm: &str,
    uniform: bool,
    d: Option<usize>,
) -> PyResult<PyApproximant> {
    let f = zoo_with_dim(target, d).map_err(py_err)?;
    let norm: Norm = norm.parse().map_err(py_err)?;
    let opts = BuildOptions::from_env().map_err(py_err)?;
    let inner = approximator::build_approximant_with(&f, n, l, norm, uniform, &opts).map_err(py_err)?;
    Ok(PyApproximant { inner })
}

/// Measures an approximant against a named fixture; returns a dict of the report fields.
#[pyfunction]
#[pyo3(signature = (approx, target, samples = None, seed = 0))]
fn certify(
    py: Python<'_>,
    approx: &PyApproximant,
    target: &str,
    samples: Option<usize>,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let a = &approx.inner;
    let f = zoo_with_dim(target, Some(a.d)).map_err(py_err)?;
    let plan = match (samples, a.d) {
        (None, d) => SamplePlan::default_for(d, seed),
        (Some(s), 1) => SamplePlan::Grid { per_dim: s },
        (Some(s), _) => SamplePlan::MonteCarlo { count: s, seed },
    };
    let r = py.detach(|| approximator::certify(a, &f, plan)).map_err(py_err)?;
    let out = pyo3::types::PyDict::new(py);
    out.set_item("measured_outside_trifling", r.measured_outside_trifling)?;
    out.set_item("measured_global", r.measured_global)?;
    out.set_item("bound_outside_trifling", r.bound_outside_trifling)?;
    out.set_item("bound_global", r.bound_global)?;
    out.set_item("samples", r.samples)?;
    out.set_item("pass", r.pass)?;
    Ok(out.into_any().unbind())
}

/// Staircase network with `K = ⌊N^{1/d}⌋²⌊L^{2/d}⌋` plateaus.
#[pyfunction]
fn step_function_net(n: usize, l: usize, d: usize, delta: f64) -> PyResult<PyNetwork> {
    Ok(PyNetwork { inner: constructions::step_function_net(n, l, d, delta).map_err(py_err)? })
}

/// Width-7 network returning the sum of the first `ℓ` of `L` encoded bits.
#[pyfunction]
fn bit_extract_net(l: usize) -> PyResult<PyNetwork> {
    Ok(PyNetwork { inner: constructions::bit_extract_net(l).map_err(py_err)? })
}

/// One-hidden-layer network of a continuous piecewise-linear function, constant outside.
#[pyfunction]
fn compile_cpwl(breakpoints: Vec<f64>, values: Vec<f64>) -> PyResult<PyNetwork> {
    let f = fnn_core::CpwlFunction::new(breakpoints, values).map_err(py_err)?;
    Ok(PyNetwork { inner: fnn_core::compile_cpwl(&f) })
}

#[pyfunction]
fn gadget_mid3() -> PyNetwork {
    PyNetwork { inner: fnn_core::gadget_mid3() }
}

/// Time of one training iteration for width `N`, depth `L` on `p` cores.
#[pyfunction]
fn cost(n: f64, l: f64, p: f64) -> f64 {
    planner::cost(n, l, p)
}

/// Returns `(N_opt, L_opt, regime, predicted_cost)`.
#[pyfunction]
fn plan(epsilon: f64, alpha: f64, d: usize, p: f64) -> PyResult<(u64, u64, String, f64)> {
    let q = CostQuery::new(epsilon, alpha, d, p).map_err(py_err)?;
    let r = planner::plan(&q).map_err(py_err)?;
    Ok((r.n_opt, r.l_opt, r.regime.to_string(), r.predicted_cost))
}

#[pymodule]
#[pyo3(name = "relu_forge")]
fn relu_forge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNetwork>()?;
    m.add_class::<PyApproximant>()?;
    m.add_function(wrap_pyfunction!(build_approximant, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(step_function_net, m)?)?;
    m.add_function(wrap_pyfunction!(bit_extract_net, m)?)?;
    m.add_function(wrap_pyfunction!(compile_cpwl, m)?)?;
    m.add_function(wrap_pyfunction!(gadget_mid3, m)?)?;
    m.add_function(wrap_pyfunction!(cost, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    Ok(())
}
