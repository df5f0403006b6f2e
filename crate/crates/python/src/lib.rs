//! Python bindings: partitions, generator functions, depths, bounds and
//! Fisher information of small qubit states.

use fdepth_core::bounds;
use fdepth_core::classify::{self, Ensemble};
use fdepth_core::genfun::{self, parse_genfun};
use fdepth_core::partition::{self, enumerate_partitions};
use fdepth_core::qstate::{self, Certificate, CollectiveOp, StateSpec};
use fdepth_core::verify::{self, SuiteName, VerifyConfig};
use fdepth_core::{Direction, GraphFormat, HasseGraph, OrderKind};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn err(e: fdepth_core::Error) -> PyErr {
    match e {
        fdepth_core::Error::Json(e) => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Converts any serializable report into plain Python objects.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "Partition", module = "fdepth", frozen, eq, hash, ord, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct PyPartition(partition::Partition);

#[pymethods]
impl PyPartition {
    #[new]
    fn new(parts: Vec<u32>) -> PyResult<Self> {
        partition::Partition::new(parts).map(Self).map_err(err)
    }

    #[staticmethod]
    fn top(n: u32) -> Self {
        Self(partition::Partition::top(n))
    }

    #[staticmethod]
    fn bottom(n: u32) -> Self {
        Self(partition::Partition::bottom(n))
    }

    #[getter]
    fn parts(&self) -> Vec<u32> {
        self.0.parts().to_vec()
    }

    #[getter]
    fn n(&self) -> u32 {
        self.0.n()
    }

    fn height(&self) -> u32 {
        self.0.height()
    }

    fn width(&self) -> u32 {
        self.0.width()
    }

    fn rank(&self) -> i64 {
        self.0.rank()
    }

    fn toughness(&self) -> u32 {
        self.0.toughness()
    }

    fn squareability(&self) -> u64 {
        self.0.squareability()
    }

    fn conjugate(&self) -> Self {
        Self(self.0.conjugate())
    }

    /// True when `self` is a refinement of `other`.
    fn refines(&self, other: &Self) -> PyResult<bool> {
        partition::refines(&self.0, &other.0).map_err(err)
    }

    /// True when `self` is majorized by `other`.
    fn dominated_by(&self, other: &Self) -> PyResult<bool> {
        partition::dominated_by(&self.0, &other.0).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.parts().len()
    }

    fn __repr__(&self) -> String {
        format!("Partition({:?})", self.0.parts())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

#[pyclass(name = "GenFun", module = "fdepth", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGenFun(genfun::GenFun);

#[pymethods]
impl PyGenFun {
    /// Parses a spec such as `"width"`, `"s_q:q=2"` or `"compose:neglog2:s_q:q=2"`.
    #[new]
    #[pyo3(signature = (spec, unchecked = false))]
    fn new(spec: &str, unchecked: bool) -> PyResult<Self> {
        parse_genfun(spec, !unchecked).map(Self).map_err(err)
    }

    fn __call__(&self, xi: &PyPartition) -> f64 {
        self.0.evaluate(&xi.0)
    }

    /// `"increasing"` or `"decreasing"` along refinement toward the top.
    #[getter]
    fn direction(&self) -> &'static str {
        match self.0.direction() {
            Direction::Increasing => "increasing",
            Direction::Decreasing => "decreasing",
        }
    }

    #[getter]
    fn dominance_monotone(&self) -> bool {
        self.0.dominance_monotone()
    }

    fn value_range(&self, n: u32) -> PyResult<Vec<f64>> {
        genfun::value_range(&self.0, n).map_err(err)
    }

    fn level_classes(&self, n: u32) -> PyResult<Vec<(f64, Vec<PyPartition>)>> {
        let classes = genfun::level_classes(&self.0, n).map_err(err)?;
        Ok(classes.into_iter().map(|(k, ps)| (k, ps.into_iter().map(PyPartition).collect())).collect())
    }

    fn __repr__(&self) -> String {
        format!("GenFun({:?})", self.0.spec())
    }

    fn __str__(&self) -> String {
        self.0.spec()
    }
}

#[pyclass(name = "Ensemble", module = "fdepth", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyEnsemble(Ensemble);

#[pymethods]
impl PyEnsemble {
    /// Builds from `(weight, partition)` pairs; weights must sum to one.
    #[new]
    fn new(members: Vec<(f64, PyPartition)>) -> PyResult<Self> {
        Ensemble::from_pairs(members.into_iter().map(|(p, x)| (p, x.0))).map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ensemble::from_json(text).map(Self).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        self.0.to_json().map_err(err)
    }

    #[getter]
    fn n(&self) -> u32 {
        self.0.n()
    }

    #[getter]
    fn members(&self) -> Vec<(f64, PyPartition)> {
        self.0.members().iter().map(|m| (m.p, PyPartition(m.parts.clone()))).collect()
    }

    /// Depth certified by the decomposition.
    fn depth(&self, f: &PyGenFun) -> f64 {
        classify::ensemble_depth(&f.0, &self.0)
    }

    fn avg_depth(&self, f: &PyGenFun) -> f64 {
        classify::ensemble_avg_depth(&f.0, &self.0)
    }

    /// Average size of entangled subsystems.
    fn ases(&self) -> f64 {
        bounds::ases(&self.0)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyfunction]
fn partitions(n: u32) -> PyResult<Vec<PyPartition>> {
    Ok(enumerate_partitions(n).map_err(err)?.into_iter().map(PyPartition).collect())
}

#[pyfunction]
fn dominance_covers(n: u32) -> PyResult<Vec<(PyPartition, PyPartition)>> {
    let pairs = partition::dominance_cover_pairs(n).map_err(err)?;
    Ok(pairs.into_iter().map(|(a, b)| (PyPartition(a), PyPartition(b))).collect())
}

/// Hasse diagram of `order` (`"refinement"` or `"dominance"`) as DOT or JSON.
#[pyfunction]
#[pyo3(signature = (n, order = "refinement", format = "dot"))]
fn hasse(n: u32, order: &str, format: &str) -> PyResult<String> {
    let order: OrderKind = order.parse().map_err(err)?;
    let format: GraphFormat = format.parse().map_err(err)?;
    HasseGraph::build(n, order).and_then(|g| g.render(format)).map_err(err)
}

#[pyfunction]
fn pure_depth(f: &PyGenFun, xi: &PyPartition) -> f64 {
    classify::pure_depth(&f.0, &xi.0)
}

/// `[(k, b_f(k), witnesses)]` from the bottom level to the top.
#[pyfunction]
fn bound_curve(f: &PyGenFun, n: u32) -> PyResult<Vec<(f64, u64, Vec<PyPartition>)>> {
    let table = bounds::bound_curve(&f.0, n).map_err(err)?;
    Ok(table
        .rows
        .into_iter()
        .map(|r| (r.k, r.b, r.witnesses.into_iter().map(PyPartition).collect()))
        .collect())
}

#[pyfunction]
fn usefulness<'py>(py: Python<'py>, f: &PyGenFun, n: u32) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &bounds::usefulness_report(&f.0, n).map_err(err)?)
}

/// Levels of `f` whose bound lies below `fq`.
#[pyfunction]
fn criteria_exclude(f: &PyGenFun, n: u32, fq: f64) -> PyResult<Vec<f64>> {
    bounds::criteria_exclude(&f.0, n, fq).map_err(err)
}

#[pyfunction]
fn depth_relations<'py>(py: Python<'py>, xi: &PyPartition) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &classify::depth_relation_report(&xi.0))
}

/// Fisher information for `Jz` of a state given as JSON, e.g.
/// `{"kind": "ghz_product", "parts": [3, 1]}`.
#[pyfunction]
fn qfi(state: &str) -> PyResult<f64> {
    let state = StateSpec::from_json(state).and_then(|s| s.build()).map_err(err)?;
    let jz = CollectiveOp::jz(state.n()).map_err(err)?;
    qstate::qfi_state(&state, &jz).map_err(err)
}

#[pyfunction]
fn ghz_product_qfi(xi: &PyPartition) -> PyResult<f64> {
    let psi = qstate::ghz_product_state(&xi.0).map_err(err)?;
    qstate::qfi_pure(&psi, &CollectiveOp::jz(xi.0.n()).map_err(err)?).map_err(err)
}

/// Checks `F_Q <= b_f(D)` and its convex form for a state and certificate
/// given as JSON.
#[pyfunction]
fn verify_criterion<'py>(py: Python<'py>, state: &str, f: &PyGenFun, certificate: &str) -> PyResult<Bound<'py, PyAny>> {
    let state = StateSpec::from_json(state).and_then(|s| s.build()).map_err(err)?;
    let cert: Certificate = serde_json::from_str(certificate).map_err(|e| err(e.into()))?;
    to_py(py, &qstate::verify_criterion(&state, &f.0, &cert).map_err(err)?)
}

/// Runs one verification suite and returns its report.
#[pyfunction]
#[pyo3(signature = (suite, n_max = None, seed = 0))]
fn run_suite<'py>(py: Python<'py>, suite: &str, n_max: Option<u32>, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let suite: SuiteName = suite.parse().map_err(err)?;
    let cfg = VerifyConfig { n_max, seed, extra: Vec::new() };
    let report = py.detach(|| verify::run_suite(suite, &cfg)).map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
fn fdepth(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPartition>()?;
    m.add_class::<PyGenFun>()?;
    m.add_class::<PyEnsemble>()?;
    m.add_function(wrap_pyfunction!(partitions, m)?)?;
    m.add_function(wrap_pyfunction!(dominance_covers, m)?)?;
    m.add_function(wrap_pyfunction!(hasse, m)?)?;
    m.add_function(wrap_pyfunction!(pure_depth, m)?)?;
    m.add_function(wrap_pyfunction!(bound_curve, m)?)?;
    m.add_function(wrap_pyfunction!(usefulness, m)?)?;
    m.add_function(wrap_pyfunction!(criteria_exclude, m)?)?;
    m.add_function(wrap_pyfunction!(depth_relations, m)?)?;
    m.add_function(wrap_pyfunction!(qfi, m)?)?;
    m.add_function(wrap_pyfunction!(ghz_product_qfi, m)?)?;
    m.add_function(wrap_pyfunction!(verify_criterion, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
