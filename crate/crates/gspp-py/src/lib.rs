//! Python bindings: instances, matching bounds, probing reduction, the
//! matheuristic and the exact solver.

use std::collections::BTreeMap;
use std::time::Duration;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gspp::instance::{Assignment, CapacitatedResource, Solution};
use gspp::matheuristic::RankingParams;
use gspp::{GsppError, SolveOptions};

fn err(e: GsppError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// One set partitioning instance under packing constraints.
#[pyclass(name = "Instance", from_py_object)]
#[derive(Clone)]
struct PyInstance {
    inner: gspp::Instance,
}

#[pymethods]
impl PyInstance {
    /// Assignments are (id, task, cost, footprint, cap_usage) tuples;
    /// caps are (id, capacity) pairs.
    #[new]
    #[pyo3(signature = (name, tasks, tuples, assignments, caps=vec![], scale=1))]
    fn new(
        name: &str,
        tasks: u32,
        tuples: u32,
        assignments: Vec<(u32, u32, i64, Vec<u32>, Vec<(u32, u64)>)>,
        caps: Vec<(u32, u64)>,
        scale: u32,
    ) -> Self {
        let caps = caps
            .into_iter()
            .map(|(id, capacity)| CapacitatedResource { id, capacity })
            .collect();
        let assignments = assignments
            .into_iter()
            .map(|(id, task, cost, footprint, usage)| {
                Assignment::new(id, task, cost, footprint).with_cap_usage(usage)
            })
            .collect();
        PyInstance {
            inner: gspp::Instance::new(name, "generic", tasks, tuples, scale, caps, assignments),
        }
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(PyInstance {
            inner: gspp::fileformat::read_instance(text).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        Ok(PyInstance {
            inner: gspp::fileformat::read_instance_file(path.as_ref()).map_err(err)?,
        })
    }

    #[staticmethod]
    fn e1() -> Self {
        PyInstance {
            inner: gspp::fixtures::e1(),
        }
    }

    #[staticmethod]
    fn e2() -> Self {
        PyInstance {
            inner: gspp::fixtures::e2(),
        }
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn n_tasks(&self) -> u32 {
        self.inner.n_tasks()
    }

    #[getter]
    fn n_assignments(&self) -> usize {
        self.inner.n_assignments()
    }

    fn to_text(&self) -> String {
        gspp::fileformat::write_instance(&self.inner)
    }

    /// Structural violations as strings; empty means the instance is sound.
    fn validate(&self) -> Vec<String> {
        gspp::validate_instance(&self.inner)
            .violations
            .iter()
            .map(|v| v.to_string())
            .collect()
    }

    fn compatible(&self, a: u32, b: u32) -> PyResult<bool> {
        self.inner.compatible(a, b).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(name={:?}, tasks={}, assignments={})",
            self.inner.name,
            self.inner.n_tasks(),
            self.inner.n_assignments()
        )
    }
}

fn solution_dict<'py>(py: Python<'py>, sol: &Solution) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("cost", sol.cost)?;
    d.set_item("chosen", sol.chosen.clone())?;
    Ok(d)
}

#[pyfunction]
fn trivial_bound(inst: &PyInstance) -> i64 {
    gspp::trivial_bound(&inst.inner)
}

#[pyfunction]
fn lb1(inst: &PyInstance) -> PyResult<i64> {
    gspp::lb1(&inst.inner).map_err(err)
}

#[pyfunction]
fn lb2(inst: &PyInstance) -> PyResult<i64> {
    gspp::lb2(&inst.inner).map_err(err)
}

/// Bound implied by fixing one assignment; None when the assignment cannot
/// appear in any feasible solution.
#[pyfunction]
fn probe_bound(inst: &PyInstance, assignment: u32) -> PyResult<Option<i64>> {
    let b = gspp::probe_bound(&inst.inner, assignment).map_err(err)?;
    Ok((b < gspp::INF_COST).then_some(b))
}

/// Drop every assignment whose probe bound exceeds the upper bound.
/// Returns (reduced instance, list of (id, probe bound) removed).
#[pyfunction]
fn reduce(inst: &PyInstance, ub: i64) -> PyResult<(PyInstance, Vec<(u32, i64)>)> {
    let r = gspp::reduce(&inst.inner, ub).map_err(err)?;
    Ok((PyInstance { inner: r.reduced }, r.removed))
}

/// Exact branch-and-bound. Returns a dict with status, best_bound, nodes
/// and (when found) the solution.
#[pyfunction]
#[pyo3(signature = (inst, time_limit=None))]
fn solve<'py>(
    py: Python<'py>,
    inst: &PyInstance,
    time_limit: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = SolveOptions {
        time_limit: time_limit.map(Duration::from_secs_f64),
        ..SolveOptions::default()
    };
    let r = gspp::branch_and_bound(&inst.inner, &opts).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("status", r.status.as_str())?;
    d.set_item("best_bound", r.best_bound.min(gspp::INF_COST))?;
    d.set_item("nodes", r.nodes)?;
    match &r.incumbent {
        Some(sol) => d.set_item("solution", solution_dict(py, sol)?)?,
        None => d.set_item("solution", py.None())?,
    }
    Ok(d)
}

/// Rank variables by probe bound, keep the most promising pool, and solve
/// the reduced model exactly.
#[pyfunction]
#[pyo3(signature = (inst, sigma=0.1, mu=2000, time_limit=None))]
fn matheuristic<'py>(
    py: Python<'py>,
    inst: &PyInstance,
    sigma: f64,
    mu: usize,
    time_limit: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let params = RankingParams {
        sigma,
        mu,
        time_limit: time_limit.map(Duration::from_secs_f64),
    };
    let r = gspp::matheuristic_solve(&inst.inner, &params).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("status", r.status.as_str())?;
    d.set_item("lb2", r.lb2)?;
    d.set_item("kept", r.kept)?;
    d.set_item("total", r.total)?;
    match &r.solution {
        Some(sol) => d.set_item("solution", solution_dict(py, sol)?)?,
        None => d.set_item("solution", py.None())?,
    }
    Ok(d)
}

/// Probe bounds for every assignment id (the matheuristic's ranking).
#[pyfunction]
fn rank_variables(inst: &PyInstance) -> PyResult<BTreeMap<u32, i64>> {
    gspp::rank_variables(&inst.inner).map_err(err)
}

/// Cost and feasibility of an explicit task -> assignment selection.
#[pyfunction]
fn evaluate<'py>(
    py: Python<'py>,
    inst: &PyInstance,
    chosen: BTreeMap<u32, u32>,
) -> PyResult<Bound<'py, PyDict>> {
    let e = gspp::evaluate(&inst.inner, &chosen).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("cost", e.cost)?;
    d.set_item("feasible", e.feasible)?;
    d.set_item(
        "violations",
        e.violations.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>(),
    )?;
    Ok(d)
}

#[pyfunction]
fn export_lp(inst: &PyInstance) -> String {
    gspp::export_lp(&inst.inner)
}

#[pymodule]
fn gspp_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_function(wrap_pyfunction!(trivial_bound, m)?)?;
    m.add_function(wrap_pyfunction!(lb1, m)?)?;
    m.add_function(wrap_pyfunction!(lb2, m)?)?;
    m.add_function(wrap_pyfunction!(probe_bound, m)?)?;
    m.add_function(wrap_pyfunction!(rank_variables, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(matheuristic, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(export_lp, m)?)?;
    Ok(())
}
