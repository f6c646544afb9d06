//! Python bindings for the slicing-enforcement solvers.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rsep_core::pipeline::{solve as solve_core, SolverConfig};
use rsep_core::scenario::{fixed_scenario, generate, ScenarioSpec};
use rsep_core::solvers::{linking_index, SolverId, DEFAULT_NODE_BUDGET};
use rsep_core::{Allocation, QMatrix, RsepError};

create_exception!(rsep, InfeasibleError, PyException, "The instance or allocation violates a constraint.");

fn to_py(err: RsepError) -> PyErr {
    match err {
        RsepError::Overloaded { .. } | RsepError::InfeasibleAllocation(_) => InfeasibleError::new_err(err.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

type Grid = Vec<Vec<Option<usize>>>;

#[pyclass(name = "Instance", module = "rsep", skip_from_py_object)]
#[derive(Clone)]
struct PyInstance {
    inner: rsep_core::Instance,
}

#[pymethods]
impl PyInstance {
    #[new]
    fn new(
        num_mvnos: usize,
        num_bs: usize,
        num_subcarriers: usize,
        num_slots: usize,
        adjacency: Vec<Vec<u8>>,
        profile: Vec<Vec<u64>>,
    ) -> PyResult<Self> {
        rsep_core::Instance::new(num_mvnos, num_bs, num_subcarriers, num_slots, adjacency, profile)
            .map(|inner| PyInstance { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        rsep_core::Instance::from_json(text).map(|inner| PyInstance { inner }).map_err(to_py)
    }

    /// Named instance: `fig1` or `appendix_shape`.
    #[staticmethod]
    fn scenario(name: &str) -> PyResult<Self> {
        fixed_scenario(name).map(|inner| PyInstance { inner }).map_err(to_py)
    }

    #[staticmethod]
    #[pyo3(signature = (m, b, n_rb=6, n_sf=10, n_frames=1, density=0.5, load=1.0, seed=0, force_k=None))]
    #[allow(clippy::too_many_arguments)]
    fn generate(
        m: usize,
        b: usize,
        n_rb: usize,
        n_sf: usize,
        n_frames: usize,
        density: f64,
        load: f64,
        seed: u64,
        force_k: Option<usize>,
    ) -> PyResult<Self> {
        let spec = ScenarioSpec {
            m,
            b,
            n_rb,
            n_sf,
            n_frames,
            adjacency_density: density,
            load_fraction: load,
            seed,
            force_aggregable_k: force_k,
        };
        generate(&spec).map(|inner| PyInstance { inner }).map_err(to_py)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[getter]
    fn num_mvnos(&self) -> usize {
        self.inner.num_mvnos()
    }

    #[getter]
    fn num_bs(&self) -> usize {
        self.inner.num_bs()
    }

    #[getter]
    fn num_subcarriers(&self) -> usize {
        self.inner.num_subcarriers()
    }

    #[getter]
    fn num_slots(&self) -> usize {
        self.inner.num_slots()
    }

    #[getter]
    fn adjacency(&self) -> Vec<Vec<u8>> {
        self.inner.adjacency().to_vec()
    }

    #[getter]
    fn profile(&self) -> Vec<Vec<u64>> {
        self.inner.profile().to_vec()
    }

    /// Largest eigenvalue of the objective matrix.
    fn largest_eigenvalue(&self) -> PyResult<f64> {
        QMatrix::new(&self.inner).largest_eigenvalue().map_err(to_py)
    }

    fn linking_index(&self) -> Vec<u64> {
        linking_index(&self.inner)
    }

    /// `{"k", "axis", "scaled"}` or `None` when the instance is not aggregable.
    fn plan_aggregation<'py>(&self, py: Python<'py>) -> PyResult<Option<Bound<'py, PyDict>>> {
        let Some(plan) = rsep_core::plan_aggregation(&self.inner) else {
            return Ok(None);
        };
        let dict = PyDict::new(py);
        dict.set_item("k", plan.k)?;
        let axis = match plan.axis {
            rsep_core::reduction::AggregationAxis::Subcarrier => "subcarrier",
            rsep_core::reduction::AggregationAxis::TimeSlot => "time_slot",
        };
        dict.set_item("axis", axis)?;
        dict.set_item("scaled", PyInstance { inner: plan.scaled_instance })?;
        Ok(Some(dict))
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(M={}, B={}, N_RB={}, T={})",
            self.inner.num_mvnos(),
            self.inner.num_bs(),
            self.inner.num_subcarriers(),
            self.inner.num_slots()
        )
    }
}

#[pyclass(name = "SolveResult", module = "rsep", frozen)]
struct PySolveResult {
    inner: rsep_core::SolveResult,
}

#[pymethods]
impl PySolveResult {
    #[getter]
    fn objective(&self) -> u64 {
        self.inner.objective
    }

    #[getter]
    fn certified(&self) -> bool {
        self.inner.certified
    }

    #[getter]
    fn solver(&self) -> &'static str {
        self.inner.solver.name()
    }

    #[getter]
    fn elapsed_ms(&self) -> f64 {
        self.inner.elapsed.as_secs_f64() * 1e3
    }

    #[getter]
    fn nodes(&self) -> u64 {
        self.inner.nodes
    }

    /// Per-BS rows of MVNO ids, `None` for unassigned RBs.
    #[getter]
    fn allocation(&self) -> Grid {
        self.inner.allocation.rows()
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveResult(solver={}, objective={}, certified={})",
            self.inner.solver, self.inner.objective, self.inner.certified
        )
    }
}

#[pyfunction]
#[pyo3(signature = (instance, solver="exact", node_budget=DEFAULT_NODE_BUDGET, penalty=None, restarts=8, seed=0, sparsity=false, aggregate=false))]
#[allow(clippy::too_many_arguments)]
fn solve(
    py: Python<'_>,
    instance: PyRef<'_, PyInstance>,
    solver: &str,
    node_budget: u64,
    penalty: Option<f64>,
    restarts: usize,
    seed: u64,
    sparsity: bool,
    aggregate: bool,
) -> PyResult<PySolveResult> {
    let id: SolverId = solver.parse().map_err(to_py)?;
    let config = SolverConfig {
        node_budget,
        lambda: penalty,
        restarts,
        seed,
        sparsity,
        aggregation: aggregate,
    };
    let inst = instance.inner.clone();
    let inner = py.detach(|| solve_core(&inst, id, &config)).map_err(to_py)?;
    Ok(PySolveResult { inner })
}

#[pyfunction]
fn count_linked(instance: PyRef<'_, PyInstance>, allocation: Grid) -> PyResult<u64> {
    let alloc = Allocation::from_rows(&allocation).map_err(to_py)?;
    rsep_core::count_linked(&instance.inner, &alloc).map_err(to_py)
}

/// `(feasible, report)` for an allocation given as per-BS rows.
#[pyfunction]
fn check_feasibility(instance: PyRef<'_, PyInstance>, allocation: Grid) -> PyResult<(bool, String)> {
    let alloc = Allocation::from_rows(&allocation).map_err(to_py)?;
    let report = rsep_core::check_feasibility(&instance.inner, &alloc).map_err(to_py)?;
    Ok((report.is_feasible(), report.to_string()))
}

#[pymodule]
fn rsep(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PySolveResult>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(count_linked, m)?)?;
    m.add_function(wrap_pyfunction!(check_feasibility, m)?)?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    Ok(())
}
