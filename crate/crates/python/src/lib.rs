//! Python bindings for `f2q`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use f2q_core::circuits::{self, HvGranularity};
use f2q_core::cli::{self as tools, QuenchParams};
use f2q_core::oracle::{self, BCSector};
use f2q_core::pauli::constraint_set;
use f2q_core::statevec::{constrained_basis, constraint_expectations};
use f2q_core::vqe::{AnsatzKind, InitScheme, OptimizerConfig, VqeConfig, VqeProblem};
use f2q_core::{Direction, Edge, LatticeSpec, Site, SparseState};

fn err(e: f2q_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn sector(s: (i8, i8)) -> PyResult<BCSector> {
    match s {
        (1 | -1, 1 | -1) => Ok(BCSector { sx: s.0, sy: s.1 }),
        _ => Err(PyValueError::new_err("sector signs must be +1 or -1")),
    }
}

fn edge(e: (usize, usize, &str)) -> PyResult<Edge> {
    let origin = Site::new(e.0, e.1);
    match e.2 {
        "x" => Ok(Edge::x(origin)),
        "y" => Ok(Edge::y(origin)),
        d => Err(PyValueError::new_err(format!("edge direction '{d}', expected 'x' or 'y'"))),
    }
}

fn ansatz_kind(s: &str) -> PyResult<AnsatzKind> {
    match s {
        "agate" => Ok(AnsatzKind::Agate),
        "hv" => Ok(AnsatzKind::Hv),
        _ => Err(PyValueError::new_err(format!("unknown ansatz '{s}'"))),
    }
}

fn granularity(s: &str) -> PyResult<HvGranularity> {
    match s {
        "per-edge" => Ok(HvGranularity::PerEdge),
        "per-group" => Ok(HvGranularity::PerGroup),
        _ => Err(PyValueError::new_err(format!("unknown granularity '{s}'"))),
    }
}

/// Lx x Ly torus. `rho` defaults to -1 on odd x odd lattices.
#[pyclass(name = "Lattice", frozen)]
struct PyLattice {
    spec: LatticeSpec,
}

#[pymethods]
impl PyLattice {
    #[new]
    #[pyo3(signature = (lx, ly, rho=None))]
    fn new(lx: usize, ly: usize, rho: Option<i8>) -> PyResult<Self> {
        let spec = match rho {
            Some(r) => LatticeSpec::with_rho(lx, ly, r),
            None => LatticeSpec::new(lx, ly),
        }
        .map_err(err)?;
        Ok(Self { spec })
    }

    #[getter]
    fn lx(&self) -> usize {
        self.spec.lx()
    }

    #[getter]
    fn ly(&self) -> usize {
        self.spec.ly()
    }

    #[getter]
    fn rho(&self) -> i8 {
        self.spec.rho()
    }

    #[getter]
    fn n_sites(&self) -> usize {
        self.spec.n_sites()
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.spec.n_qubits()
    }

    /// Edges as `(rx, ry, "x" | "y")`.
    fn edges(&self) -> Vec<(usize, usize, &'static str)> {
        self.spec
            .edges()
            .into_iter()
            .map(|e| (e.origin.rx, e.origin.ry, if e.direction == Direction::X { "x" } else { "y" }))
            .collect()
    }

    /// Dimension of the stabilizer-constrained subspace.
    fn subspace_dimension(&self) -> PyResult<usize> {
        Ok(constrained_basis(&constraint_set(&self.spec)).map_err(err)?.dim())
    }

    fn __repr__(&self) -> String {
        format!("Lattice({}, {}, rho={})", self.spec.lx(), self.spec.ly(), self.spec.rho())
    }
}

#[pyclass(name = "Circuit", frozen)]
struct PyCircuit {
    inner: circuits::Circuit,
}

#[pymethods]
impl PyCircuit {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self { inner: circuits::parse_text(text).map_err(err)? })
    }

    fn to_text(&self) -> String {
        circuits::export_text(&self.inner)
    }

    #[getter]
    fn n_qubits(&self) -> usize {
        self.inner.n_qubits
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Two-qubit depth and gate counts.
    fn depth_report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let r = circuits::schedule(&self.inner);
        let d = PyDict::new(py);
        d.set_item("two_qubit_depth", r.two_qubit_depth)?;
        d.set_item("n_gates", r.n_gates)?;
        d.set_item("parameterized", r.parameterized)?;
        d.set_item("counts_by_arity", r.counts_by_arity)?;
        Ok(d)
    }

    /// Applies the circuit to `|0...0>` and returns
    /// `(name, expectation, target)` for every stabilizer of `lattice`.
    fn constraint_report(&self, lattice: &PyLattice) -> PyResult<Vec<(String, f64, i8)>> {
        let mut st = SparseState::zero_state(lattice.spec.n_qubits()).map_err(err)?;
        self.inner.apply(&mut st).map_err(err)?;
        let rows = constraint_expectations(&st, &constraint_set(&lattice.spec)).map_err(err)?;
        Ok(rows.into_iter().map(|(k, v, t)| (k.to_string(), v, t)).collect())
    }
}

/// Vacuum preparation, optionally followed by pair creation on `pairs`.
#[pyfunction]
#[pyo3(signature = (lattice, pairs=Vec::new()))]
fn vacuum_circuit(lattice: &PyLattice, pairs: Vec<(usize, usize, String)>) -> PyResult<PyCircuit> {
    let edges: Vec<Edge> = pairs.iter().map(|p| edge((p.0, p.1, &p.2))).collect::<PyResult<_>>()?;
    Ok(PyCircuit { inner: tools::prepare_vacuum_with_pairs(&lattice.spec, &edges).map_err(err)? })
}

#[pyfunction]
fn trotter_step(lattice: &PyLattice, t: f64, v: f64, dt: f64) -> PyCircuit {
    PyCircuit { inner: circuits::trotter_step(&lattice.spec, t, v, dt) }
}

#[pyfunction]
#[pyo3(signature = (lattice, kind, layers, params, granularity="per-edge"))]
fn ansatz(lattice: &PyLattice, kind: &str, layers: usize, params: Vec<f64>, granularity: &str) -> PyResult<PyCircuit> {
    let c = match ansatz_kind(kind)? {
        AnsatzKind::Agate => circuits::ansatz_agate(&lattice.spec, layers, &params),
        AnsatzKind::Hv => circuits::ansatz_hv(&lattice.spec, layers, &params, self::granularity(granularity)?),
    };
    Ok(PyCircuit { inner: c.map_err(err)? })
}

/// Sorted fermionic spectrum in one boundary sector.
#[pyfunction]
#[pyo3(signature = (lattice, t, v, n_f, sector=(1, 1)))]
fn ed_spectrum(lattice: &PyLattice, t: f64, v: f64, n_f: usize, sector: (i8, i8)) -> PyResult<Vec<f64>> {
    let s = self::sector(sector)?;
    Ok(oracle::ed_spectrum(&lattice.spec, t, v, &[], s, n_f).map_err(err)?.eigenvalues)
}

/// Best-matching boundary sector `((sx, sy), deviation)`.
#[pyfunction]
#[pyo3(signature = (lattice, t, v, n_f=None))]
fn spectrum_match(lattice: &PyLattice, t: f64, v: f64, n_f: Option<usize>) -> PyResult<((i8, i8), f64)> {
    let m = oracle::match_sector(&lattice.spec, t, v, &[], n_f).map_err(err)?;
    let (s, d) = m.best();
    Ok(((s.sx, s.sy), d))
}

#[pyclass(name = "VqeResult", frozen, get_all)]
struct PyVqeResult {
    energies: Vec<f64>,
    best_params: Vec<f64>,
    final_energy: f64,
    exact_energy: f64,
    relative_error: f64,
    reported_relative_error: f64,
    steps: usize,
    converged: bool,
    sector: (i8, i8),
    max_constraint_violation: f64,
}

#[pyfunction]
#[pyo3(signature = (lattice, t, v, ansatz="agate", layers=2, n_f=2, granularity="per-edge", max_steps=5000, seed=7, init_width=0.1))]
#[allow(clippy::too_many_arguments)]
fn vqe(
    lattice: &PyLattice,
    t: f64,
    v: f64,
    ansatz: &str,
    layers: usize,
    n_f: usize,
    granularity: &str,
    max_steps: usize,
    seed: u64,
    init_width: f64,
) -> PyResult<PyVqeResult> {
    let mut c = VqeConfig::new(lattice.spec, t, v, ansatz_kind(ansatz)?, layers);
    c.n_f = n_f;
    c.granularity = self::granularity(granularity)?;
    c.init = if init_width > 0.0 { InitScheme::Uniform { half_width: init_width } } else { InitScheme::Zeros };
    let opt = OptimizerConfig { max_steps, seed, ..OptimizerConfig::default() };
    let r = VqeProblem::new(&c).and_then(|p| p.run(&opt)).map_err(err)?;
    Ok(PyVqeResult {
        energies: r.energies,
        best_params: r.best_params,
        final_energy: r.final_energy,
        exact_energy: r.exact_energy,
        relative_error: r.relative_error,
        reported_relative_error: r.reported_relative_error,
        steps: r.steps,
        converged: r.converged,
        sector: (r.sector.sx, r.sector.sy),
        max_constraint_violation: r.max_constraint_violation,
    })
}

type QuenchRow = (f64, usize, usize, f64, f64, f64);

/// Quench trajectories as rows
/// `(time, rx, ry, occ_trotter, occ_exact_encoded, occ_exact_fermionic)`.
#[pyfunction]
#[pyo3(signature = (lattice, dt, tmax, t=1.0, v=3.0, k=1.0, n_f=2))]
#[allow(clippy::too_many_arguments)]
fn quench(lattice: &PyLattice, dt: f64, tmax: f64, t: f64, v: f64, k: f64, n_f: usize) -> PyResult<Vec<QuenchRow>> {
    let p = QuenchParams { spec: lattice.spec, t, v, k, n_f, dt, tmax };
    let r = tools::run_quench(&p).map_err(err)?;
    Ok(r.rows
        .into_iter()
        .map(|x| (x.time, x.rx, x.ry, x.occ_trotter, x.occ_exact_encoded, x.occ_exact_fermionic))
        .collect())
}

/// `(L, two-qubit depth, total gates, vacuum two-qubit gates)` per size.
#[pyfunction]
fn depth_table(sizes: Vec<usize>) -> PyResult<Vec<(usize, usize, usize, usize)>> {
    Ok(tools::depth_table(&sizes)
        .map_err(err)?
        .into_iter()
        .map(|r| (r.l, r.trotter_two_qubit_depth, r.trotter_total_gates, r.vacuum_two_qubit_gates))
        .collect())
}

#[pymodule]
fn f2q(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLattice>()?;
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyVqeResult>()?;
    m.add_function(wrap_pyfunction!(vacuum_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(trotter_step, m)?)?;
    m.add_function(wrap_pyfunction!(ansatz, m)?)?;
    m.add_function(wrap_pyfunction!(ed_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_match, m)?)?;
    m.add_function(wrap_pyfunction!(vqe, m)?)?;
    m.add_function(wrap_pyfunction!(quench, m)?)?;
    m.add_function(wrap_pyfunction!(depth_table, m)?)?;
    Ok(())
}
