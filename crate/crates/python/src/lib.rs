//! Python bindings: `import affmin`.

use ::affmin as core;
use core::channels::{self, GadParams};
use core::linalg::CMatrix;
use core::measures::{self, Method, MinConfig};
use core::states::{self, CorrelationVector, SchmidtSpectrum};
use num_complex::Complex64;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

fn to_py_err(e: core::Error) -> PyErr {
    match e {
        core::Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for core::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py_err)
    }
}

type Rows = Vec<Vec<Complex64>>;

fn matrix_from_rows(rows: &Rows) -> PyResult<CMatrix> {
    let n = rows.len();
    if rows
        .iter()
        .any(|r| r.len() != rows.first().map_or(0, Vec::len))
    {
        return Err(PyValueError::new_err("ragged matrix"));
    }
    let m = rows.first().map_or(0, Vec::len);
    Ok(CMatrix::from_fn(n, m, |i, j| rows[i][j]))
}

fn rows_from_matrix(m: &CMatrix) -> Rows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn parse_method(name: Option<&str>) -> PyResult<Option<Method>> {
    match name {
        None => Ok(None),
        Some("pure-formula") => Ok(Some(Method::PureFormula)),
        Some("closed-2xn") => Ok(Some(Method::Closed2xn)),
        Some("brute-force") => Ok(Some(Method::BruteForce)),
        Some(other) => Err(PyValueError::new_err(format!("unknown method '{other}'"))),
    }
}

fn correlation_vector(c: (f64, f64, f64)) -> PyResult<CorrelationVector> {
    CorrelationVector::new(c.0, c.1, c.2).py()
}

/// Bipartite density matrix on `C^dim_a (x) C^dim_b`.
#[pyclass(name = "State", module = "affmin", frozen, skip_from_py_object)]
struct PyState(states::BipartiteState);

#[pymethods]
impl PyState {
    #[new]
    fn new(dim_a: usize, dim_b: usize, matrix: Rows) -> PyResult<Self> {
        let m = matrix_from_rows(&matrix)?;
        Ok(Self(states::BipartiteState::new(dim_a, dim_b, m).py()?))
    }

    #[staticmethod]
    fn bell_diagonal(c1: f64, c2: f64, c3: f64) -> PyResult<Self> {
        Ok(Self(
            states::bell_diagonal(correlation_vector((c1, c2, c3))?).py()?,
        ))
    }

    #[staticmethod]
    fn werner(m: usize, x: f64) -> PyResult<Self> {
        Ok(Self(states::werner(m, x).py()?))
    }

    #[staticmethod]
    fn isotropic(m: usize, x: f64) -> PyResult<Self> {
        Ok(Self(states::isotropic(m, x).py()?))
    }

    #[staticmethod]
    #[pyo3(signature = (dim_a, dim_b, rank, seed=0))]
    fn random(dim_a: usize, dim_b: usize, rank: usize, seed: u64) -> PyResult<Self> {
        Ok(Self(states::random_state(dim_a, dim_b, rank, seed).py()?))
    }

    /// Pure state with the given squared Schmidt coefficients.
    #[staticmethod]
    fn pure(schmidt: Vec<f64>, dim_a: usize, dim_b: usize) -> PyResult<Self> {
        let s = SchmidtSpectrum::new(schmidt).py()?;
        Ok(Self(states::pure_from_schmidt(&s, dim_a, dim_b).py()?))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self(states::BipartiteState::from_json_str(text).py()?))
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self(states::BipartiteState::load(path).py()?))
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.0.save(path).py()
    }

    fn to_json(&self) -> String {
        self.0.to_json_string()
    }

    #[getter]
    fn dim_a(&self) -> usize {
        self.0.dim_a()
    }

    #[getter]
    fn dim_b(&self) -> usize {
        self.0.dim_b()
    }

    #[getter]
    fn matrix(&self) -> Rows {
        rows_from_matrix(self.0.matrix())
    }

    fn marginal_a(&self) -> Rows {
        rows_from_matrix(&self.0.marginal_a())
    }

    fn marginal_b(&self) -> Rows {
        rows_from_matrix(&self.0.marginal_b())
    }

    fn purity(&self) -> f64 {
        self.0.purity()
    }

    fn spectrum(&self) -> Vec<f64> {
        self.0.spectrum()
    }

    fn is_pure(&self) -> bool {
        self.0.is_pure()
    }

    /// `(rho (x) sigma, Tr sigma^2)` with the ancilla joined to party B.
    fn add_ancilla(&self, sigma: Rows) -> PyResult<(Self, f64)> {
        let (s, p) = states::add_ancilla(&self.0, &matrix_from_rows(&sigma)?).py()?;
        Ok((Self(s), p))
    }

    /// Same generalized amplitude damping channel on both qubits.
    #[pyo3(signature = (gamma, p=0.5))]
    fn apply_gad(&self, gamma: f64, p: f64) -> PyResult<Self> {
        let ch = channels::gad_kraus(GadParams::new(gamma, p).py()?);
        Ok(Self(channels::apply_product_channel(&self.0, &ch).py()?))
    }

    fn __repr__(&self) -> String {
        format!("State(dim_a={}, dim_b={})", self.0.dim_a(), self.0.dim_b())
    }
}

#[pyclass(name = "MinResult", module = "affmin", frozen)]
struct PyMinResult(measures::MinResult);

#[pymethods]
impl PyMinResult {
    #[getter]
    fn value(&self) -> f64 {
        self.0.value
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.0.method.as_str()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.0.iterations
    }

    #[getter]
    fn converged(&self) -> bool {
        self.0.converged
    }

    /// Columns are the measurement basis vectors.
    #[getter]
    fn basis(&self) -> Rows {
        rows_from_matrix(self.0.measurement.basis())
    }

    #[getter]
    fn bloch_vector(&self) -> Option<[f64; 3]> {
        self.0.measurement.bloch_vector()
    }

    fn __repr__(&self) -> String {
        format!(
            "MinResult(value={}, method='{}')",
            self.0.value, self.0.method
        )
    }
}

fn config(seed: u64, starts: usize, deg_tol: f64, method: Option<&str>) -> PyResult<MinConfig> {
    Ok(MinConfig {
        seed,
        starts,
        deg_tol,
        method: parse_method(method)?,
        ..Default::default()
    })
}

#[pyfunction]
#[pyo3(signature = (state, seed=0, starts=32, deg_tol=1e-7, method=None))]
fn min_affinity(
    state: &PyState,
    seed: u64,
    starts: usize,
    deg_tol: f64,
    method: Option<&str>,
) -> PyResult<PyMinResult> {
    let cfg = config(seed, starts, deg_tol, method)?;
    Ok(PyMinResult(measures::min_affinity(&state.0, &cfg).py()?))
}

#[pyfunction]
#[pyo3(signature = (state, seed=0, starts=32, deg_tol=1e-7))]
fn hs_min(state: &PyState, seed: u64, starts: usize, deg_tol: f64) -> PyResult<PyMinResult> {
    let cfg = config(seed, starts, deg_tol, None)?;
    Ok(PyMinResult(measures::hs_min(&state.0, &cfg).py()?))
}

#[pyfunction]
#[pyo3(signature = (state, seed=0, starts=32, deg_tol=1e-7))]
fn luo_fu_min(state: &PyState, seed: u64, starts: usize, deg_tol: f64) -> PyResult<f64> {
    let cfg = config(seed, starts, deg_tol, None)?;
    measures::luo_fu_min(&state.0, &cfg).py()
}

#[pyfunction]
fn upper_bound(state: &PyState) -> f64 {
    measures::min_affinity_upper_bound(&state.0)
}

#[pyfunction]
fn concurrence(state: &PyState) -> PyResult<f64> {
    measures::concurrence(&state.0).py()
}

#[pyfunction]
#[pyo3(signature = (rho, sigma, alpha=0.5))]
fn affinity(rho: Rows, sigma: Rows, alpha: f64) -> PyResult<f64> {
    measures::affinity_alpha(&matrix_from_rows(&rho)?, &matrix_from_rows(&sigma)?, alpha).py()
}

fn pair(c: measures::ClosedForm) -> (f64, f64) {
    (c.affinity_min, c.hs_min)
}

/// `(affinity MIN, Hilbert-Schmidt MIN)` of a Bell-diagonal state.
#[pyfunction]
fn closed_form_bell_diagonal(c1: f64, c2: f64, c3: f64) -> PyResult<(f64, f64)> {
    let cv = correlation_vector((c1, c2, c3))?;
    Ok(pair(measures::closed_form_bell_diagonal(&cv).py()?))
}

#[pyfunction]
fn closed_form_two_qubit_werner(p: f64) -> PyResult<(f64, f64)> {
    Ok(pair(measures::closed_form_two_qubit_werner(p).py()?))
}

#[pyfunction]
fn closed_form_werner(m: usize, x: f64) -> PyResult<(f64, f64)> {
    Ok(pair(measures::closed_form_werner(m, x).py()?))
}

#[pyfunction]
fn closed_form_isotropic(m: usize, x: f64) -> PyResult<(f64, f64)> {
    Ok(pair(measures::closed_form_isotropic(m, x).py()?))
}

#[pyfunction]
fn evolve_bd(c: (f64, f64, f64), gamma: f64) -> PyResult<(f64, f64, f64)> {
    let out = channels::evolve_bd(correlation_vector(c)?, gamma).py()?;
    Ok((out.c1, out.c2, out.c3))
}

/// Rows `(gamma, n_affinity, n_hs, concurrence)` on a uniform grid of `[0, 1]`.
#[pyfunction]
#[pyo3(signature = (c0, points=101))]
fn dynamics_sweep(c0: (f64, f64, f64), points: usize) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let rec =
        channels::dynamics_sweep(correlation_vector(c0)?, &channels::unit_grid(points)).py()?;
    Ok(rec
        .iter()
        .map(|r| (r.gamma, r.n_affinity, r.n_hs, r.concurrence))
        .collect())
}

#[pymodule(name = "affmin")]
fn affmin_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PyMinResult>()?;
    m.add_function(wrap_pyfunction!(min_affinity, m)?)?;
    m.add_function(wrap_pyfunction!(hs_min, m)?)?;
    m.add_function(wrap_pyfunction!(luo_fu_min, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bound, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(affinity, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_bell_diagonal, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_two_qubit_werner, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_werner, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_isotropic, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_bd, m)?)?;
    m.add_function(wrap_pyfunction!(dynamics_sweep, m)?)?;
    Ok(())
}
