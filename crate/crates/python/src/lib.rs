//! Python bindings. Matrices cross the boundary as lists of rows of Python
//! complex numbers; every type also converts to and from the library's JSON.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qgames::bounds::{self, BoundResult, SeesawOptions, Verdict};
use qgames::engine::{self, Strategy};
use qgames::games::{Diagnostic, Game};
use qgames::maps::{self, Assemblage, Membership};
use qgames::qcore::linalg::CMatrix;
use qgames::qcore::{DensityOperator, Povm};
use qgames::{appendixlab, fixtures, games, io, states};

type Rows = Vec<Vec<Complex64>>;

fn err(e: qgames::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn diag_err(d: Vec<Diagnostic>) -> PyErr {
    let lines: Vec<String> = d.iter().map(|x| x.to_string()).collect();
    PyValueError::new_err(lines.join("\n"))
}

fn to_rows(m: &CMatrix) -> Rows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn from_rows(rows: &Rows) -> PyResult<CMatrix> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(PyValueError::new_err("matrix must be square"));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

#[pyclass(name = "Game", module = "qgames_py")]
pub struct PyGame {
    inner: Game,
}

#[pymethods]
impl PyGame {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::parse_game(text)
            .map(|inner| Self { inner })
            .map_err(diag_err)
    }

    #[staticmethod]
    fn chsh() -> Self {
        Self {
            inner: games::chsh_game(),
        }
    }

    /// Two classical settings for Alice, BB84 questions for Bob.
    #[staticmethod]
    fn steering() -> Self {
        Self {
            inner: fixtures::steering_game(),
        }
    }

    #[staticmethod]
    fn semiquantum() -> Self {
        Self {
            inner: fixtures::semiquantum_game(),
        }
    }

    fn to_json(&self) -> String {
        io::game_to_json(&self.inner)
    }

    #[getter]
    fn kind(&self) -> String {
        self.inner.kind().to_string()
    }

    /// `(|S|, |T|, |X|, |Y|)`.
    #[getter]
    fn shape(&self) -> (usize, usize, usize, usize) {
        let [s, t, x, y] = self.inner.payoff().shape();
        (s, t, x, y)
    }

    fn payoff(&self, s: usize, t: usize, x: usize, y: usize) -> PyResult<f64> {
        let [ns, nt, nx, ny] = self.inner.payoff().shape();
        if s >= ns || t >= nt || x >= nx || y >= ny {
            return Err(PyValueError::new_err("payoff index out of range"));
        }
        Ok(self.inner.payoff().get(s, t, x, y))
    }

    fn __repr__(&self) -> String {
        let [s, t, x, y] = self.inner.payoff().shape();
        format!(
            "Game(kind={}, shape=({s}, {t}, {x}, {y}))",
            self.inner.kind()
        )
    }
}

#[pyclass(name = "State", module = "qgames_py")]
pub struct PyState {
    inner: DensityOperator,
}

#[pymethods]
impl PyState {
    #[new]
    fn new(matrix: Rows, dims: Vec<usize>) -> PyResult<Self> {
        DensityOperator::new(from_rows(&matrix)?, dims)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::parse_state(text)
            .map(|inner| Self { inner })
            .map_err(diag_err)
    }

    #[staticmethod]
    fn singlet() -> Self {
        Self {
            inner: states::singlet(),
        }
    }

    #[staticmethod]
    fn werner(w: f64) -> PyResult<Self> {
        states::werner_state(w)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn bell(index: usize) -> PyResult<Self> {
        states::bell_state(index)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn maximally_entangled(d: usize) -> PyResult<Self> {
        states::maximally_entangled(d)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[staticmethod]
    fn maximally_mixed(dims: Vec<usize>) -> Self {
        Self {
            inner: DensityOperator::maximally_mixed(dims),
        }
    }

    #[staticmethod]
    fn random_separable(seed: u64, n_terms: usize) -> PyResult<Self> {
        states::random_separable(seed, n_terms)
            .map(|(inner, _)| Self { inner })
            .map_err(err)
    }

    fn to_json(&self) -> String {
        io::state_to_json(&self.inner)
    }

    fn matrix(&self) -> Rows {
        to_rows(self.inner.matrix())
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims().to_vec()
    }

    fn purity(&self) -> f64 {
        self.inner.purity()
    }

    fn ppt_min_eigenvalue(&self) -> PyResult<f64> {
        states::ppt_min_eigenvalue(&self.inner).map_err(err)
    }

    fn negativity(&self) -> PyResult<f64> {
        states::negativity(&self.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("State(dims={:?})", self.inner.dims())
    }
}

#[pyclass(name = "Povm", module = "qgames_py")]
pub struct PyPovm {
    inner: Povm,
}

#[pymethods]
impl PyPovm {
    #[new]
    fn new(effects: Vec<Rows>) -> PyResult<Self> {
        let effects = effects
            .iter()
            .map(from_rows)
            .collect::<PyResult<Vec<_>>>()?;
        Povm::new(effects).map(|inner| Self { inner }).map_err(err)
    }

    fn effects(&self) -> Vec<Rows> {
        self.inner.effects().iter().map(to_rows).collect()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Povm(dim={}, outcomes={})",
            self.inner.dim(),
            self.inner.len()
        )
    }
}

/// Parses a JSON array of POVMs, as used for measurement settings.
#[pyfunction]
fn povms_from_json(text: &str) -> PyResult<Vec<PyPovm>> {
    io::parse_povms(text)
        .map(|v| v.into_iter().map(|inner| PyPovm { inner }).collect())
        .map_err(diag_err)
}

#[pyclass(name = "Strategy", module = "qgames_py")]
pub struct PyStrategy {
    inner: Strategy,
}

#[pymethods]
impl PyStrategy {
    #[new]
    fn new(alice: PyRef<'_, PyPovm>, bob: PyRef<'_, PyPovm>) -> Self {
        Self {
            inner: Strategy::new(alice.inner.clone(), bob.inner.clone()),
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::parse_strategy(text)
            .map(|inner| Self { inner })
            .map_err(diag_err)
    }

    fn to_json(&self) -> String {
        io::strategy_to_json(&self.inner)
    }

    #[getter]
    fn alice(&self) -> PyPovm {
        PyPovm {
            inner: self.inner.alice.clone(),
        }
    }

    #[getter]
    fn bob(&self) -> PyPovm {
        PyPovm {
            inner: self.inner.bob.clone(),
        }
    }
}

#[pyclass(name = "Bound", module = "qgames_py")]
pub struct PyBound {
    inner: BoundResult,
}

#[pymethods]
impl PyBound {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let j: io::BoundJson = io::from_json(text).map_err(diag_err)?;
        j.to_bound().map(|inner| Self { inner }).map_err(diag_err)
    }

    fn to_json(&self) -> String {
        io::to_json(&io::BoundJson::from_bound(&self.inner))
    }

    #[getter]
    fn value(&self) -> f64 {
        self.inner.value
    }

    /// `"enumeration-exact"` or `"search-lower-bound"`.
    #[getter]
    fn method(&self) -> String {
        self.inner.method.to_string()
    }

    /// Recomputes the value from the certificate.
    fn reevaluate(&self, game: PyRef<'_, PyGame>) -> PyResult<f64> {
        self.inner.reevaluate(&game.inner).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Bound(value={}, method={})",
            self.inner.value, self.inner.method
        )
    }
}

#[pyclass(name = "Assemblage", module = "qgames_py")]
pub struct PyAssemblage {
    inner: Assemblage,
}

#[pymethods]
impl PyAssemblage {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::parse_assemblage(text)
            .map(|inner| Self { inner })
            .map_err(diag_err)
    }

    fn to_json(&self) -> String {
        io::assemblage_to_json(&self.inner)
    }

    fn member(&self, s: usize, x: usize) -> PyResult<Rows> {
        if s >= self.inner.n_s() || x >= self.inner.n_x() {
            return Err(PyValueError::new_err("member index out of range"));
        }
        Ok(to_rows(self.inner.member(s, x)))
    }

    #[getter]
    fn n_s(&self) -> usize {
        self.inner.n_s()
    }

    #[getter]
    fn n_x(&self) -> usize {
        self.inner.n_x()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn max_diff(&self, other: PyRef<'_, PyAssemblage>) -> f64 {
        self.inner.max_diff(&other.inner)
    }
}

#[pyfunction]
fn average_payoff(
    game: PyRef<'_, PyGame>,
    state: PyRef<'_, PyState>,
    strategy: PyRef<'_, PyStrategy>,
) -> PyResult<f64> {
    engine::average_payoff(&game.inner, &state.inner, &strategy.inner).map_err(err)
}

/// `μ(x,y|s,t)` as nested lists indexed `[s][t][x][y]`.
#[pyfunction]
fn outcome_distribution(
    game: PyRef<'_, PyGame>,
    state: PyRef<'_, PyState>,
    strategy: PyRef<'_, PyStrategy>,
) -> PyResult<Vec<Vec<Vec<Vec<f64>>>>> {
    engine::mu(&game.inner, &state.inner, &strategy.inner)
        .map(|d| d.nested())
        .map_err(err)
}

/// Seesaw search. Returns a dict with `value`, `strategy`, `traces`,
/// `best_restart` and `converged`.
#[pyfunction]
#[pyo3(signature = (game, state, restarts = 10, seed = 0))]
fn seesaw<'py>(
    py: Python<'py>,
    game: PyRef<'_, PyGame>,
    state: PyRef<'_, PyState>,
    restarts: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = bounds::seesaw(&game.inner, &state.inner, restarts, seed).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("value", r.value)?;
    d.set_item("strategy", PyStrategy { inner: r.strategy })?;
    d.set_item("traces", r.traces)?;
    d.set_item("best_restart", r.best_restart)?;
    d.set_item("converged", r.converged)?;
    d.set_item("seed", r.seed)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (game, cap = None))]
fn lhv_bound(game: PyRef<'_, PyGame>, cap: Option<u128>) -> PyResult<PyBound> {
    bounds::lhv_bound_capped(&game.inner, cap.unwrap_or(bounds::DEFAULT_CAP))
        .map(|inner| PyBound { inner })
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (game, cap = None))]
fn lhs_bound(game: PyRef<'_, PyGame>, cap: Option<u128>) -> PyResult<PyBound> {
    bounds::lhs_bound_capped(&game.inner, cap.unwrap_or(bounds::DEFAULT_CAP))
        .map(|inner| PyBound { inner })
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (game, restarts = 10, seed = 0))]
fn separable_bound(game: PyRef<'_, PyGame>, restarts: usize, seed: u64) -> PyResult<PyBound> {
    bounds::separable_bound(&game.inner, restarts, seed)
        .map(|inner| PyBound { inner })
        .map_err(err)
}

/// Returns a dict with `witnessed`, `seesaw_value`, `bound_value`, `margin`
/// and the best `strategy`.
#[pyfunction]
#[pyo3(signature = (game, state, bound, restarts = 10, seed = 0, margin = bounds::DEFAULT_MARGIN))]
fn witness<'py>(
    py: Python<'py>,
    game: PyRef<'_, PyGame>,
    state: PyRef<'_, PyState>,
    bound: PyRef<'_, PyBound>,
    restarts: usize,
    seed: u64,
    margin: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = SeesawOptions::new(restarts, seed);
    let r = bounds::witness_check_with(&game.inner, &state.inner, &bound.inner, &opts, margin)
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("witnessed", r.verdict == Verdict::Witnessed)?;
    d.set_item("seesaw_value", r.seesaw_value)?;
    d.set_item("bound_value", r.bound_value)?;
    d.set_item("bound_method", r.bound_method.to_string())?;
    d.set_item("margin", r.margin)?;
    d.set_item("strategy", PyStrategy { inner: r.strategy })?;
    Ok(d)
}

#[pyfunction]
fn steer(state: PyRef<'_, PyState>, povms: Vec<PyRef<'_, PyPovm>>) -> PyResult<PyAssemblage> {
    let ps: Vec<Povm> = povms.iter().map(|p| p.inner.clone()).collect();
    maps::steer_assemblage(&state.inner, &ps)
        .map(|inner| PyAssemblage { inner })
        .map_err(err)
}

/// Returns a dict whose `verdict` is `"InLhs"`, `"NotInLhs"` or
/// `"Undecided"`, plus the residual or the violated game and its gap.
#[pyfunction]
#[pyo3(signature = (assemblage, tolerance = 1e-8))]
fn lhs_membership<'py>(
    py: Python<'py>,
    assemblage: PyRef<'_, PyAssemblage>,
    tolerance: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    match maps::lhs_membership(&assemblage.inner, tolerance).map_err(err)? {
        Membership::InLhs { model, residual } => {
            d.set_item("verdict", "InLhs")?;
            d.set_item("residual", residual)?;
            d.set_item("n_hidden", model.n_hidden())?;
        }
        Membership::NotInLhs {
            game,
            value,
            bound,
            gap,
        } => {
            d.set_item("verdict", "NotInLhs")?;
            d.set_item("game", PyGame { inner: game })?;
            d.set_item("value", value)?;
            d.set_item("bound", bound)?;
            d.set_item("gap", gap)?;
        }
        Membership::Undecided {
            residual,
            iterations,
        } => {
            d.set_item("verdict", "Undecided")?;
            d.set_item("residual", residual)?;
            d.set_item("iterations", iterations)?;
        }
    }
    Ok(d)
}

/// Sends a single-system state through Bell measurement and correction.
#[pyfunction]
fn teleport(state: PyRef<'_, PyState>) -> PyResult<PyState> {
    appendixlab::teleport_identity(&state.inner)
        .map(|inner| PyState { inner })
        .map_err(err)
}

/// `(teleported, direct)` assemblages; they agree up to rounding.
#[pyfunction]
fn reconstruct_assemblage(
    state: PyRef<'_, PyState>,
    povms: Vec<PyRef<'_, PyPovm>>,
) -> PyResult<(PyAssemblage, PyAssemblage)> {
    let ps: Vec<Povm> = povms.iter().map(|p| p.inner.clone()).collect();
    let (t, d) = appendixlab::reconstruct_assemblage(&state.inner, &ps).map_err(err)?;
    Ok((PyAssemblage { inner: t }, PyAssemblage { inner: d }))
}

#[pymodule]
fn qgames_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGame>()?;
    m.add_class::<PyState>()?;
    m.add_class::<PyPovm>()?;
    m.add_class::<PyStrategy>()?;
    m.add_class::<PyBound>()?;
    m.add_class::<PyAssemblage>()?;
    m.add_function(wrap_pyfunction!(povms_from_json, m)?)?;
    m.add_function(wrap_pyfunction!(average_payoff, m)?)?;
    m.add_function(wrap_pyfunction!(outcome_distribution, m)?)?;
    m.add_function(wrap_pyfunction!(seesaw, m)?)?;
    m.add_function(wrap_pyfunction!(lhv_bound, m)?)?;
    m.add_function(wrap_pyfunction!(lhs_bound, m)?)?;
    m.add_function(wrap_pyfunction!(separable_bound, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(steer, m)?)?;
    m.add_function(wrap_pyfunction!(lhs_membership, m)?)?;
    m.add_function(wrap_pyfunction!(teleport, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_assemblage, m)?)?;
    Ok(())
}
