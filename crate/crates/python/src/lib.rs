//! Python bindings for the resonance, Diophantine, spectral, Picard and
//! bilinear tools.
//!
//! Numbers cross the boundary as `float`, `int` and `str`; structured
//! results that have a JSON form are returned as plain dictionaries.

use std::fmt::Display;

use mbkdv::bilinear::{self, CaseId, SpikeFamily};
use mbkdv::cli::{self, CliError, RunConfig};
use mbkdv::diophantine::{self, DiophantineError};
use mbkdv::picard::{self, PicardMode};
use mbkdv::real::Real;
use mbkdv::resonance::{self, Alpha, ResonanceRoots};
use mbkdv::spectral::{self, Scheme, SimConfig};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn to_py_err(e: impl Into<CliError>) -> PyErr {
    match e.into() {
        CliError::Numerical(m) => PyArithmeticError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn value_err(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Round-trips a serializable value through `json.loads`.
fn to_py_json<'py>(py: Python<'py>, value: &impl Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Dispersion ratio; `"p/q"` strings are exact, decimals are floating.
#[pyclass(name = "Alpha", frozen)]
struct PyAlpha {
    inner: Alpha,
}

#[pymethods]
impl PyAlpha {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(|inner| Self { inner }).map_err(to_py_err)
    }

    #[getter]
    fn value(&self) -> f64 {
        self.inner.to_f64()
    }

    #[getter]
    fn is_exact(&self) -> bool {
        self.inner.is_exact()
    }

    fn roots(&self) -> PyResult<PyRoots> {
        let r = ResonanceRoots::compute(&self.inner).map_err(to_py_err)?;
        let (d1, d2) = match &r.d {
            Some((a, b)) => (Some(a.to_f64()), Some(b.to_f64())),
            None => (None, None),
        };
        Ok(PyRoots {
            c1: r.c1.to_f64(),
            c2: r.c2.to_f64(),
            d1,
            d2,
            cutoff: r.cutoff,
            c1_exact: r.c1.to_string(),
            c2_exact: r.c2.to_string(),
            c1_rational: r.c1.is_rational(),
        })
    }

    /// Nearest-integer pair and resonance gap at frequency `n`.
    fn gap(&self, n: u64) -> PyResult<PyGapRecord> {
        let r = resonance::resonance_gap_integer(&self.inner, n).map_err(to_py_err)?;
        Ok(PyGapRecord {
            n: r.n,
            nearest_c1n: r.nearest_c1n,
            nearest_c2n: r.nearest_c2n,
            theta: r.theta,
            gap: r.gap,
            signed_gap: r.gamma_at_nearest,
            expansion: r.expansion(),
        })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Alpha('{}')", self.inner)
    }
}

#[pyclass(name = "ResonanceRoots", frozen, get_all)]
struct PyRoots {
    c1: f64,
    c2: f64,
    d1: Option<f64>,
    d2: Option<f64>,
    cutoff: f64,
    c1_exact: String,
    c2_exact: String,
    c1_rational: Option<bool>,
}

#[pymethods]
impl PyRoots {
    fn __repr__(&self) -> String {
        format!("ResonanceRoots(c1={}, c2={}, cutoff={})", self.c1_exact, self.c2_exact, self.cutoff)
    }
}

#[pyclass(name = "GapRecord", frozen, get_all)]
struct PyGapRecord {
    n: u64,
    nearest_c1n: i64,
    nearest_c2n: i64,
    theta: f64,
    gap: f64,
    signed_gap: f64,
    expansion: f64,
}

#[pymethods]
impl PyGapRecord {
    fn __repr__(&self) -> String {
        format!("GapRecord(n={}, k1={}, k2={}, gap={})", self.n, self.nearest_c1n, self.nearest_c2n, self.gap)
    }
}

fn pick_root(alpha: &Alpha, root: &str) -> PyResult<Real> {
    let r = ResonanceRoots::compute(alpha).map_err(to_py_err)?;
    let d = || r.d.clone().ok_or_else(|| PyValueError::new_err("d-roots are undefined at alpha = 1"));
    match root {
        "c1" => Ok(r.c1.clone()),
        "c2" => Ok(r.c2.clone()),
        "d1" => Ok(d()?.0),
        "d2" => Ok(d()?.1),
        other => Err(PyValueError::new_err(format!("root must be c1, c2, d1 or d2, got {other:?}"))),
    }
}

/// Partial quotients `[a0, a1, ...]` of the chosen root, as decimal strings.
#[pyfunction]
#[pyo3(signature = (alpha, terms, root = "c1"))]
fn continued_fraction(alpha: &PyAlpha, terms: usize, root: &str) -> PyResult<Vec<String>> {
    let x = pick_root(&alpha.inner, root)?;
    let cf = diophantine::cf_expand(&x, terms).map_err(to_py_err)?;
    let available = cf.available_terms().unwrap_or(terms).min(terms);
    Ok((0..available).filter_map(|k| cf.term(k)).map(|t| t.to_string()).collect())
}

/// Type index estimate as a dictionary.
#[pyfunction]
#[pyo3(signature = (alpha, n_max = 10_000, root = "c1"))]
fn type_index<'py>(py: Python<'py>, alpha: &PyAlpha, n_max: u64, root: &str) -> PyResult<Bound<'py, PyAny>> {
    let x = pick_root(&alpha.inner, root)?;
    let est = diophantine::estimate_type_index(&x, n_max).map_err(to_py_err)?;
    to_py_json(py, &est)
}

/// `(n, theta_n)` along convergent denominators up to `n_max`.
#[pyfunction]
#[pyo3(signature = (alpha, n_max, root = "c1"))]
fn theta_witnesses(alpha: &PyAlpha, n_max: u64, root: &str) -> PyResult<Vec<(u64, f64)>> {
    let x = pick_root(&alpha.inner, root)?;
    match diophantine::theta_subsequence(&x, n_max) {
        Ok(ws) => Ok(ws.into_iter().map(|w| (w.n, w.theta)).collect()),
        Err(DiophantineError::XRational { .. }) => Ok(Vec::new()),
        Err(e) => Err(to_py_err(e)),
    }
}

#[pyclass(name = "TorusGrid", frozen)]
struct PyTorusGrid {
    inner: spectral::TorusGrid,
}

#[pymethods]
impl PyTorusGrid {
    #[new]
    #[pyo3(signature = (n_points, lam = 1.0))]
    fn new(n_points: usize, lam: f64) -> PyResult<Self> {
        spectral::TorusGrid::new(lam, n_points).map(|inner| Self { inner }).map_err(to_py_err)
    }

    #[getter]
    fn n_points(&self) -> usize {
        self.inner.n_points()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.length()
    }

    fn points(&self) -> Vec<f64> {
        self.inner.points()
    }

    fn wavenumbers(&self) -> Vec<f64> {
        self.inner.wavenumbers()
    }
}

/// The pair `(u, v)` stored as Fourier coefficients.
#[pyclass(name = "FieldPair")]
struct PyFieldPair {
    inner: spectral::FieldPair,
}

#[pymethods]
impl PyFieldPair {
    #[staticmethod]
    fn from_physical(grid: &PyTorusGrid, u: Vec<f64>, v: Vec<f64>) -> PyResult<Self> {
        spectral::FieldPair::from_physical(&grid.inner, &u, &v).map(|inner| Self { inner }).map_err(to_py_err)
    }

    fn to_physical(&self) -> (Vec<f64>, Vec<f64>) {
        self.inner.to_physical()
    }

    #[getter]
    fn time(&self) -> f64 {
        self.inner.time
    }

    fn max_coefficient(&self) -> f64 {
        self.inner.max_coefficient()
    }

    /// `(E1, E2, E3, E4)` on the given grid.
    fn conserved(&self, grid: &PyTorusGrid, alpha: f64) -> (f64, f64, f64, f64) {
        let c = spectral::conserved_quantities(&self.inner, &grid.inner, alpha);
        (c.e1, c.e2, c.e3, c.e4)
    }
}

/// Evolves `state` to `t_final`; returns the final state and a run summary.
#[pyfunction]
#[pyo3(signature = (grid, state, alpha, dt, t_final, scheme = "ifrk4", dealias = true, monitor_stride = 0, reduce_means = false))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    grid: &PyTorusGrid,
    state: &PyFieldPair,
    alpha: f64,
    dt: f64,
    t_final: f64,
    scheme: &str,
    dealias: bool,
    monitor_stride: usize,
    reduce_means: bool,
) -> PyResult<(PyFieldPair, Bound<'py, PyAny>)> {
    let mut cfg = SimConfig::new(alpha, dt, t_final);
    cfg.scheme = match scheme.to_ascii_lowercase().as_str() {
        "ifrk4" => Scheme::Ifrk4,
        "etdrk4" => Scheme::Etdrk4,
        other => return Err(PyValueError::new_err(format!("unknown scheme {other:?}"))),
    };
    cfg.dealias = dealias;
    cfg.monitor_stride = monitor_stride;
    cfg.reduce_means = reduce_means;
    let evo = py.detach(|| spectral::evolve(&state.inner, &grid.inner, &cfg)).map_err(to_py_err)?;
    let summary = serde_json::json!({
        "steps": evo.steps,
        "drift": evo.drift,
        "monitor": evo.monitor,
        "warnings": evo.warnings,
    });
    Ok((PyFieldPair { inner: evo.state }, to_py_json(py, &summary)?))
}

fn picard_mode(mode: &str) -> PyResult<PicardMode> {
    match mode {
        "rational" => Ok(PicardMode::RationalCase),
        "nearest" => Ok(PicardMode::NearestInteger),
        other => Err(PyValueError::new_err(format!("mode must be 'rational' or 'nearest', got {other:?}"))),
    }
}

/// Closed-form norms of the second and third Picard iterates at frequency `n`.
#[pyfunction]
#[pyo3(signature = (alpha, n, s = 0.0, t = 0.01, mode = "nearest"))]
fn picard_closed_form<'py>(py: Python<'py>, alpha: &PyAlpha, n: u64, s: f64, t: f64, mode: &str) -> PyResult<Bound<'py, PyAny>> {
    let c = picard::picard_closed_form(&alpha.inner, s, n, t, picard_mode(mode)?).map_err(to_py_err)?;
    to_py_json(py, &c)
}

/// Closed-form norms over `ns` with fitted growth exponents.
#[pyfunction]
#[pyo3(signature = (alpha, ns, s = 0.0, t = 0.01, mode = "nearest"))]
fn picard_scan<'py>(py: Python<'py>, alpha: &PyAlpha, ns: Vec<u64>, s: f64, t: f64, mode: &str) -> PyResult<Bound<'py, PyAny>> {
    let report = picard::picard_scan(&alpha.inner, s, &ns, t, picard_mode(mode)?).map_err(to_py_err)?;
    to_py_json(py, &report)
}

/// Numerically integrated iterate norms, including the resonant channel.
#[pyfunction]
#[pyo3(signature = (alpha, n, s = 0.0, t = 0.01))]
fn picard_quadrature<'py>(py: Python<'py>, alpha: &PyAlpha, n: u64, s: f64, t: f64) -> PyResult<Bound<'py, PyAny>> {
    let q = py
        .detach(|| picard::picard_quadrature(&alpha.inner, s, n, t, &picard::QuadratureOptions::default()))
        .map_err(to_py_err)?;
    to_py_json(py, &q)
}

fn spike_family(alpha: &Alpha, case: &str, n: u64) -> PyResult<SpikeFamily> {
    let family = match case {
        "rational" => SpikeFamily::rational(alpha, n),
        "low_high" => Ok(SpikeFamily::low_high(n)),
        "nearest_pair" => SpikeFamily::nearest_pair(alpha, n),
        "dual" => Ok(SpikeFamily::dual(n, n as i64 - 1)),
        "nearest_dual" => SpikeFamily::nearest_dual(alpha, n),
        "mean_break" => Ok(SpikeFamily::mean_break(n)),
        other => return Err(PyValueError::new_err(format!("unknown spike family {other:?}"))),
    };
    family.map_err(to_py_err)
}

/// Norm ratio of the bilinear form on a spike family.
#[pyfunction]
fn spike_ratio(alpha: &PyAlpha, case: &str, n: u64, s: f64, b: f64) -> PyResult<f64> {
    let family = spike_family(&alpha.inner, case, n)?;
    let weights: bilinear::WeightSpec = CaseId::weights(family.case_id, s, b);
    bilinear::spike_ratio(&alpha.inner, &weights, &family).map_err(to_py_err)
}

/// Growth slopes of the nearest-pair family over `s_grid` and the estimated threshold.
#[pyfunction]
fn threshold_scan<'py>(py: Python<'py>, alpha: &PyAlpha, b: f64, s_grid: Vec<f64>, ns: Vec<u64>) -> PyResult<Bound<'py, PyAny>> {
    let scan = bilinear::threshold_scan(&alpha.inner, b, &s_grid, &ns).map_err(to_py_err)?;
    to_py_json(py, &serde_json::json!({ "b": scan.b, "slopes": scan.slopes, "estimate": scan.estimate }))
}

/// Modulation measure near the resonance set in the annulus around `m`.
#[pyfunction]
#[pyo3(signature = (alpha, xi, m, lam = 1.0, window_constant = 1.0))]
fn omega_count<'py>(py: Python<'py>, alpha: &PyAlpha, xi: f64, m: f64, lam: f64, window_constant: f64) -> PyResult<Bound<'py, PyAny>> {
    let c = bilinear::omega_count(&alpha.inner, lam, xi, m, window_constant).map_err(to_py_err)?;
    to_py_json(py, &c)
}

/// Runs a command-line configuration given as JSON and returns its report.
#[pyfunction]
fn run_config<'py>(py: Python<'py>, config_json: &str) -> PyResult<Bound<'py, PyAny>> {
    let config = RunConfig::from_json(config_json).map_err(to_py_err)?;
    let report = py.detach(|| cli::run(&config)).map_err(to_py_err)?;
    to_py_json(py, &report)
}

#[pymodule]
fn mbkdv_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAlpha>()?;
    m.add_class::<PyRoots>()?;
    m.add_class::<PyGapRecord>()?;
    m.add_class::<PyTorusGrid>()?;
    m.add_class::<PyFieldPair>()?;
    m.add_function(wrap_pyfunction!(continued_fraction, m)?)?;
    m.add_function(wrap_pyfunction!(type_index, m)?)?;
    m.add_function(wrap_pyfunction!(theta_witnesses, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(picard_closed_form, m)?)?;
    m.add_function(wrap_pyfunction!(picard_scan, m)?)?;
    m.add_function(wrap_pyfunction!(picard_quadrature, m)?)?;
    m.add_function(wrap_pyfunction!(spike_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(threshold_scan, m)?)?;
    m.add_function(wrap_pyfunction!(omega_count, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
