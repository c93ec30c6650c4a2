//! Python bindings. Reports come back as plain dicts (decoded from the same
//! JSON the command-line tool writes).

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use sfcsim::channels::{self, AnchorSet};
use sfcsim::error::SimError;
use sfcsim::geometry::{self, CellId, Vec2};
use sfcsim::harness::{self, S3Mode};
use sfcsim::rng;
use sfcsim::semantics::SchemeId;

fn sim_err(e: SimError) -> PyErr {
    if e.is_validation() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_scheme(s: &str) -> PyResult<SchemeId> {
    s.parse().map_err(value_err)
}

/// Rectangular arena split into a grid of cells.
#[pyclass(name = "Arena", frozen)]
struct PyArena(geometry::Arena);

#[pymethods]
impl PyArena {
    #[new]
    #[pyo3(signature = (width=60.0, height=60.0, rows=3, cols=3))]
    fn new(width: f64, height: f64, rows: usize, cols: usize) -> PyResult<Self> {
        geometry::Arena::new(width, height, rows, cols)
            .map(PyArena)
            .map_err(value_err)
    }

    #[getter]
    fn cell_count(&self) -> usize {
        self.0.cell_count()
    }

    /// `(row, col)` of the cell holding `(x, y)`, or `None` outside the arena.
    fn cell_of(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        self.0.cell_of(Vec2::new(x, y)).map(|c| (c.row, c.col))
    }

    fn cell_center(&self, row: usize, col: usize) -> PyResult<(f64, f64)> {
        let cell = CellId { row, col };
        if !self.0.is_valid_cell(cell) {
            return Err(PyValueError::new_err(format!("no cell ({row}, {col})")));
        }
        let c = self.0.cell_center(cell);
        Ok((c.x, c.y))
    }

    fn contains(&self, row: usize, col: usize, x: f64, y: f64) -> bool {
        self.0.contains(CellId { row, col }, Vec2::new(x, y))
    }

    fn __repr__(&self) -> String {
        format!(
            "Arena(width={}, height={}, rows={}, cols={})",
            self.0.width, self.0.height, self.0.rows, self.0.cols
        )
    }
}

/// Simulation configuration. Build from defaults or TOML, tweak, then run.
#[pyclass(name = "SimConfig")]
struct PySimConfig(harness::SimConfig);

#[pymethods]
impl PySimConfig {
    #[new]
    #[pyo3(signature = (scheme="s2"))]
    fn new(scheme: &str) -> PyResult<Self> {
        Ok(PySimConfig(harness::SimConfig::new(parse_scheme(scheme)?)))
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        harness::SimConfig::from_toml_str(text)
            .map(PySimConfig)
            .map_err(value_err)
    }

    fn to_toml(&self) -> PyResult<String> {
        self.0.to_toml_string().map_err(value_err)
    }

    fn validate(&self) -> PyResult<()> {
        self.0.validate().map_err(value_err)
    }

    #[getter]
    fn scheme(&self) -> &'static str {
        self.0.scheme.as_str()
    }
    #[setter]
    fn set_scheme(&mut self, scheme: &str) -> PyResult<()> {
        self.0.scheme = parse_scheme(scheme)?;
        Ok(())
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }
    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.0.seed = seed;
    }

    #[getter]
    fn horizon_slots(&self) -> u64 {
        self.0.horizon_slots
    }
    #[setter]
    fn set_horizon_slots(&mut self, slots: u64) {
        self.0.horizon_slots = slots;
    }

    #[getter]
    fn replications(&self) -> usize {
        self.0.replications
    }
    #[setter]
    fn set_replications(&mut self, n: usize) {
        self.0.replications = n;
    }

    #[getter]
    fn step_len(&self) -> f64 {
        self.0.walk.step_len
    }
    #[setter]
    fn set_step_len(&mut self, step: f64) {
        self.0.walk.step_len = step;
    }

    #[getter]
    fn p_fp(&self) -> f64 {
        self.0.s2.p_fp
    }
    #[setter]
    fn set_p_fp(&mut self, p: f64) {
        self.0.s2.p_fp = p;
    }

    #[getter]
    fn s3_mode(&self) -> &'static str {
        match self.0.s3.mode {
            S3Mode::Abstract => "abstract",
            S3Mode::Explicit => "explicit",
        }
    }
    #[setter]
    fn set_s3_mode(&mut self, mode: &str) -> PyResult<()> {
        self.0.s3.mode = match mode {
            "abstract" => S3Mode::Abstract,
            "explicit" => S3Mode::Explicit,
            other => return Err(PyValueError::new_err(format!("unknown s3 mode {other:?}"))),
        };
        Ok(())
    }

    fn __repr__(&self) -> String {
        format!(
            "SimConfig(scheme={:?}, seed={}, horizon_slots={})",
            self.0.scheme.as_str(),
            self.0.seed,
            self.0.horizon_slots
        )
    }
}

/// Runs replication 0 and returns its metrics report.
#[pyfunction]
fn run<'py>(py: Python<'py>, config: &PySimConfig) -> PyResult<Bound<'py, PyAny>> {
    let cfg = config.0.clone();
    let artifacts = py.detach(|| harness::run(&cfg)).map_err(sim_err)?;
    to_py(py, &artifacts.report)
}

/// Runs `n` replications (default: the config's count) and returns the pooled report.
#[pyfunction]
#[pyo3(signature = (config, n=None))]
fn replicate<'py>(
    py: Python<'py>,
    config: &PySimConfig,
    n: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = config.0.clone();
    let n = n.unwrap_or(cfg.replications);
    let rep = py.detach(|| harness::replicate(&cfg, n)).map_err(sim_err)?;
    to_py(py, &rep.pooled)
}

/// Fits the walk step length to a target event rate; returns the calibration record.
#[pyfunction]
#[pyo3(signature = (config, target=0.0577, tol=0.05))]
fn calibrate<'py>(
    py: Python<'py>,
    config: &PySimConfig,
    target: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let cfg = config.0.clone();
    let cal = py
        .detach(|| harness::calibrate(&cfg, target, tol))
        .map_err(sim_err)?;
    to_py(py, &cal)
}

/// Position from distances to three anchors (default anchors when omitted).
#[pyfunction]
#[pyo3(signature = (distances, anchors=None))]
fn trilaterate(distances: [f64; 3], anchors: Option<[[f64; 2]; 3]>) -> PyResult<(f64, f64)> {
    let set = match anchors {
        Some(a) => AnchorSet::new(a.map(|[x, y]| Vec2::new(x, y))).map_err(value_err)?,
        None => AnchorSet::default(),
    };
    let p = channels::trilaterate(&set, distances).map_err(value_err)?;
    Ok((p.x, p.y))
}

/// `(anchor, drone)` served in TDMA slot `k`.
#[pyfunction]
fn tdma_slot(k: u64) -> (usize, usize) {
    let s = channels::tdma_slot(k);
    (s.anchor, s.drone)
}

/// `n` seeded detection-delay samples, seconds.
#[pyfunction]
#[pyo3(signature = (n, seed=1, slot_seconds=0.1, proc_delay=0.0))]
fn detection_delays(n: usize, seed: u64, slot_seconds: f64, proc_delay: f64) -> Vec<f64> {
    let mut r = rng::stream(seed, rng::labels::S3_DELAY, 0);
    (0..n)
        .map(|_| channels::detection_delay_sample(slot_seconds, proc_delay, &mut r))
        .collect()
}

/// Least energy per slot for `bits` over an AWGN channel.
#[pyfunction]
fn shannon_min_energy(
    bits: f64,
    slot_seconds: f64,
    bandwidth: f64,
    noise_psd: f64,
) -> PyResult<f64> {
    sfcsim::metrics::shannon_min_energy(bits, slot_seconds, bandwidth, noise_psd).map_err(value_err)
}

#[pymodule]
fn sfcsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyArena>()?;
    m.add_class::<PySimConfig>()?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(replicate, m)?)?;
    m.add_function(wrap_pyfunction!(calibrate, m)?)?;
    m.add_function(wrap_pyfunction!(trilaterate, m)?)?;
    m.add_function(wrap_pyfunction!(tdma_slot, m)?)?;
    m.add_function(wrap_pyfunction!(detection_delays, m)?)?;
    m.add_function(wrap_pyfunction!(shannon_min_energy, m)?)?;
    Ok(())
}
