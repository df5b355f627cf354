//! Python bindings for the `bregspec` spectral initialization library.

use bregspec::datagen::{add_noise, sample_bandlimited_truth, sample_gaussian_ensemble, NoiseModel};
use bregspec::harness::{run_experiment as run_sweep, ExperimentConfig};
use bregspec::io::{load_ensemble, parse_config_str, report_to_json, save_ensemble};
use bregspec::lifted::{forward_lifted, rip_probe, Intensities, Realization};
use bregspec::numerics::{EigenMode, EigenStrategy};
use bregspec::processing::apply_processing;
use bregspec::spectral::SolverOptions;
use bregspec::C64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(pybregspec, BregspecError, PyException, "Raised when a numerical or I/O operation fails.");

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    BregspecError::new_err(e.to_string())
}

fn intensities(y: Vec<f64>) -> PyResult<Intensities> {
    Intensities::new(y).map_err(value_err)
}

/// A complex measurement ensemble with rows `a_m`.
#[pyclass(name = "MeasurementEnsemble", module = "pybregspec", frozen)]
struct PyEnsemble {
    inner: bregspec::MeasurementEnsemble,
}

#[pymethods]
impl PyEnsemble {
    #[new]
    fn new(rows: Vec<Vec<C64>>) -> PyResult<Self> {
        let inner = bregspec::MeasurementEnsemble::from_rows(&rows).map_err(value_err)?;
        Ok(Self { inner })
    }

    /// i.i.d. complex Gaussian entries with unit variance.
    #[staticmethod]
    #[pyo3(signature = (m, n, seed = 0))]
    fn gaussian(m: usize, n: usize, seed: u64) -> PyResult<Self> {
        Ok(Self { inner: sample_gaussian_ensemble(m, n, seed).map_err(value_err)? })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(Self { inner: load_ensemble(path).map_err(runtime_err)? })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        save_ensemble(&self.inner, path).map_err(runtime_err)
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    fn rows(&self) -> Vec<Vec<C64>> {
        self.inner.rows().map(<[C64]>::to_vec).collect()
    }

    /// Intensities `|a_mᴴx|²`.
    fn forward(&self, x: Vec<C64>) -> PyResult<Vec<f64>> {
        Ok(forward_lifted(&self.inner, &x).map_err(value_err)?.into_inner())
    }

    /// Returns `(ratio_min, ratio_max, delta)` over random unit probes.
    #[pyo3(signature = (probes, seed = 0))]
    fn rip_probe(&self, probes: usize, seed: u64) -> PyResult<(f64, f64, f64)> {
        let p = rip_probe(&self.inner, probes, seed).map_err(value_err)?;
        Ok((p.ratio_min, p.ratio_max, p.delta()))
    }

    fn __repr__(&self) -> String {
        format!("MeasurementEnsemble(m={}, n={})", self.inner.m(), self.inner.n())
    }
}

/// A preprocessing method such as `"ll"` or `"is_opt:rep=sphere"`.
#[pyclass(name = "MethodSpec", module = "pybregspec", frozen, eq)]
#[derive(PartialEq)]
struct PyMethodSpec {
    inner: bregspec::MethodSpec,
}

#[pymethods]
impl PyMethodSpec {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self { inner: spec.parse().map_err(value_err)? })
    }

    #[staticmethod]
    fn all_ids() -> Vec<&'static str> {
        bregspec::MethodId::ALL.iter().map(|m| m.as_str()).collect()
    }

    #[getter]
    fn id(&self) -> &'static str {
        self.inner.id.as_str()
    }

    /// `"max"` or `"min"`: which end of the spectrum the estimate comes from.
    #[getter]
    fn eig_mode(&self) -> &'static str {
        match self.inner.eig_mode() {
            EigenMode::Max => "max",
            EigenMode::Min => "min",
        }
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("MethodSpec('{}')", self.inner)
    }
}

#[pyclass(name = "EstimateReport", module = "pybregspec", frozen)]
struct PyEstimateReport {
    inner: bregspec::EstimateReport,
}

#[pymethods]
impl PyEstimateReport {
    #[getter]
    fn method(&self) -> String {
        self.inner.method.to_string()
    }

    #[getter]
    fn estimate(&self) -> Vec<C64> {
        self.inner.estimate.as_slice().to_vec()
    }

    #[getter]
    fn eigenvalue(&self) -> f64 {
        self.inner.eigenvalue
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    #[getter]
    fn lambda0(&self) -> f64 {
        self.inner.lambda0
    }

    #[getter]
    fn gamma_hat(&self) -> Option<f64> {
        self.inner.gamma_hat
    }

    #[getter]
    fn wall_time(&self) -> f64 {
        self.inner.wall_time
    }

    #[getter]
    fn nonconverged(&self) -> bool {
        self.inner.flags.nonconverged
    }

    #[getter]
    fn degenerate(&self) -> bool {
        self.inner.flags.degenerate
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(runtime_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "EstimateReport(method='{}', eigenvalue={}, iterations={})",
            self.inner.method, self.inner.eigenvalue, self.inner.iterations
        )
    }
}

fn method_from(spec: &Bound<'_, PyAny>) -> PyResult<bregspec::MethodSpec> {
    if let Ok(m) = spec.cast::<PyMethodSpec>() {
        return Ok(m.get().inner);
    }
    spec.extract::<String>()?.parse().map_err(value_err)
}

/// Bandlimited real Gaussian truth of length `n` with `2 * band` central frequencies.
#[pyfunction]
#[pyo3(signature = (n, band, seed = 0))]
fn bandlimited_truth(n: usize, band: usize, seed: u64) -> PyResult<Vec<C64>> {
    Ok(sample_bandlimited_truth(n, band, seed).map_err(value_err)?.into_inner())
}

/// Applies `"none"`, `"awgn:<sigma>"` or `"poisson:<kappa>"` noise to intensities.
#[pyfunction]
#[pyo3(signature = (y, model, seed = 0))]
fn noisy(y: Vec<f64>, model: &str, seed: u64) -> PyResult<Vec<f64>> {
    let model: NoiseModel = model.parse().map_err(value_err)?;
    Ok(add_noise(&intensities(y)?, model, seed).map_err(value_err)?.into_inner())
}

/// Processed weights `t = T(y)` for a method.
#[pyfunction]
fn process_weights(ensemble: &PyEnsemble, y: Vec<f64>, method: &Bound<'_, PyAny>) -> PyResult<Vec<f64>> {
    let spec = method_from(method)?;
    let t = apply_processing(&spec, &intensities(y)?, &ensemble.inner).map_err(runtime_err)?;
    Ok(t.into_inner())
}

/// Spectral estimate of the signal behind intensities `y`.
#[pyfunction]
#[pyo3(signature = (ensemble, y, method, seed = 0, realization = "auto", strategy = "krylov"))]
fn estimate(
    py: Python<'_>,
    ensemble: &PyEnsemble,
    y: Vec<f64>,
    method: &Bound<'_, PyAny>,
    seed: u64,
    realization: &str,
    strategy: &str,
) -> PyResult<PyEstimateReport> {
    let spec = method_from(method)?;
    let opts = SolverOptions {
        realization: match realization {
            "auto" => Realization::Auto,
            "dense" => Realization::Dense,
            "matrix-free" => Realization::MatrixFree,
            other => return Err(value_err(format!("unknown realization `{other}`"))),
        },
        strategy: match strategy {
            "krylov" => EigenStrategy::Krylov,
            "shifted-power" => EigenStrategy::ShiftedPower,
            other => return Err(value_err(format!("unknown strategy `{other}`"))),
        },
        seed,
        ..SolverOptions::default()
    };
    let y = intensities(y)?;
    let inner = py.detach(|| bregspec::estimate(&ensemble.inner, &y, &spec, &opts)).map_err(runtime_err)?;
    Ok(PyEstimateReport { inner })
}

/// `|⟨x, x̂⟩| / ‖x‖` for a unit-norm estimate `x̂`.
#[pyfunction]
fn correlation(x: Vec<C64>, xhat: Vec<C64>) -> PyResult<f64> {
    bregspec::correlation(&x, &xhat).map_err(value_err)
}

/// Runs a sweep from `key = value` config text and returns the JSON report.
#[pyfunction]
fn run_experiment(py: Python<'_>, config: &str) -> PyResult<String> {
    let cfg: ExperimentConfig = parse_config_str(config).map_err(value_err)?;
    let report = py.detach(|| run_sweep(&cfg)).map_err(runtime_err)?;
    report_to_json(&report).map_err(runtime_err)
}

#[pymodule]
fn pybregspec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BregspecError", m.py().get_type::<BregspecError>())?;
    m.add_class::<PyEnsemble>()?;
    m.add_class::<PyMethodSpec>()?;
    m.add_class::<PyEstimateReport>()?;
    m.add_function(wrap_pyfunction!(bandlimited_truth, m)?)?;
    m.add_function(wrap_pyfunction!(noisy, m)?)?;
    m.add_function(wrap_pyfunction!(process_weights, m)?)?;
    m.add_function(wrap_pyfunction!(estimate, m)?)?;
    m.add_function(wrap_pyfunction!(correlation, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
