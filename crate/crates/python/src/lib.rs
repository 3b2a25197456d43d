use std::f64::consts::TAU;

use cqcompound_core::capacity::{self, Constellation, ConstellationOptions, EnergyMode};
use cqcompound_core::kennedy;
use cqcompound_core::verify::{self, Suite};
use cqcompound_core::{CapacityResult, CompoundSet, Dmc, GaussianChannelParams};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_error(e: cqcompound_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn result_dict<'py>(py: Python<'py>, r: &CapacityResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("value", r.value)?;
    d.set_item("optimizer", r.optimizer.as_slice().to_vec())?;
    d.set_item("worst_index", r.worst_index)?;
    d.set_item("upper_bound", r.upper_bound)?;
    d.set_item("gap", r.gap)?;
    d.set_item("iterations", r.iterations)?;
    d.set_item("stop", format!("{:?}", r.stop).to_lowercase())?;
    Ok(d)
}

/// `g(x) = (x+1) log₂(x+1) - x log₂ x`.
#[pyfunction]
fn g(x: f64) -> PyResult<f64> {
    capacity::g(x).map_err(value_error)
}

/// Compound thermal-noise capacity with `σ ∈ [a, b]`.
#[pyfunction]
fn noise_capacity(a: f64, b: f64, energy: f64) -> PyResult<f64> {
    capacity::gaussian_compound_capacity_noise(a, b, energy).map_err(value_error)
}

/// Compound phase-noise capacity.
#[pyfunction]
fn phase_capacity(sigma: f64, energy: f64) -> PyResult<f64> {
    capacity::gaussian_compound_capacity_phase(sigma, energy).map_err(value_error)
}

/// Compound attenuation capacity with attenuation in `[a, b]`.
#[pyfunction]
fn attenuation_capacity(a: f64, b: f64, sigma: f64, energy: f64) -> PyResult<f64> {
    capacity::gaussian_compound_capacity_attenuation(a, b, sigma, energy).map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (rows, tol = 1e-9))]
fn dmc_capacity<'py>(py: Python<'py>, rows: Vec<Vec<f64>>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let w = Dmc::new(rows).map_err(value_error)?;
    result_dict(py, &capacity::dmc_capacity(&w, tol).map_err(value_error)?)
}

#[pyfunction]
#[pyo3(signature = (channels, tol = 1e-9))]
fn compound_capacity<'py>(py: Python<'py>, channels: Vec<Vec<Vec<f64>>>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let channels = channels
        .into_iter()
        .enumerate()
        .map(|(s, rows)| Dmc::new(rows).map_err(|e| PyValueError::new_err(format!("channel {s}: {e}"))))
        .collect::<PyResult<Vec<_>>>()?;
    let set = CompoundSet::new(channels).map_err(value_error)?;
    result_dict(py, &capacity::compound_capacity(&set, tol).map_err(value_error)?)
}

#[pyfunction]
fn z_channel_capacity(p: f64) -> PyResult<f64> {
    kennedy::z_channel_capacity(p).map_err(value_error)
}

/// Rows `(b, cap_eta1, cap_eps, cap_compound)` on `steps` displacements in `[b_min, b_max]`.
#[pyfunction]
#[pyo3(signature = (a, eps, b_min, b_max, steps, tol = 1e-9))]
fn kennedy_sweep(a: f64, eps: f64, b_min: f64, b_max: f64, steps: usize, tol: f64) -> PyResult<Vec<(f64, f64, f64, f64)>> {
    let grid = kennedy::linear_grid(b_min, b_max, steps).map_err(value_error)?;
    let table = kennedy::displacement_sweep(a, eps, &grid, tol).map_err(value_error)?;
    Ok(table.rows.iter().map(|r| (r.b, r.cap_eta1, r.cap_eps, r.cap_compound)).collect())
}

/// Ring-constellation lower bound for thermal noise `sigma`, compound over `phase_states` rotations.
#[pyfunction]
#[pyo3(signature = (sigma, energy, dim = 60, rings = 3, phases = 8, mean_energy = false, phase_states = 1, tol = 1e-4))]
#[allow(clippy::too_many_arguments)]
fn constellation_lower_bound<'py>(
    py: Python<'py>,
    sigma: f64,
    energy: f64,
    dim: usize,
    rings: usize,
    phases: usize,
    mean_energy: bool,
    phase_states: usize,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    if phase_states == 0 {
        return Err(PyValueError::new_err("phase_states must be at least 1"));
    }
    let mode = if mean_energy { EnergyMode::Mean } else { EnergyMode::PerPoint };
    let con = Constellation::rings(energy, rings, phases, mode).map_err(value_error)?;
    let states = (0..phase_states)
        .map(|k| GaussianChannelParams::new(sigma, 1.0, TAU * k as f64 / phase_states as f64))
        .collect::<Result<Vec<_>, _>>()
        .map_err(value_error)?;
    let opts = ConstellationOptions { tol, ..ConstellationOptions::default() };
    let r = capacity::constellation_lower_bound(&states, &con, dim, opts).map_err(value_error)?;
    let d = result_dict(py, &r)?;
    d.set_item("target", capacity::gaussian_compound_capacity_phase(sigma, energy).map_err(value_error)?)?;
    Ok(d)
}

/// `(passed, failed)` counts of a verification suite.
#[pyfunction]
#[pyo3(signature = (suite, seed = 7))]
fn verify_suite(suite: &str, seed: u64) -> PyResult<(usize, usize)> {
    let suite = match suite {
        "bounds" => Suite::Bounds,
        "scaling" => Suite::Scaling,
        "limits" => Suite::Limits,
        other => return Err(PyValueError::new_err(format!("unknown suite {other:?}"))),
    };
    let report = verify::run_suite(suite, seed).map_err(value_error)?;
    Ok((report.passed, report.failed))
}

#[pymodule]
fn cqcompound(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(g, m)?)?;
    m.add_function(wrap_pyfunction!(noise_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(phase_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(attenuation_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(dmc_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(compound_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(z_channel_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(kennedy_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(constellation_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(verify_suite, m)?)?;
    Ok(())
}
