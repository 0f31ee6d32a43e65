//! Python bindings. Structured results come back as plain dicts and lists.

use gardinglab::classify;
use gardinglab::cones::{self, ShiftParams};
use gardinglab::curvature::{self, CurvatureTensor, OperatorKind, Spectrum};
use gardinglab::inclusion::{self, SamplingConfig, SearchConfig};
use gardinglab::symfun;
use gardinglab::{Error, RealVector, DEFAULT_TOL};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde::Serialize;
use serde_json::Value;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Numeric(_) | Error::Io(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    match v {
        Value::Null => Ok(py.None().into_bound(py)),
        Value::Bool(b) => b.into_bound_py_any(py),
        Value::Number(n) => match (n.as_i64(), n.as_u64()) {
            (Some(i), _) => i.into_bound_py_any(py),
            (None, Some(u)) => u.into_bound_py_any(py),
            _ => n.as_f64().unwrap_or(f64::NAN).into_bound_py_any(py),
        },
        Value::String(s) => s.into_bound_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(to_py(py, item)?)?;
            }
            Ok(list.into_any())
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, to_py(py, item)?)?;
            }
            Ok(dict.into_any())
        }
    }
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, record: &T) -> PyResult<Bound<'py, PyAny>> {
    let value = serde_json::to_value(record).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &value)
}

fn vector(values: Vec<f64>) -> PyResult<RealVector> {
    RealVector::new(values).map_err(py_err)
}

fn operator_kind(name: &str) -> PyResult<OperatorKind> {
    match name {
        "first" | "first_kind" => Ok(OperatorKind::FirstKind),
        "second" | "second_kind" => Ok(OperatorKind::SecondKind),
        "kaehler" => Ok(OperatorKind::Kaehler),
        _ => Err(PyValueError::new_err(format!("unknown operator {name:?}"))),
    }
}

/// `σ_k(v)`.
#[pyfunction]
fn elementary_symmetric(v: Vec<f64>, k: usize) -> PyResult<f64> {
    symfun::elementary_symmetric(&vector(v)?, k).map_err(py_err)
}

/// Membership of `v` in `Γ⁺_k`, or in `Γ⁺_k(α)` when `alpha` is given.
#[pyfunction]
#[pyo3(signature = (v, k, alpha = None, tol = DEFAULT_TOL))]
fn garding_membership<'py>(
    py: Python<'py>,
    v: Vec<f64>,
    k: usize,
    alpha: Option<f64>,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let v = vector(v)?;
    let m = match alpha {
        Some(a) => {
            let p = ShiftParams::new(a, v.len()).map_err(py_err)?;
            cones::in_shifted_cone(&v, k, &p, tol)
        }
        None => cones::in_garding_cone(&v, k, tol),
    }
    .map_err(py_err)?;
    to_dict(py, &m)
}

/// Membership of `v` in the m-positivity cone.
#[pyfunction]
#[pyo3(signature = (v, m, tol = DEFAULT_TOL))]
fn positivity_membership<'py>(py: Python<'py>, v: Vec<f64>, m: f64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let r = cones::in_positivity_cone_extended(&vector(v)?, m, tol).map_err(py_err)?;
    to_dict(py, &r)
}

/// `{epsilon, n, alpha_eps, m_eps}`.
#[pyfunction]
fn epsilon_params<'py>(py: Python<'py>, epsilon: f64, n: usize) -> PyResult<Bound<'py, PyAny>> {
    to_dict(py, &inclusion::epsilon_to_params(epsilon, n).map_err(py_err)?)
}

#[pyfunction]
fn epsilon_for_m(m: f64, n: usize) -> PyResult<f64> {
    inclusion::epsilon_for_target_m(m, n).map_err(py_err)
}

#[pyfunction]
fn sharp_witness(n: usize, m: usize) -> PyResult<Vec<f64>> {
    Ok(inclusion::sharp_witness(n, m).map_err(py_err)?.as_slice().to_vec())
}

/// Samples members of the shifted cone and checks each lies in `P_{m_ε}`.
#[pyfunction]
#[pyo3(signature = (n, epsilon, samples = 10_000, seed = 0, tol = DEFAULT_TOL))]
fn verify_inclusion<'py>(
    py: Python<'py>,
    n: usize,
    epsilon: f64,
    samples: usize,
    seed: u64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let config = SamplingConfig {
        tol,
        ..SamplingConfig::default()
    };
    let r = py
        .detach(|| inclusion::verify_inclusion_sampling(n, epsilon, samples, seed, &config))
        .map_err(py_err)?;
    to_dict(py, &r)
}

/// Minimizes the `m_ε` partial sum over the closed shifted cone.
#[pyfunction]
#[pyo3(signature = (n, epsilon, restarts = 32, seed = 0, tol = DEFAULT_TOL))]
fn boundary_search<'py>(
    py: Python<'py>,
    n: usize,
    epsilon: f64,
    restarts: usize,
    seed: u64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let config = SearchConfig {
        restarts,
        tol,
        ..SearchConfig::default()
    };
    let r = py
        .detach(|| inclusion::boundary_search(n, epsilon, seed, &config))
        .map_err(py_err)?;
    to_dict(py, &r)
}

/// Spectrum of a model space: `kind` is `"sphere"` (dimension `n`, curvature
/// `curvature`) or `"product"` (`S^p × S^q`).
#[pyfunction]
#[pyo3(signature = (kind, operator = "first", n = None, curvature = 1.0, p = None, q = None))]
fn model_spectrum(
    kind: &str,
    operator: &str,
    n: Option<usize>,
    curvature: f64,
    p: Option<usize>,
    q: Option<usize>,
) -> PyResult<Vec<f64>> {
    let tensor = match kind {
        "sphere" => {
            let n = n.ok_or_else(|| PyValueError::new_err("sphere needs n"))?;
            CurvatureTensor::space_form(n, curvature)
        }
        "product" => match (p, q) {
            (Some(p), Some(q)) => CurvatureTensor::product_spheres(p, q),
            _ => return Err(PyValueError::new_err("product needs p and q")),
        },
        _ => return Err(PyValueError::new_err(format!("unknown model {kind:?}"))),
    }
    .map_err(py_err)?;
    let matrix = match operator_kind(operator)? {
        OperatorKind::FirstKind => curvature::assemble_first_kind(&tensor),
        OperatorKind::SecondKind => curvature::assemble_second_kind(&tensor),
        _ => return Err(PyValueError::new_err("model spectra are first or second kind")),
    }
    .map_err(py_err)?;
    Ok(curvature::eigen_spectrum(&matrix).map_err(py_err)?.values().to_vec())
}

/// Classifies an eigenvalue list. `n` is the real dimension for first and
/// second kind operators and the complex dimension for `"kaehler"`.
#[pyfunction]
#[pyo3(signature = (values, operator, n, epsilon, tol = DEFAULT_TOL))]
fn classify_spectrum<'py>(
    py: Python<'py>,
    values: Vec<f64>,
    operator: &str,
    n: usize,
    epsilon: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let spectrum = Spectrum::new(values, operator_kind(operator)?, n).map_err(py_err)?;
    to_dict(py, &classify::classify(&spectrum, epsilon, tol).map_err(py_err)?)
}

/// Pinching thresholds for real dimension `n`, with the Kähler pair when
/// `kaehler` gives a complex dimension.
#[pyfunction]
#[pyo3(signature = (n, kaehler = None))]
fn thresholds<'py>(py: Python<'py>, n: usize, kaehler: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    to_dict(py, &classify::thresholds(n, kaehler).map_err(py_err)?)
}

#[pymodule]
fn pygardinglab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("DEFAULT_TOL", DEFAULT_TOL)?;
    m.add_function(wrap_pyfunction!(elementary_symmetric, m)?)?;
    m.add_function(wrap_pyfunction!(garding_membership, m)?)?;
    m.add_function(wrap_pyfunction!(positivity_membership, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_params, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_for_m, m)?)?;
    m.add_function(wrap_pyfunction!(sharp_witness, m)?)?;
    m.add_function(wrap_pyfunction!(verify_inclusion, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_search, m)?)?;
    m.add_function(wrap_pyfunction!(model_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(classify_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(thresholds, m)?)?;
    Ok(())
}
