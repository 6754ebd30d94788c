//! Python bindings for hardylab.
//!
//! Results cross the boundary as plain dicts built from the same JSON the CLI emits, so the
//! Python side sees identical field names.

use hardylab::batch::{parse_config, render_json, run, Selection};
use hardylab::catalog::{evaluate_sides, sharp_constant, validate, Family, InequalityInstance, Params};
use hardylab::model::{HomogeneousSetting, RadialProfile};
use hardylab::sharpness::{self, natural_family};
use hardylab::transforms::{crit_subcrit_identity_check, CritSubcritContext};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py(py: Python<'_>, json: &str) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (json,))?.unbind())
}

fn serialize(py: Python<'_>, value: &impl serde::Serialize) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(value_err)?;
    to_py(py, &text)
}

fn params_from(dict: Option<&Bound<'_, PyDict>>) -> PyResult<Params> {
    let mut map = serde_json::Map::new();
    if let Some(d) = dict {
        for (k, v) in d.iter() {
            let key: String = k.extract()?;
            let val: f64 = v.extract()?;
            map.insert(key, serde_json::json!(val));
        }
    }
    serde_json::from_value(serde_json::Value::Object(map)).map_err(value_err)
}

fn setting(q: f64, sigma: f64) -> PyResult<HomogeneousSetting> {
    HomogeneousSetting::with_sigma(q, sigma).map_err(value_err)
}

fn instance(family: &str, q: f64, params: Option<&Bound<'_, PyDict>>, sigma: f64) -> PyResult<InequalityInstance> {
    let family: Family = family.parse().map_err(value_err)?;
    InequalityInstance::new(family, params_from(params)?, setting(q, sigma)?).map_err(value_err)
}

/// Sharp constant of the fractional remainder inequality for exponent `p >= 2`.
#[pyfunction]
fn frs_constant(p: f64) -> PyResult<f64> {
    sharpness::frs_constant(p).map_err(value_err)
}

/// Names of all inequality families, in catalog order.
#[pyfunction]
fn families() -> Vec<&'static str> {
    Family::ALL.iter().map(|f| f.name()).collect()
}

#[pyfunction]
#[pyo3(signature = (family, q, params=None, sigma=1.0))]
fn check_admissible(
    py: Python<'_>,
    family: &str,
    q: f64,
    params: Option<&Bound<'_, PyDict>>,
    sigma: f64,
) -> PyResult<Py<PyAny>> {
    let family: Family = family.parse().map_err(value_err)?;
    let verdict = validate(family, &params_from(params)?, &setting(q, sigma)?);
    serialize(py, &verdict)
}

#[pyfunction]
#[pyo3(signature = (family, q, params=None, sigma=1.0))]
fn constant(
    py: Python<'_>,
    family: &str,
    q: f64,
    params: Option<&Bound<'_, PyDict>>,
    sigma: f64,
) -> PyResult<Py<PyAny>> {
    let inst = instance(family, q, params, sigma)?;
    serialize(py, &sharp_constant(&inst))
}

/// Evaluates both sides of an inequality on a profile given in the text syntax.
#[pyfunction]
#[pyo3(signature = (family, q, profile, params=None, sigma=1.0))]
fn evaluate(
    py: Python<'_>,
    family: &str,
    q: f64,
    profile: &str,
    params: Option<&Bound<'_, PyDict>>,
    sigma: f64,
) -> PyResult<Py<PyAny>> {
    let inst = instance(family, q, params, sigma)?;
    let f = RadialProfile::parse(profile).map_err(value_err)?;
    let report = py.detach(|| evaluate_sides(&inst, &f)).map_err(value_err)?;
    serialize(py, &report)
}

/// Runs the family's natural extremizing sequence at the given indices.
#[pyfunction]
#[pyo3(signature = (family, q, indices, params=None, sigma=1.0))]
fn probe(
    py: Python<'_>,
    family: &str,
    q: f64,
    indices: Vec<f64>,
    params: Option<&Bound<'_, PyDict>>,
    sigma: f64,
) -> PyResult<Py<PyAny>> {
    let inst = instance(family, q, params, sigma)?;
    let fam = natural_family(&inst).map_err(value_err)?;
    let result = py.detach(|| sharpness::probe(&inst, &fam, &indices)).map_err(value_err)?;
    serialize(py, &result)
}

#[pyfunction]
#[pyo3(signature = (profile, q, m, big_r, sigma_q=1.0, sigma_m=1.0, gap_tol=1e-8))]
#[allow(clippy::too_many_arguments)]
fn crit_subcrit_check(
    py: Python<'_>,
    profile: &str,
    q: f64,
    m: f64,
    big_r: f64,
    sigma_q: f64,
    sigma_m: f64,
    gap_tol: f64,
) -> PyResult<Py<PyAny>> {
    let g = RadialProfile::parse(profile).map_err(value_err)?;
    let ctx = CritSubcritContext::new(q, m, big_r, sigma_q, sigma_m).map_err(value_err)?;
    let report = py.detach(|| crit_subcrit_identity_check(&g, &ctx, gap_tol)).map_err(value_err)?;
    serialize(py, &report)
}

/// Runs a TOML batch configuration and returns the report.
#[pyfunction]
#[pyo3(signature = (text, selection="all"))]
fn run_config(py: Python<'_>, text: &str, selection: &str) -> PyResult<Py<PyAny>> {
    let selection = match selection {
        "validate" => Selection::Validate,
        "verify" => Selection::Verify,
        "probe" => Selection::Probe,
        "all" => Selection::All,
        other => return Err(PyValueError::new_err(format!("unknown selection '{other}'"))),
    };
    let config = parse_config(text).map_err(value_err)?;
    let json = py.detach(|| render_json(&run(&config, text, selection))).map_err(value_err)?;
    to_py(py, &json)
}

#[pymodule]
fn hardylab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(frs_constant, m)?)?;
    m.add_function(wrap_pyfunction!(families, m)?)?;
    m.add_function(wrap_pyfunction!(check_admissible, m)?)?;
    m.add_function(wrap_pyfunction!(constant, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(probe, m)?)?;
    m.add_function(wrap_pyfunction!(crit_subcrit_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
