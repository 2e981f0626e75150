//! Python bindings. Documents go in and reports come out as JSON strings,
//! using the same formats as the command-line tool.

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use heckelab::document::{blocks_to_json, parse_document, parse_expecting, Document, Kind};
use heckelab::exact_algebra::format_rational;
use heckelab::p1_bundle::splitting_from_h0;
use heckelab::suites::{run_suite, Suite};
use heckelab::{Error, HNProfile, P1Transition};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InsufficientJetOrder { .. } | Error::NotInvertible => {
            PyArithmeticError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn restricted(document: &str) -> PyResult<P1Transition> {
    match parse_expecting(document, &[Kind::P1Transition, Kind::BlowupBundle]).map_err(to_py)? {
        Document::P1Transition(t) => Ok(t),
        Document::BlowupBundle(b, _) => Ok(b.restrict_to_d()),
        Document::HnProfile(_) => unreachable!("kind checked"),
    }
}

fn profile(document: &str) -> PyResult<HNProfile> {
    match parse_expecting(document, &[Kind::HnProfile]).map_err(to_py)? {
        Document::HnProfile(p) => Ok(p),
        _ => unreachable!("kind checked"),
    }
}

/// Splitting exponents of the restriction to the divisor, highest first.
#[pyfunction]
fn splitting(document: &str) -> PyResult<Vec<i64>> {
    Ok(restricted(document)?.splitting_type().exponents().to_vec())
}

/// Splitting exponents recovered from the h0 staircase.
#[pyfunction]
fn splitting_from_sections(document: &str) -> PyResult<Vec<i64>> {
    Ok(splitting_from_h0(&restricted(document)?)
        .exponents()
        .to_vec())
}

/// `dim H0(E|_D (d))`.
#[pyfunction]
#[pyo3(signature = (document, d=0))]
fn h0(document: &str, d: i64) -> PyResult<usize> {
    Ok(restricted(document)?.h0(d))
}

/// Runs the optimizer; returns `(phi_trace, final_splitting)`.
#[pyfunction]
fn optimize(document: &str) -> PyResult<(Vec<i64>, Vec<i64>)> {
    let Document::BlowupBundle(b, _) =
        parse_expecting(document, &[Kind::BlowupBundle]).map_err(to_py)?
    else {
        unreachable!("kind checked")
    };
    let (last, trace) = b.optimize().map_err(|e| to_py(e.error))?;
    let phis = if trace.is_empty() {
        vec![b.phi()]
    } else {
        trace.phi_sequence()
    };
    Ok((phis, last.splitting().exponents().to_vec()))
}

/// `phi` of a profile as a `"p/q"` string.
#[pyfunction]
fn profile_phi(document: &str) -> PyResult<String> {
    Ok(format_rational(&profile(document)?.phi()))
}

/// `gr_tilde` of a profile, as a JSON array of blocks.
#[pyfunction]
fn gr_tilde(document: &str) -> PyResult<String> {
    Ok(blocks_to_json(&profile(document)?.gr_tilde()).to_string())
}

#[pyfunction]
fn equivalent(a: &str, b: &str) -> PyResult<bool> {
    Ok(profile(a)?.equivalent(&profile(b)?))
}

/// Re-serializes a document in canonical form.
#[pyfunction]
fn canonicalize(document: &str) -> PyResult<String> {
    Ok(parse_document(document).map_err(to_py)?.to_string_pretty())
}

/// Runs a property suite and returns the JSON report.
#[pyfunction]
#[pyo3(signature = (suite, count=100, seed=0))]
fn verify(suite: &str, count: u64, seed: u64) -> PyResult<String> {
    let suite = Suite::from_name(suite)
        .ok_or_else(|| PyValueError::new_err(format!("unknown suite {suite:?}")))?;
    serde_json::to_string(&run_suite(suite, count, seed))
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

#[pymodule]
pub fn heckelab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(splitting, m)?)?;
    m.add_function(wrap_pyfunction!(splitting_from_sections, m)?)?;
    m.add_function(wrap_pyfunction!(h0, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(profile_phi, m)?)?;
    m.add_function(wrap_pyfunction!(gr_tilde, m)?)?;
    m.add_function(wrap_pyfunction!(equivalent, m)?)?;
    m.add_function(wrap_pyfunction!(canonicalize, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
