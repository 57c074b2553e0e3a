//! Python bindings.
//!
//! Quaternions are 4-tuples `(q0, q1, q2, q3)`. An operator is a kind string
//! (`"H"`, `"C"` or `"R"`) plus a list of parts, each an `n x n` nested list
//! of quaternions, laid out as in the CLI matrix schema.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use quatspec_core::embed::{embed_f, embed_g, embed_h};
use quatspec_core::funcalc::{expm as core_expm, PropagatorRequest};
use quatspec_core::odes::{quadratic_roots as core_quadratic_roots, solve_ivp as core_solve_ivp, OdeProblem};
use quatspec_core::qschrod::{stationary_basis as core_stationary_basis, PhysicalParams};
use quatspec_core::spectra::{coupled_eig_r, jordan_structure as core_jordan, right_eig_c, right_eig_h};
use quatspec_core::{Error, MatrixH, Operator, OperatorKind, Quaternion, VectorH};

type Q = (f64, f64, f64, f64);
type Parts = Vec<Vec<Vec<Q>>>;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::DimensionMismatch { .. } | Error::KindMismatch { .. } | Error::InvalidInput(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn quat(q: Q) -> Quaternion {
    Quaternion::new(q.0, q.1, q.2, q.3)
}

fn tuple(q: Quaternion) -> Q {
    (q.q0, q.q1, q.q2, q.q3)
}

fn kind(s: &str) -> PyResult<OperatorKind> {
    match s {
        "H" => Ok(OperatorKind::H),
        "C" => Ok(OperatorKind::C),
        "R" => Ok(OperatorKind::R),
        _ => Err(PyValueError::new_err(format!("kind must be 'H', 'C' or 'R', got {s:?}"))),
    }
}

fn operator(k: &str, parts: Parts) -> PyResult<Operator> {
    let k = kind(k)?;
    let parts = parts
        .into_iter()
        .map(|rows| {
            let rows: Vec<Vec<Quaternion>> = rows.into_iter().map(|r| r.into_iter().map(quat).collect()).collect();
            MatrixH::from_rows(&rows)
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(to_py)?;
    Operator::from_parts(k, parts).map_err(to_py)
}

fn parts_of(op: &Operator) -> Parts {
    op.parts()
        .into_iter()
        .map(|m| m.rows().into_iter().map(|r| r.into_iter().map(tuple).collect()).collect())
        .collect()
}

fn vector(v: Vec<Q>) -> PyResult<VectorH> {
    VectorH::new(v.into_iter().map(quat).collect()).map_err(to_py)
}

fn entries(v: &VectorH) -> Vec<Q> {
    v.iter().map(|&q| tuple(q)).collect()
}

/// Hamilton product `a b`.
#[pyfunction]
fn qmul(a: Q, b: Q) -> Q {
    tuple(quat(a) * quat(b))
}

/// Complex (`H`, `C`) or real (`R`) embedding as a list of rows.
#[pyfunction]
fn embed<'py>(py: Python<'py>, kind: &str, parts: Parts) -> PyResult<Bound<'py, PyAny>> {
    let rows = match operator(kind, parts)? {
        Operator::H(m) => embed_f(&m).rows().into_pyobject(py)?.into_any(),
        Operator::C(m) => embed_g(&m).rows().into_pyobject(py)?.into_any(),
        Operator::R(m) => embed_h(&m).rows().into_pyobject(py)?.into_any(),
    };
    Ok(rows)
}

/// Right eigenpairs `(z, psi, residual)` with `M psi = psi z`.
#[pyfunction]
fn right_eig(kind: &str, parts: Parts) -> PyResult<Vec<(Complex64, Vec<Q>, f64)>> {
    let pairs = match operator(kind, parts)? {
        Operator::H(m) => right_eig_h(&m),
        Operator::C(m) => right_eig_c(&m),
        Operator::R(_) => return Err(PyValueError::new_err("right_eig takes H or C operators; use coupled_eig")),
    }
    .map_err(to_py)?;
    Ok(pairs.iter().map(|p| (p.z, entries(&p.psi), p.residual)).collect())
}

/// Coupled pairs `M psi = lambda psi - mu phi`, `M phi = lambda phi + mu psi`.
#[pyfunction]
fn coupled_eig<'py>(py: Python<'py>, kind: &str, parts: Parts) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let m = operator(kind, parts)?.to_r();
    coupled_eig_r(&m)
        .map_err(to_py)?
        .iter()
        .map(|p| {
            let d = PyDict::new(py);
            d.set_item("lambda", p.lambda)?;
            d.set_item("mu", p.mu)?;
            d.set_item("psi", entries(&p.psi))?;
            d.set_item("phi", entries(&p.phi))?;
            d.set_item("residual", p.residual)?;
            Ok(d)
        })
        .collect()
}

/// Jordan block sizes per eigenvalue, `[(z, [sizes...]), ...]`.
#[pyfunction]
fn jordan_structure(kind: &str, parts: Parts) -> PyResult<Vec<(Complex64, Vec<usize>)>> {
    let report = core_jordan(&operator(kind, parts)?).map_err(to_py)?;
    Ok(report.groups.into_iter().map(|g| (g.eigenvalue, g.blocks)).collect())
}

/// Parts of `exp(M x)`.
#[pyfunction]
fn expm(kind: &str, parts: Parts, x: f64) -> PyResult<Parts> {
    let req = PropagatorRequest {
        operator: operator(kind, parts)?,
        x,
    };
    Ok(parts_of(&core_expm(&req).map_err(to_py)?))
}

/// Roots of `q^2 = alpha q + beta` and whether they fill a sphere.
#[pyfunction]
fn quadratic_roots(alpha: Q, beta: Q) -> PyResult<(Vec<Q>, bool)> {
    let r = core_quadratic_roots(quat(alpha), quat(beta)).map_err(to_py)?;
    Ok((r.roots.into_iter().map(tuple).collect(), r.spherical))
}

/// `psi(x)` on `xs` for `psi^(n) = A_{n-1} psi^(n-1) + ... + A_0 psi`.
#[pyfunction]
fn solve_ivp(kind: &str, coefficients: Vec<Parts>, initial: Vec<Vec<Q>>, xs: Vec<f64>) -> PyResult<Vec<Vec<Q>>> {
    let coefficients = coefficients
        .into_iter()
        .map(|p| operator(kind, p))
        .collect::<PyResult<Vec<_>>>()?;
    let initial = initial.into_iter().map(vector).collect::<PyResult<Vec<_>>>()?;
    let problem = OdeProblem::new(coefficients, Some(initial)).map_err(to_py)?;
    Ok(core_solve_ivp(&problem, &xs)
        .map_err(to_py)?
        .iter()
        .map(|p| entries(&p.psi))
        .collect())
}

/// Exponents, directions and residuals of the stationary equation.
#[pyfunction]
#[pyo3(signature = (m = 0.5, hbar = 1.0, V = 0.0, W = Complex64::new(0.0, 0.0), E = 0.0))]
#[allow(non_snake_case)]
fn stationary_basis<'py>(
    py: Python<'py>,
    m: f64,
    hbar: f64,
    V: f64,
    W: Complex64,
    E: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let p = PhysicalParams { m, hbar, v: V, w: W, e: E };
    let b = core_stationary_basis(&p).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("exponents", b.exponents)?;
    d.set_item("directions", b.directions.into_iter().map(tuple).collect::<Vec<_>>())?;
    d.set_item("residuals", b.residuals)?;
    d.set_item("defective", b.defective)?;
    Ok(d)
}

#[pymodule]
fn quatspec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(qmul, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(right_eig, m)?)?;
    m.add_function(wrap_pyfunction!(coupled_eig, m)?)?;
    m.add_function(wrap_pyfunction!(jordan_structure, m)?)?;
    m.add_function(wrap_pyfunction!(expm, m)?)?;
    m.add_function(wrap_pyfunction!(quadratic_roots, m)?)?;
    m.add_function(wrap_pyfunction!(solve_ivp, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_basis, m)?)?;
    Ok(())
}
