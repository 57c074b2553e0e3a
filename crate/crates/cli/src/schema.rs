//! JSON encodings of quaternions, vectors and operators.
//!
//! Quaternions are 4-arrays `[q0, q1, q2, q3]`, complex numbers 2-arrays
//! `[re, im]`. An operator is `{"kind", "n", "parts"}` where each part is an
//! `n x n` array of quaternion rows: one part for `H`, two (`m0`, `m1`) for
//! `C`, four (`M0..M3`, coefficients of `R_0..R_3`) for `R`.

use num_complex::Complex64;
use quatspec::dense::{ComplexMatrix, RealMatrix};
use quatspec::{MatrixH, Operator, OperatorKind, Quaternion, VectorH};
use serde_json::{json, Value};

use crate::CliError;

pub fn quat(q: Quaternion) -> Value {
    json!(q.to_array())
}

pub fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn vector(v: &VectorH) -> Value {
    Value::Array(v.iter().map(|&q| quat(q)).collect())
}

pub fn operator(op: &Operator) -> Value {
    let parts: Vec<Value> = op
        .parts()
        .into_iter()
        .map(|m| Value::Array(m.rows().iter().map(|r| Value::Array(r.iter().map(|&q| quat(q)).collect())).collect()))
        .collect();
    json!({"kind": op.kind().tag(), "n": op.dim(), "parts": parts})
}

pub fn real_matrix(m: &RealMatrix) -> Value {
    json!(m.rows())
}

pub fn complex_matrix(m: &ComplexMatrix) -> Value {
    Value::Array(
        m.rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(|&z| complex(z)).collect()))
            .collect(),
    )
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::validation(msg)
}

pub fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value, CliError> {
    v.get(key).ok_or_else(|| invalid(format!("missing field \"{key}\"")))
}

pub fn number(v: &Value, what: &str) -> Result<f64, CliError> {
    let x = v.as_f64().ok_or_else(|| invalid(format!("{what} must be a number")))?;
    if !x.is_finite() {
        return Err(invalid(format!("{what} must be finite")));
    }
    Ok(x)
}

pub fn count(v: &Value, what: &str) -> Result<usize, CliError> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| invalid(format!("{what} must be a non-negative integer")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>, CliError> {
    v.as_array().ok_or_else(|| invalid(format!("{what} must be an array")))
}

fn numbers(v: &Value, len: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let a = array(v, what)?;
    if a.len() != len {
        return Err(invalid(format!("{what} must have {len} entries, got {}", a.len())));
    }
    a.iter().map(|x| number(x, what)).collect()
}

pub fn parse_quat(v: &Value, what: &str) -> Result<Quaternion, CliError> {
    let a = numbers(v, 4, what)?;
    Ok(Quaternion::new(a[0], a[1], a[2], a[3]))
}

pub fn parse_complex(v: &Value, what: &str) -> Result<Complex64, CliError> {
    let a = numbers(v, 2, what)?;
    Ok(Complex64::new(a[0], a[1]))
}

pub fn parse_vector(v: &Value, what: &str) -> Result<VectorH, CliError> {
    let entries = array(v, what)?
        .iter()
        .map(|q| parse_quat(q, what))
        .collect::<Result<Vec<_>, _>>()?;
    if entries.is_empty() {
        return Err(invalid(format!("{what} must not be empty")));
    }
    Ok(VectorH::new(entries)?)
}

pub fn parse_kind(v: &Value) -> Result<OperatorKind, CliError> {
    match v.as_str() {
        Some("H") => Ok(OperatorKind::H),
        Some("C") => Ok(OperatorKind::C),
        Some("R") => Ok(OperatorKind::R),
        _ => Err(invalid(format!("kind must be \"H\", \"C\" or \"R\", got {v}"))),
    }
}

pub fn parse_operator(v: &Value) -> Result<Operator, CliError> {
    if !v.is_object() {
        return Err(invalid("matrix must be an object with kind, n and parts"));
    }
    let kind = parse_kind(field(v, "kind")?)?;
    let n = count(field(v, "n")?, "n")?;
    if n == 0 {
        return Err(invalid("n must be at least 1"));
    }
    let parts = array(field(v, "parts")?, "parts")?;
    if parts.len() != kind.parts() {
        return Err(invalid(format!(
            "kind {} needs {} parts, got {}",
            kind.tag(),
            kind.parts(),
            parts.len()
        )));
    }
    let parts = parts
        .iter()
        .enumerate()
        .map(|(p, rows)| {
            let rows = array(rows, "part")?;
            if rows.len() != n {
                return Err(invalid(format!("part {p} has {} rows, expected {n}", rows.len())));
            }
            let rows = rows
                .iter()
                .map(|r| {
                    let r = array(r, "row")?;
                    if r.len() != n {
                        return Err(invalid(format!("part {p} has a row of length {}, expected {n}", r.len())));
                    }
                    r.iter().map(|q| parse_quat(q, "matrix entry")).collect()
                })
                .collect::<Result<Vec<Vec<Quaternion>>, CliError>>()?;
            Ok(MatrixH::from_rows(&rows)?)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Operator::from_parts(kind, parts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use quatspec::{MatrixC, MatrixR};

    #[test]
    fn operator_round_trip() {
        let m = MatrixH::from_fn(2, |i, j| Quaternion::new(i as f64, j as f64, 0.5, -1.0));
        for op in [
            Operator::H(m.clone()),
            Operator::C(MatrixC::new(m.clone(), m.scale(2.0)).unwrap()),
            Operator::R(MatrixR::right_unit(2, 3)),
        ] {
            assert_eq!(parse_operator(&operator(&op)).unwrap(), op);
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        let bad = [
            json!({"kind": "X", "n": 1, "parts": [[[[0, 0, 0, 0]]]]}),
            json!({"kind": "C", "n": 1, "parts": [[[[0, 0, 0, 0]]]]}),
            json!({"kind": "H", "n": 2, "parts": [[[[0, 0, 0, 0]]]]}),
            json!({"kind": "H", "n": 1, "parts": [[[[0, 0, 0]]]]}),
            json!({"kind": "H", "n": 0, "parts": [[]]}),
            json!([1, 2]),
        ];
        for b in bad {
            assert_eq!(parse_operator(&b).unwrap_err().status.code(), 2, "{b}");
        }
    }
}
