//! Residual definitions shared by the solver commands and `verify`.
//!
//! Everything here uses operator application, products and norms only; no
//! eigensolver is involved, so a result file can be checked independently
//! of how it was produced.

use num_complex::Complex64;
use quatspec::dense::RealMatrix;
use quatspec::embed::{embed_f, embed_g, embed_h};
use quatspec::odes::Exponent;
use quatspec::qschrod::{stationary_residual, PhysicalParams};
use quatspec::spectra::Tolerances;
use quatspec::{MatrixH, MatrixR, Operator, Quaternion, VectorH};
use serde_json::{json, Map, Value};

use crate::commands::{parse_ode, parse_params, polynomial_coefficients};
use crate::output::{self, content_hash, HASH_KEY};
use crate::schema::{self, field, number, parse_complex, parse_operator, parse_quat, parse_vector};
use crate::{CliError, Command, JobOutput, Status, ToleranceOverrides};

fn rel(r: f64, scale: f64) -> f64 {
    if r == 0.0 {
        0.0
    } else {
        r / scale.max(f64::MIN_POSITIVE)
    }
}

/// `||M psi - psi z|| / (||M|| ||psi||)`.
pub fn right_residual(op: &Operator, psi: &VectorH, z: Complex64) -> f64 {
    match op.apply(psi) {
        Ok(mp) => rel(mp.sub(&psi.mul_right(Quaternion::from_complex(z))).norm(), op.norm() * psi.norm()),
        Err(_) => f64::INFINITY,
    }
}

/// Both coupled equations, relative to `||M|| (||psi|| + ||phi||)`.
pub fn coupled_residuals(m: &MatrixR, lambda: f64, mu: f64, psi: &VectorH, phi: &VectorH) -> (f64, f64) {
    let op = Operator::R(m.clone());
    let (Ok(mpsi), Ok(mphi)) = (op.apply(psi), op.apply(phi)) else {
        return (f64::INFINITY, f64::INFINITY);
    };
    let scale = m.fro_norm() * (psi.norm() + phi.norm());
    let r1 = mpsi.sub(&psi.scale(lambda).sub(&phi.scale(mu))).norm();
    let r2 = mphi.sub(&phi.scale(lambda).add(&psi.scale(mu))).norm();
    (rel(r1, scale), rel(r2, scale))
}

fn h_diff(a: &MatrixH, b: &MatrixH) -> f64 {
    a.sub(b).map(|d| d.fro_norm()).unwrap_or(f64::INFINITY)
}

/// `||M S - S D|| / (||M|| ||S||)`.
pub fn diagonal_residual(m: &MatrixH, s: &MatrixH, d: &MatrixH) -> f64 {
    match (m.mul(s), s.mul(d)) {
        (Ok(ms), Ok(sd)) => rel(h_diff(&ms, &sd), m.fro_norm() * s.fro_norm()),
        _ => f64::INFINITY,
    }
}

/// Similarity `M U = U T`, unitarity of `U`, and the part of `T` below the diagonal.
pub fn triangular_residuals(m: &MatrixH, u: &MatrixH, t: &MatrixH) -> Value {
    let similarity = match (m.mul(u), u.mul(t)) {
        (Ok(mu), Ok(ut)) => rel(h_diff(&mu, &ut), m.fro_norm()),
        _ => f64::INFINITY,
    };
    let unitarity = u
        .adjoint()
        .mul(u)
        .map(|g| h_diff(&g, &MatrixH::identity(u.dim())))
        .unwrap_or(f64::INFINITY);
    let n = t.dim();
    let below: f64 = (0..n)
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .map(|(i, j)| t[(i, j)].norm_sqr())
        .sum::<f64>()
        .sqrt();
    json!({"similarity": similarity, "unitarity": unitarity, "lower": rel(below, m.fro_norm())})
}

fn block_index(blocks: &[(usize, usize)], i: usize) -> Option<usize> {
    blocks.iter().position(|&(s, n)| i >= s && i < s + n)
}

/// `O A = (D + N) O`, `O O^-1 = 1`, and the block pattern of `D` and `N`.
pub fn pseudo_triangular_residuals(
    a: &RealMatrix,
    o: &RealMatrix,
    o_inv: &RealMatrix,
    d: &RealMatrix,
    n: &RealMatrix,
    blocks: &[(usize, usize)],
) -> Value {
    let dim = a.dim();
    let shapes_ok = [o, o_inv, d, n].iter().all(|m| m.dim() == dim);
    let covered = blocks.iter().map(|b| b.1).sum::<usize>() == dim;
    if !shapes_ok || !covered {
        return json!({"similarity": f64::INFINITY, "inverse": f64::INFINITY, "structure": f64::INFINITY});
    }
    let j = d + n;
    let similarity = rel((&o.matmul(a) - &j.matmul(o)).fro_norm(), a.fro_norm() * o.fro_norm());
    let inverse = rel(
        (&o.matmul(o_inv) - &RealMatrix::identity(dim)).fro_norm(),
        o.fro_norm() * o_inv.fro_norm(),
    );
    let mut stray = 0.0;
    for r in 0..dim {
        for c in 0..dim {
            let (br, bc) = (block_index(blocks, r), block_index(blocks, c));
            if br != bc {
                stray += d[(r, c)] * d[(r, c)];
            }
            if br >= bc {
                stray += n[(r, c)] * n[(r, c)];
            }
        }
    }
    json!({"similarity": similarity, "inverse": inverse, "structure": rel(stray.sqrt(), a.fro_norm())})
}

/// `P(x) P(-x) = 1` and `M P = P M`.
pub fn expm_residuals(m: &Operator, p: &Operator, q: &Operator) -> Value {
    let diff = |a: &Operator, b: &Operator| a.add(&b.scale(-1.0)).map(|d| d.norm()).unwrap_or(f64::INFINITY);
    let inverse = p
        .mul(q)
        .map(|pq| rel(diff(&pq, &Operator::identity(m.kind(), m.dim())), p.norm() * q.norm()))
        .unwrap_or(f64::INFINITY);
    let commutator = match (m.mul(p), p.mul(m)) {
        (Ok(mp), Ok(pm)) => rel(diff(&mp, &pm), m.norm() * p.norm()),
        _ => f64::INFINITY,
    };
    json!({"inverse": inverse, "commutator": commutator})
}

/// `|q^n - sum a_k q^k|` scaled by `(1 + sum |a_k|) max(1, |q|)^n`.
pub fn polynomial_residual(coeffs: &[Quaternion], q: Quaternion) -> f64 {
    let n = coeffs.len();
    let mut powers = vec![Quaternion::ONE];
    for k in 1..=n {
        powers.push(powers[k - 1] * q);
    }
    let mut r = powers[n];
    for (i, &a) in coeffs.iter().enumerate() {
        r -= a * powers[n - 1 - i];
    }
    let scale = (1.0 + coeffs.iter().map(|a| a.norm()).sum::<f64>()) * q.norm().max(1.0).powi(n as i32);
    rel(r.norm(), scale)
}

/// Substitutes an exponential solution into `psi^(n) = sum A_k psi^(k)` at `x = 0`.
pub fn ode_residual(coeffs: &[Operator], exponent: &Exponent, eta: &VectorH, partner: Option<&VectorH>) -> f64 {
    let order = coeffs.len();
    let scale_a = 1.0 + coeffs.iter().map(|a| a.norm()).sum::<f64>();
    let defect = |derivs: &[VectorH]| -> f64 {
        let mut r = derivs[order].clone();
        for (i, a) in coeffs.iter().enumerate() {
            match a.apply(&derivs[order - 1 - i]) {
                Ok(v) => r = r.sub(&v),
                Err(_) => return f64::INFINITY,
            }
        }
        r.norm()
    };
    match *exponent {
        Exponent::Complex { z } => {
            let derivs: Vec<VectorH> = (0..=order)
                .map(|j| eta.mul_right(Quaternion::from_complex(z.powu(j as u32))))
                .collect();
            rel(defect(&derivs), scale_a * z.norm().max(1.0).powi(order as i32) * eta.norm())
        }
        Exponent::Coupled { lambda, mu } => {
            let zero = VectorH::zeros(eta.len());
            let phi = partner.unwrap_or(&zero);
            let w = Complex64::new(lambda, mu);
            let mut first = Vec::with_capacity(order + 1);
            let mut second = Vec::with_capacity(order + 1);
            for j in 0..=order {
                let p = w.powu(j as u32);
                first.push(eta.scale(p.re).sub(&phi.scale(p.im)));
                second.push(eta.scale(p.im).add(&phi.scale(p.re)));
            }
            let scale = scale_a * w.norm().max(1.0).powi(order as i32) * (eta.norm() + phi.norm());
            rel(defect(&first).max(defect(&second)), scale)
        }
    }
}

pub fn schrodinger_residual(p: &PhysicalParams, eta: Quaternion, z: Complex64) -> f64 {
    stationary_residual(p, eta, z)
}

struct Check {
    item: String,
    residual: Option<f64>,
    bound: Option<f64>,
    pass: bool,
}

impl Check {
    fn bounded(item: impl Into<String>, residual: f64, bound: f64) -> Self {
        Self {
            item: item.into(),
            residual: Some(residual),
            bound: Some(bound),
            pass: residual <= bound,
        }
    }

    fn value(&self) -> Value {
        json!({"item": self.item, "residual": self.residual, "bound": self.bound, "pass": self.pass})
    }
}

fn named(prefix: &str, residuals: &Value, bound: f64, checks: &mut Vec<Check>) {
    if let Some(map) = residuals.as_object() {
        for (k, v) in map {
            checks.push(Check::bounded(format!("{prefix} {k}"), v.as_f64().unwrap_or(f64::INFINITY), bound));
        }
    }
}

fn array<'a>(v: &'a Value, key: &str) -> Result<&'a Vec<Value>, CliError> {
    field(v, key)?
        .as_array()
        .ok_or_else(|| CliError::validation(format!("\"{key}\" must be an array")))
}

fn real_matrix(v: &Value, what: &str) -> Result<RealMatrix, CliError> {
    let rows = v
        .as_array()
        .ok_or_else(|| CliError::validation(format!("{what} must be an array of rows")))?
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| CliError::validation(format!("{what} rows must be arrays")))?
                .iter()
                .map(|x| number(x, what))
                .collect::<Result<Vec<f64>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RealMatrix::from_rows(&rows)?)
}

fn h_operator(v: &Value, what: &str) -> Result<MatrixH, CliError> {
    match parse_operator(v)? {
        Operator::H(m) => Ok(m),
        _ => Err(CliError::validation(format!("{what} must be an H matrix"))),
    }
}

fn max_abs_diff(a: &Value, b: &Value) -> f64 {
    match (a, b) {
        (Value::Array(x), Value::Array(y)) if x.len() == y.len() => {
            x.iter().zip(y).map(|(p, q)| max_abs_diff(p, q)).fold(0.0, f64::max)
        }
        (Value::Number(x), Value::Number(y)) => match (x.as_f64(), y.as_f64()) {
            (Some(p), Some(q)) => (p - q).abs(),
            _ => f64::INFINITY,
        },
        _ => f64::INFINITY,
    }
}

fn check_embed(input: &Value, result: &Value) -> Result<Vec<Check>, CliError> {
    let expected = match parse_operator(input)? {
        Operator::H(m) => schema::complex_matrix(&embed_f(&m)),
        Operator::C(m) => schema::complex_matrix(&embed_g(&m)),
        Operator::R(m) => schema::real_matrix(&embed_h(&m)),
    };
    Ok(vec![Check::bounded("embedding", max_abs_diff(&expected, field(result, "rows")?), 0.0)])
}

fn check_eig(input: &Value, result: &Value, tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let op = parse_operator(input)?;
    array(result, "pairs")?
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let z = parse_complex(field(p, "eigenvalue")?, "eigenvalue")?;
            let psi = parse_vector(field(p, "vector")?, "eigenvector")?;
            Ok(Check::bounded(format!("pair {k}"), right_residual(&op, &psi, z), tol.residual))
        })
        .collect()
}

fn check_coupled(input: &Value, result: &Value, tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let m = parse_operator(input)?.to_r();
    let mut checks = Vec::new();
    for (k, p) in array(result, "pairs")?.iter().enumerate() {
        let lambda = number(field(p, "lambda")?, "lambda")?;
        let mu = number(field(p, "mu")?, "mu")?;
        let psi = parse_vector(field(p, "psi")?, "psi")?;
        let phi = parse_vector(field(p, "phi")?, "phi")?;
        let (r1, r2) = coupled_residuals(&m, lambda, mu, &psi, &phi);
        checks.push(Check::bounded(format!("pair {k} first equation"), r1, tol.residual));
        checks.push(Check::bounded(format!("pair {k} second equation"), r2, tol.residual));
    }
    Ok(checks)
}

fn check_canonical(input: &Value, result: &Value, tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let op = parse_operator(input)?;
    let mut checks = Vec::new();
    if let Operator::H(m) = &op {
        if let Some(diag) = result.get("diagonal") {
            let s = h_operator(field(diag, "s")?, "s")?;
            let d = h_operator(field(diag, "d")?, "d")?;
            checks.push(Check::bounded("diagonal similarity", diagonal_residual(m, &s, &d), tol.residual));
        } else if let Some(tri) = result.get("triangular") {
            let u = h_operator(field(tri, "u")?, "u")?;
            let t = h_operator(field(tri, "t")?, "t")?;
            named("triangular", &triangular_residuals(m, &u, &t), tol.residual, &mut checks);
        } else {
            return Err(CliError::validation("canonical result for H has neither diagonal nor triangular form"));
        }
    }
    if let Operator::C(_) = &op {
        checks.extend(check_eig(input, result, tol)?);
    }
    if let Operator::R(m) = &op {
        let pt = field(result, "pseudo_triangular")?;
        let blocks = array(pt, "blocks")?
            .iter()
            .map(|b| match b.as_array().map(|a| a.as_slice()) {
                Some([s, n]) => Ok((schema::count(s, "block start")?, schema::count(n, "block size")?)),
                _ => Err(CliError::validation("blocks must be [start, size] pairs")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let r = pseudo_triangular_residuals(
            &embed_h(m),
            &real_matrix(field(pt, "o")?, "o")?,
            &real_matrix(field(pt, "o_inv")?, "o_inv")?,
            &real_matrix(field(pt, "d")?, "d")?,
            &real_matrix(field(pt, "n")?, "n")?,
            &blocks,
        );
        named("pseudo-triangular", &r, tol.residual, &mut checks);
    }
    Ok(checks)
}

fn check_expm(input: &Value, result: &Value, tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let m = parse_operator(field(input, "matrix")?)?;
    let p = parse_operator(field(result, "propagator")?)?;
    let q = parse_operator(field(result, "inverse")?)?;
    let mut checks = Vec::new();
    named("propagator", &expm_residuals(&m, &p, &q), tol.residual, &mut checks);
    Ok(checks)
}

fn check_polyroot(input: &Value, result: &Value, tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let coeffs = polynomial_coefficients(input)?;
    array(result, "roots")?
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let q = parse_quat(field(r, "root")?, "root")?;
            Ok(Check::bounded(format!("root {k}"), polynomial_residual(&coeffs, q), tol.residual))
        })
        .collect()
}

fn parse_exponent(v: &Value) -> Result<Exponent, CliError> {
    match field(v, "type")?.as_str() {
        Some("complex") => Ok(Exponent::Complex {
            z: parse_complex(field(v, "z")?, "z")?,
        }),
        Some("coupled") => Ok(Exponent::Coupled {
            lambda: number(field(v, "lambda")?, "lambda")?,
            mu: number(field(v, "mu")?, "mu")?,
        }),
        _ => Err(CliError::validation("exponent type must be \"complex\" or \"coupled\"")),
    }
}

fn check_ode(input: &Value, result: &Value, tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let ode = parse_ode(input, None)?;
    let coeffs = &ode.problem.coefficients;
    let mut checks = Vec::new();
    if let Some(sols) = result.get("solutions").and_then(Value::as_array) {
        for (k, s) in sols.iter().enumerate() {
            let exponent = parse_exponent(field(s, "exponent")?)?;
            let eta = parse_vector(field(s, "direction")?, "direction")?;
            let partner = s.get("partner").map(|p| parse_vector(p, "partner")).transpose()?;
            let r = ode_residual(coeffs, &exponent, &eta, partner.as_ref());
            checks.push(Check::bounded(format!("solution {k}"), r, tol.residual));
        }
    }
    if let (Some(traj), Some(ic), Some(grid)) = (result.get("trajectory"), &ode.problem.initial, ode.grid) {
        let traj = traj
            .as_array()
            .ok_or_else(|| CliError::validation("trajectory must be an array"))?;
        let xs = traj
            .iter()
            .map(|p| number(field(p, "x")?, "x"))
            .collect::<Result<Vec<_>, _>>()?;
        let grid_ok = xs == grid.points();
        checks.push(Check {
            item: "trajectory grid".into(),
            residual: None,
            bound: None,
            pass: grid_ok,
        });
        for (p, &x) in traj.iter().zip(&xs) {
            if x == 0.0 {
                let psi = parse_vector(field(p, "psi")?, "psi")?;
                let r = if psi.len() == ic[0].len() {
                    rel(psi.sub(&ic[0]).norm(), ic[0].norm().max(1.0))
                } else {
                    f64::INFINITY
                };
                checks.push(Check::bounded("trajectory initial value", r, tol.residual));
            }
        }
    }
    Ok(checks)
}

fn check_schrodinger(input: &Value, result: &Value, tol: &Tolerances) -> Result<Vec<Check>, CliError> {
    let p = parse_params(input)?;
    let zs = array(result, "exponents")?;
    let etas = array(result, "directions")?;
    if zs.len() != etas.len() {
        return Err(CliError::validation("exponents and directions differ in length"));
    }
    zs.iter()
        .zip(etas)
        .enumerate()
        .map(|(k, (z, eta))| {
            let z = parse_complex(z, "exponent")?;
            let eta = parse_quat(eta, "direction")?;
            Ok(Check::bounded(format!("exponent {k}"), schrodinger_residual(&p, eta, z), tol.residual))
        })
        .collect()
}

fn recorded_tolerances(doc: &Value) -> Result<Tolerances, CliError> {
    let t = field(doc, "tolerances")?;
    Ok(Tolerances {
        residual: number(field(t, "residual")?, "tolerances.residual")?,
        image: number(field(t, "image")?, "tolerances.image")?,
        cluster: number(field(t, "cluster")?, "tolerances.cluster")?,
    })
}

pub fn verify(doc: &Value, overrides: &ToleranceOverrides) -> Result<JobOutput, CliError> {
    let map = doc
        .as_object()
        .ok_or_else(|| CliError::validation("result file must be a JSON object"))?;
    let name = field(doc, "command")?
        .as_str()
        .ok_or_else(|| CliError::validation("command must be a string"))?;
    let command = Command::from_name(name).ok_or_else(|| CliError::validation(format!("unknown command \"{name}\"")))?;
    let tol = overrides.apply(recorded_tolerances(doc)?)?;
    let (input, result) = (field(doc, "input")?, field(doc, "result")?);

    let stored_hash = map.get(HASH_KEY).and_then(Value::as_str).unwrap_or_default().to_string();
    let mut checks = vec![Check {
        item: "content hash".into(),
        residual: None,
        bound: None,
        pass: stored_hash == content_hash(map),
    }];
    checks.extend(match command {
        Command::Embed => check_embed(input, result)?,
        Command::Eig => check_eig(input, result, &tol)?,
        Command::CoupledEig => check_coupled(input, result, &tol)?,
        Command::Canonical => check_canonical(input, result, &tol)?,
        Command::Expm => check_expm(input, result, &tol)?,
        Command::Polyroot => check_polyroot(input, result, &tol)?,
        Command::OdeSolve => check_ode(input, result, &tol)?,
        Command::Schrodinger => check_schrodinger(input, result, &tol)?,
        Command::Verify => return Err(CliError::validation("verify reports cannot be verified")),
    });

    let passed = checks.iter().all(|c| c.pass);
    let mut report = Map::new();
    report.insert("command".into(), json!("verify"));
    report.insert("input".into(), json!({"command": name, "content_hash": stored_hash}));
    report.insert(
        "result".into(),
        json!({"items": checks.iter().map(Check::value).collect::<Vec<_>>(), "passed": passed}),
    );
    report.insert(
        "tolerances".into(),
        json!({"residual": tol.residual, "image": tol.image, "cluster": tol.cluster}),
    );
    Ok(JobOutput {
        document: output::finish(report),
        status: if passed { Status::Success } else { Status::Solver },
    })
}
