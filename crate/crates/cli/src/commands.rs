use quatspec::embed::{embed_f, embed_g, embed_h};
use quatspec::funcalc::{expm_with, ExpmRoute, PropagatorRequest};
use quatspec::odes::{general_solution_with, quadratic_roots_with, solve_ivp_with, Exponent, OdeProblem};
use quatspec::qschrod::{stationary_basis_with, PhysicalParams};
use quatspec::spectra::{
    coupled_eig_r_with, diagonalize_h_with, jordan_structure_with, right_eig_c_with, right_eig_h_with,
    triangularize_h_with, EigenpairH, Tolerances,
};
use quatspec::{Error, MatrixH, Operator, Quaternion};
use serde_json::{json, Map, Value};

use crate::schema::{self, field, number, parse_complex, parse_operator, parse_quat, parse_vector};
use crate::verify::{
    coupled_residuals, diagonal_residual, expm_residuals, ode_residual, polynomial_residual, pseudo_triangular_residuals,
    right_residual, schrodinger_residual, triangular_residuals,
};
use crate::{CliError, Command, Grid};

pub fn parse_grid(s: &str) -> Result<Grid, CliError> {
    let bad = || CliError::validation(format!("grid must be start:stop:count, got \"{s}\""));
    let fields: Vec<&str> = s.split(':').collect();
    let [start, stop, count] = fields[..] else {
        return Err(bad());
    };
    let start: f64 = start.trim().parse().map_err(|_| bad())?;
    let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
    let count: usize = count.trim().parse().map_err(|_| bad())?;
    if !start.is_finite() || !stop.is_finite() || count == 0 {
        return Err(bad());
    }
    Ok(Grid { start, stop, count })
}

/// Runs one solver command; returns the echoed input and the result.
pub fn execute(command: Command, input: &Value, tol: &Tolerances, grid: Option<Grid>) -> Result<(Value, Value), CliError> {
    match command {
        Command::Embed => embed(input),
        Command::Eig => eig(input, tol),
        Command::CoupledEig => coupled_eig(input, tol),
        Command::Canonical => canonical(input, tol),
        Command::Expm => expm(input, tol),
        Command::Polyroot => polyroot(input, tol),
        Command::OdeSolve => ode_solve(input, tol, grid),
        Command::Schrodinger => schrodinger(input, tol),
        Command::Verify => unreachable!("verify is dispatched separately"),
    }
}

fn embed(input: &Value) -> Result<(Value, Value), CliError> {
    let op = parse_operator(input)?;
    let result = match &op {
        Operator::H(m) => json!({"map": "f", "field": "complex", "rows": schema::complex_matrix(&embed_f(m))}),
        Operator::C(m) => json!({"map": "g", "field": "complex", "rows": schema::complex_matrix(&embed_g(m))}),
        Operator::R(m) => json!({"map": "h", "field": "real", "rows": schema::real_matrix(&embed_h(m))}),
    };
    Ok((schema::operator(&op), result))
}

fn eig(input: &Value, tol: &Tolerances) -> Result<(Value, Value), CliError> {
    let op = parse_operator(input)?;
    let pairs = match &op {
        Operator::H(m) => right_eig_h_with(m, tol)?,
        Operator::C(m) => right_eig_c_with(m, tol)?,
        Operator::R(_) => {
            return Err(CliError::validation(
                "eig takes H or C operators; use coupled-eig for R-linear operators",
            ))
        }
    };
    Ok((schema::operator(&op), json!({"norm": op.norm(), "pairs": pairs_value(&op, &pairs)})))
}

fn pairs_value(op: &Operator, pairs: &[EigenpairH]) -> Value {
    pairs
        .iter()
        .map(|p| {
            json!({
                "eigenvalue": schema::complex(p.z),
                "vector": schema::vector(&p.psi),
                "independent": p.independent,
                "residual": right_residual(op, &p.psi, p.z),
            })
        })
        .collect()
}

fn coupled_eig(input: &Value, tol: &Tolerances) -> Result<(Value, Value), CliError> {
    let op = parse_operator(input)?;
    let m = op.to_r();
    let pairs: Vec<Value> = coupled_eig_r_with(&m, tol)?
        .iter()
        .map(|p| {
            let (r1, r2) = coupled_residuals(&m, p.lambda, p.mu, &p.psi, &p.phi);
            json!({
                "lambda": p.lambda,
                "mu": p.mu,
                "psi": schema::vector(&p.psi),
                "phi": schema::vector(&p.phi),
                "residuals": [r1, r2],
            })
        })
        .collect();
    Ok((schema::operator(&op), json!({"norm": m.fro_norm(), "pairs": pairs})))
}

fn h_matrix(m: &MatrixH) -> Value {
    schema::operator(&Operator::H(m.clone()))
}

fn canonical(input: &Value, tol: &Tolerances) -> Result<(Value, Value), CliError> {
    let op = parse_operator(input)?;
    let report = jordan_structure_with(&op, tol)?;
    let groups: Vec<Value> = report
        .groups
        .iter()
        .map(|g| json!({"eigenvalue": schema::complex(g.eigenvalue), "blocks": g.blocks}))
        .collect();
    let mut result = Map::new();
    result.insert("groups".into(), Value::Array(groups));
    result.insert("diagonalizable".into(), Value::Bool(report.is_diagonalizable()));
    if let Operator::H(m) = &op {
        let diagonal = if report.is_diagonalizable() {
            match diagonalize_h_with(m, tol) {
                Ok(cf) => Some(cf),
                Err(Error::Defective { .. }) => None,
                Err(e) => return Err(e.into()),
            }
        } else {
            None
        };
        match diagonal {
            Some(cf) => {
                result.insert(
                    "diagonal".into(),
                    json!({"s": h_matrix(&cf.s), "d": h_matrix(&cf.d), "residual": diagonal_residual(m, &cf.s, &cf.d)}),
                );
            }
            None => {
                let (u, t) = triangularize_h_with(m, tol)?;
                let r = triangular_residuals(m, &u, &t);
                result.insert(
                    "triangular".into(),
                    json!({"u": h_matrix(&u), "t": h_matrix(&t), "residuals": r}),
                );
            }
        }
    }
    if let Operator::C(m) = &op {
        result.insert("pairs".into(), pairs_value(&op, &right_eig_c_with(m, tol)?));
    }
    if let (Operator::R(m), Some(pt)) = (&op, &report.pseudo_triangular) {
        let blocks: Vec<Value> = pt.blocks.iter().map(|&(s, n)| json!([s, n])).collect();
        let r = pseudo_triangular_residuals(&embed_h(m), &pt.o, &pt.o_inv, &pt.d, &pt.n, &pt.blocks);
        result.insert(
            "pseudo_triangular".into(),
            json!({
                "o": schema::real_matrix(&pt.o),
                "o_inv": schema::real_matrix(&pt.o_inv),
                "d": schema::real_matrix(&pt.d),
                "n": schema::real_matrix(&pt.n),
                "blocks": blocks,
                "residuals": r,
            }),
        );
    }
    Ok((schema::operator(&op), Value::Object(result)))
}

fn expm(input: &Value, tol: &Tolerances) -> Result<(Value, Value), CliError> {
    let op = parse_operator(field(input, "matrix")?)?;
    let x = number(field(input, "x")?, "x")?;
    let prop = |t: f64| {
        expm_with(
            &PropagatorRequest {
                operator: op.clone(),
                x: t,
            },
            ExpmRoute::Embedding,
            tol,
        )
    };
    let (p, q) = (prop(x)?, prop(-x)?);
    let residuals = expm_residuals(&op, &p, &q);
    Ok((
        json!({"matrix": schema::operator(&op), "x": x}),
        json!({"propagator": schema::operator(&p), "inverse": schema::operator(&q), "residuals": residuals}),
    ))
}

/// Coefficients `a_{n-1}, ..., a_0` of `q^n = a_{n-1} q^{n-1} + ... + a_0`.
pub(crate) fn polynomial_coefficients(input: &Value) -> Result<Vec<Quaternion>, CliError> {
    match (input.get("coefficients"), input.get("alpha"), input.get("beta")) {
        (Some(c), None, None) => {
            let list = c
                .as_array()
                .ok_or_else(|| CliError::validation("coefficients must be an array of quaternions"))?;
            if list.is_empty() {
                return Err(CliError::validation("coefficients must not be empty"));
            }
            list.iter().map(|q| parse_quat(q, "coefficient")).collect()
        }
        (None, Some(a), Some(b)) => Ok(vec![parse_quat(a, "alpha")?, parse_quat(b, "beta")?]),
        _ => Err(CliError::validation("polyroot input needs either alpha and beta, or coefficients")),
    }
}

fn polyroot(input: &Value, tol: &Tolerances) -> Result<(Value, Value), CliError> {
    let coeffs = polynomial_coefficients(input)?;
    let echo = if input.get("coefficients").is_some() {
        json!({"coefficients": coeffs.iter().map(|&q| schema::quat(q)).collect::<Vec<_>>()})
    } else {
        json!({"alpha": schema::quat(coeffs[0]), "beta": schema::quat(coeffs[1])})
    };
    let (roots, spherical) = if coeffs.len() == 2 {
        let r = quadratic_roots_with(coeffs[0], coeffs[1], tol)?;
        (r.roots, Value::Bool(r.spherical))
    } else {
        let ops = coeffs.iter().map(|&a| Operator::H(MatrixH::scalar(1, a))).collect();
        let roots = general_solution_with(&OdeProblem::new(ops, None)?, tol)?
            .into_iter()
            .filter_map(|s| s.left_exponents.map(|l| l[0]))
            .collect();
        (roots, Value::Null)
    };
    let roots: Vec<Value> = roots
        .iter()
        .map(|&q| json!({"root": schema::quat(q), "residual": polynomial_residual(&coeffs, q)}))
        .collect();
    Ok((echo, json!({"roots": roots, "spherical": spherical})))
}

pub(crate) struct OdeInput {
    pub problem: OdeProblem,
    pub grid: Option<Grid>,
}

pub(crate) fn parse_ode(input: &Value, grid_flag: Option<Grid>) -> Result<OdeInput, CliError> {
    let coefficients = field(input, "coefficients")?
        .as_array()
        .ok_or_else(|| CliError::validation("coefficients must be an array of matrices"))?
        .iter()
        .map(parse_operator)
        .collect::<Result<Vec<_>, _>>()?;
    let initial = match input.get("initial") {
        None | Some(Value::Null) => None,
        Some(v) => Some(
            v.as_array()
                .ok_or_else(|| CliError::validation("initial must be an array of vectors"))?
                .iter()
                .map(|x| parse_vector(x, "initial value"))
                .collect::<Result<Vec<_>, _>>()?,
        ),
    };
    let grid = match (grid_flag, input.get("grid")) {
        (Some(g), _) => Some(g),
        (None, None | Some(Value::Null)) => None,
        (None, Some(g)) => Some(Grid {
            start: number(field(g, "start")?, "grid start")?,
            stop: number(field(g, "stop")?, "grid stop")?,
            count: match schema::count(field(g, "count")?, "grid count")? {
                0 => return Err(CliError::validation("grid count must be at least 1")),
                n => n,
            },
        }),
    };
    Ok(OdeInput {
        problem: OdeProblem::new(coefficients, initial)?,
        grid,
    })
}

fn exponent_value(e: &Exponent) -> Value {
    match *e {
        Exponent::Complex { z } => json!({"type": "complex", "z": schema::complex(z)}),
        Exponent::Coupled { lambda, mu } => json!({"type": "coupled", "lambda": lambda, "mu": mu}),
    }
}

fn ode_solve(input: &Value, tol: &Tolerances, grid: Option<Grid>) -> Result<(Value, Value), CliError> {
    let OdeInput { problem, grid } = parse_ode(input, grid)?;
    let mut echo = Map::new();
    echo.insert(
        "coefficients".into(),
        Value::Array(problem.coefficients.iter().map(schema::operator).collect()),
    );
    if let Some(ic) = &problem.initial {
        echo.insert("initial".into(), Value::Array(ic.iter().map(schema::vector).collect()));
    }
    if let Some(g) = grid {
        echo.insert("grid".into(), json!({"start": g.start, "stop": g.stop, "count": g.count}));
    }

    let mut result = Map::new();
    match general_solution_with(&problem, tol) {
        Ok(sols) => {
            let sols: Vec<Value> = sols
                .iter()
                .map(|s| {
                    let mut v = Map::new();
                    v.insert("exponent".into(), exponent_value(&s.exponent));
                    v.insert("direction".into(), schema::vector(&s.direction));
                    if let Some(p) = &s.partner {
                        v.insert("partner".into(), schema::vector(p));
                    }
                    if let Some(l) = &s.left_exponents {
                        v.insert("left_exponents".into(), Value::Array(l.iter().map(|&q| schema::quat(q)).collect()));
                    }
                    v.insert(
                        "residual".into(),
                        json!(ode_residual(&problem.coefficients, &s.exponent, &s.direction, s.partner.as_ref())),
                    );
                    Value::Object(v)
                })
                .collect();
            result.insert("solutions".into(), Value::Array(sols));
        }
        Err(e) if problem.initial.is_some() && matches!(e, Error::DefectiveCompanion) => {
            result.insert("solutions".into(), Value::Null);
            result.insert("solutions_error".into(), Value::String(e.to_string()));
        }
        Err(e) => return Err(e.into()),
    }

    if problem.initial.is_some() {
        let grid = grid.ok_or_else(|| CliError::validation("initial values given but no grid (use --grid start:stop:count)"))?;
        let traj: Vec<Value> = solve_ivp_with(&problem, &grid.points(), tol)?
            .iter()
            .map(|p| json!({"x": p.x, "psi": schema::vector(&p.psi)}))
            .collect();
        result.insert("trajectory".into(), Value::Array(traj));
    } else if grid.is_some() {
        return Err(CliError::validation("a grid needs initial values"));
    }
    Ok((Value::Object(echo), Value::Object(result)))
}

pub(crate) fn parse_params(input: &Value) -> Result<PhysicalParams, CliError> {
    let obj = input
        .as_object()
        .ok_or_else(|| CliError::validation("schrodinger input must be an object"))?;
    if let Some(k) = obj.keys().find(|k| !["m", "hbar", "V", "W", "E"].contains(&k.as_str())) {
        return Err(CliError::validation(format!("unknown parameter \"{k}\"")));
    }
    let d = PhysicalParams::default();
    let get = |k: &str, default: f64| obj.get(k).map_or(Ok(default), |v| number(v, k));
    let w = match obj.get("W") {
        None => d.w,
        Some(v) if v.as_array().is_some_and(|a| a.len() == 4) => {
            return Err(CliError::validation(
                "W must be a complex amplitude [re, im]; quaternionic W is not supported",
            ))
        }
        Some(v) => parse_complex(v, "W")?,
    };
    let p = PhysicalParams {
        m: get("m", d.m)?,
        hbar: get("hbar", d.hbar)?,
        v: get("V", d.v)?,
        w,
        e: get("E", d.e)?,
    };
    p.validate()?;
    Ok(p)
}

fn params_value(p: &PhysicalParams) -> Value {
    json!({"m": p.m, "hbar": p.hbar, "V": p.v, "W": schema::complex(p.w), "E": p.e})
}

fn schrodinger(input: &Value, tol: &Tolerances) -> Result<(Value, Value), CliError> {
    let p = parse_params(input)?;
    let b = stationary_basis_with(&p, tol)?;
    let residuals: Vec<f64> = b
        .exponents
        .iter()
        .zip(&b.directions)
        .map(|(&z, &eta)| schrodinger_residual(&p, eta, z))
        .collect();
    Ok((
        params_value(&p),
        json!({
            "exponents": b.exponents.iter().map(|&z| schema::complex(z)).collect::<Vec<_>>(),
            "directions": b.directions.iter().map(|&q| schema::quat(q)).collect::<Vec<_>>(),
            "residuals": residuals,
            "defective": b.defective,
        }),
    ))
}
