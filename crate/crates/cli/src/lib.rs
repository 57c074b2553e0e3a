//! Command-line jobs over the quatspec solvers.
//!
//! Every job reads one JSON input file and produces one JSON document with
//! the echoed input, the tolerances used, the results with residuals, and a
//! SHA-256 content hash.

mod commands;
pub mod output;
pub mod schema;
mod verify;

use std::fmt;
use std::path::PathBuf;

use quatspec::spectra::Tolerances;
use serde_json::{Map, Value};

pub use commands::parse_grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Embed,
    Eig,
    CoupledEig,
    Canonical,
    Expm,
    Polyroot,
    OdeSolve,
    Schrodinger,
    Verify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Embed => "embed",
            Command::Eig => "eig",
            Command::CoupledEig => "coupled-eig",
            Command::Canonical => "canonical",
            Command::Expm => "expm",
            Command::Polyroot => "polyroot",
            Command::OdeSolve => "ode-solve",
            Command::Schrodinger => "schrodinger",
            Command::Verify => "verify",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            Command::Embed,
            Command::Eig,
            Command::CoupledEig,
            Command::Canonical,
            Command::Expm,
            Command::Polyroot,
            Command::OdeSolve,
            Command::Schrodinger,
            Command::Verify,
        ]
        .into_iter()
        .find(|c| c.name() == s)
    }
}

/// Tolerance flags; unset fields fall back to the defaults, or for `verify`
/// to the tolerances recorded in the checked document.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ToleranceOverrides {
    pub residual: Option<f64>,
    pub image: Option<f64>,
    pub cluster: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, base: Tolerances) -> Result<Tolerances, CliError> {
        let t = Tolerances {
            residual: self.residual.unwrap_or(base.residual),
            image: self.image.unwrap_or(base.image),
            cluster: self.cluster.unwrap_or(base.cluster),
        };
        for (name, v) in [("residual", t.residual), ("image", t.image), ("cluster", t.cluster)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::validation(format!("tolerance {name} must be positive, got {v}")));
            }
        }
        Ok(t)
    }
}

/// `start:stop:count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Grid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|k| if k + 1 == self.count { self.stop } else { self.start + step * k as f64 })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct JobSpec {
    pub command: Command,
    pub input: PathBuf,
    pub tolerances: ToleranceOverrides,
    pub output: Option<PathBuf>,
    pub grid: Option<Grid>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Success,
    Validation,
    Solver,
    Internal,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Validation => 2,
            Status::Solver => 3,
            Status::Internal => 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CliError {
    pub status: Status,
    pub message: String,
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        Self {
            status: Status::Validation,
            message: msg.into(),
        }
    }

    pub fn solver(msg: impl Into<String>) -> Self {
        Self {
            status: Status::Solver,
            message: msg.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<quatspec::Error> for CliError {
    fn from(e: quatspec::Error) -> Self {
        use quatspec::Error as E;
        let status = match e {
            E::DimensionMismatch { .. } | E::KindMismatch { .. } | E::InvalidInput(_) => Status::Validation,
            E::NoConvergence { .. }
            | E::Defective { .. }
            | E::ClusterAmbiguity { .. }
            | E::DefectiveCompanion
            | E::DegeneratePair
            | E::ZeroW { .. }
            | E::NonComplexSpectrum { .. } => Status::Solver,
            E::NotInImage { .. } | E::InternalConsistency(_) => Status::Internal,
        };
        Self {
            status,
            message: e.to_string(),
        }
    }
}

/// Result of a job: the rendered document and the exit status it implies.
#[derive(Clone, Debug, PartialEq)]
pub struct JobOutput {
    pub document: String,
    pub status: Status,
}

pub fn run(job: &JobSpec) -> Result<JobOutput, CliError> {
    let text = std::fs::read_to_string(&job.input)
        .map_err(|e| CliError::validation(format!("cannot read {}: {e}", job.input.display())))?;
    let input: Value =
        serde_json::from_str(&text).map_err(|e| CliError::validation(format!("{}: {e}", job.input.display())))?;
    run_value(job, &input)
}

/// Same as [`run`] with the input already parsed.
pub fn run_value(job: &JobSpec, input: &Value) -> Result<JobOutput, CliError> {
    if job.command == Command::Verify {
        return verify::verify(input, &job.tolerances);
    }
    if job.grid.is_some() && job.command != Command::OdeSolve {
        return Err(CliError::validation("--grid only applies to ode-solve"));
    }
    let tol = job.tolerances.apply(Tolerances::default())?;
    let (echo, result) = commands::execute(job.command, input, &tol, job.grid)?;
    Ok(JobOutput {
        document: output::finish(document(job.command, echo, result, &tol)),
        status: Status::Success,
    })
}

fn tolerances_value(tol: &Tolerances) -> Value {
    serde_json::json!({"residual": tol.residual, "image": tol.image, "cluster": tol.cluster})
}

fn document(command: Command, input: Value, result: Value, tol: &Tolerances) -> Map<String, Value> {
    let mut doc = Map::new();
    doc.insert("command".into(), Value::String(command.name().into()));
    doc.insert("input".into(), input);
    doc.insert("result".into(), result);
    doc.insert("tolerances".into(), tolerances_value(tol));
    doc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points() {
        let g = Grid {
            start: 0.0,
            stop: 1.0,
            count: 5,
        };
        assert_eq!(g.points(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(Grid { count: 1, ..g }.points(), vec![0.0]);
    }

    #[test]
    fn command_names_round_trip() {
        for name in ["embed", "eig", "coupled-eig", "canonical", "expm", "polyroot", "ode-solve", "schrodinger", "verify"] {
            assert_eq!(Command::from_name(name).unwrap().name(), name);
        }
        assert!(Command::from_name("eigen").is_none());
    }

    #[test]
    fn overrides_validated() {
        let o = ToleranceOverrides {
            residual: Some(-1.0),
            ..Default::default()
        };
        assert!(o.apply(Tolerances::default()).is_err());
        let o = ToleranceOverrides {
            image: Some(1e-6),
            ..Default::default()
        };
        assert_eq!(o.apply(Tolerances::default()).unwrap().image, 1e-6);
    }
}
