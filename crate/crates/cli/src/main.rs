use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quatspec_cli::{parse_grid, run, Command, Grid, JobSpec, Status, ToleranceOverrides};

#[derive(Parser)]
#[command(name = "quatspec", version, about = "Spectral tools for quaternionic linear operators")]
struct Cli {
    #[command(subcommand)]
    command: Sub,

    /// Relative residual tolerance [default: 1e-8]
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol_residual: Option<f64>,

    /// Embedding-image tolerance [default: 1e-10]
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol_image: Option<f64>,

    /// Rank / cluster tolerance for Jordan structure [default: 1e-9]
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol_cluster: Option<f64>,

    /// Write the JSON document here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct Input {
    /// Input JSON file
    input: PathBuf,
}

#[derive(Subcommand)]
enum Sub {
    /// Complex or real embedding of an operator
    Embed(Input),
    /// Right eigenpairs of an H- or C-linear operator
    Eig(Input),
    /// Coupled eigenpairs of an operator viewed as R-linear
    CoupledEig(Input),
    /// Jordan structure and canonical or triangular form
    Canonical(Input),
    /// exp(M x) for {"matrix": ..., "x": ...}
    Expm(Input),
    /// Roots of q^2 = alpha q + beta, or of a longer coefficient list
    Polyroot(Input),
    /// Exponential solutions and IVP trajectory of a constant-coefficient ODE
    OdeSolve {
        #[command(flatten)]
        input: Input,
        /// Trajectory grid start:stop:count
        #[arg(long, value_parser = grid, allow_hyphen_values = true)]
        grid: Option<Grid>,
    },
    /// Stationary Schrodinger exponents for {"m", "hbar", "V", "W", "E"}
    Schrodinger(Input),
    /// Recompute residuals of a result file
    Verify(Input),
}

fn grid(s: &str) -> Result<Grid, String> {
    parse_grid(s).map_err(|e| e.message)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, input, grid) = match cli.command {
        Sub::Embed(i) => (Command::Embed, i.input, None),
        Sub::Eig(i) => (Command::Eig, i.input, None),
        Sub::CoupledEig(i) => (Command::CoupledEig, i.input, None),
        Sub::Canonical(i) => (Command::Canonical, i.input, None),
        Sub::Expm(i) => (Command::Expm, i.input, None),
        Sub::Polyroot(i) => (Command::Polyroot, i.input, None),
        Sub::OdeSolve { input, grid } => (Command::OdeSolve, input.input, grid),
        Sub::Schrodinger(i) => (Command::Schrodinger, i.input, None),
        Sub::Verify(i) => (Command::Verify, i.input, None),
    };
    let job = JobSpec {
        command,
        input,
        tolerances: ToleranceOverrides {
            residual: cli.tol_residual,
            image: cli.tol_image,
            cluster: cli.tol_cluster,
        },
        output: cli.out,
        grid,
    };

    let out = match run(&job) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("quatspec {}: {}", command.name(), e.message);
            return ExitCode::from(e.status.code() as u8);
        }
    };
    match &job.output {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &out.document) {
                eprintln!("quatspec: cannot write {}: {e}", path.display());
                return ExitCode::from(Status::Validation.code() as u8);
            }
        }
        None => print!("{}", out.document),
    }
    if out.status != Status::Success {
        eprintln!("quatspec {}: some checks failed", command.name());
    }
    ExitCode::from(out.status.code() as u8)
}
