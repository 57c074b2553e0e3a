use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the quaternionic operator toolkit.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not in the image of the embedding (pattern violation {violation:.3e})")]
    NotInImage { violation: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} iterations ({} eigenvalues found)", .partial.len())]
    NoConvergence {
        iterations: usize,
        partial: Vec<Complex64>,
    },

    #[error("operator is defective, Jordan block sizes {structure:?}")]
    Defective { structure: Vec<Vec<usize>> },

    #[error("eigenvalue cluster near {eigenvalue} is ambiguous: {expected} eigenvalues but generalized null space of dimension {found}")]
    ClusterAmbiguity {
        eigenvalue: Complex64,
        expected: usize,
        found: usize,
    },

    #[error("coupled coefficients have real spectrum (discriminant {discriminant:.6e} >= 0)")]
    NonComplexSpectrum { discriminant: f64 },

    #[error("coupled pair is degenerate: both psi + phi i and psi - phi i vanish")]
    DegeneratePair,

    #[error("eigenvector lower component vanishes (|w| = {norm:.3e}); the equation degenerates to a linear one")]
    ZeroW { norm: f64 },

    #[error("companion matrix is not diagonalizable; use the exponential propagator instead")]
    DefectiveCompanion,

    #[error("operator kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
