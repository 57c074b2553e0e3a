//! Quaternionic linear operators and their spectral theory.

pub mod dense;
pub mod eigen;
pub mod embed;
pub mod error;
pub mod funcalc;
pub mod linops;
pub mod odes;
pub mod qschrod;
pub mod quat;
pub mod spectra;

pub use error::{Error, Result};
pub use linops::{MatrixC, MatrixH, MatrixR, Operator, OperatorKind, VectorH};
pub use quat::{Quaternion, SymplecticPair};
