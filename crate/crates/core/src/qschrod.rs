//! Stationary quaternionic Schrodinger equation in one constant-potential region.
//!
//! Time-dependent form:
//! `d_t Psi = [ (i/hbar) (hbar^2/2m d_xx - V) + (j/hbar) W ] Psi`,
//! separated by `Psi(x, t) = psi(x) exp(-i E t / hbar)` with the exponential
//! on the right, which leaves the `C`-linear equation
//! `i hbar^2/2m psi'' - i V psi + j W psi + psi i E = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linops::{MatrixC, MatrixH, Operator, VectorH};
use crate::odes::{companion, OdeProblem};
use crate::quat::Quaternion;
use crate::spectra::{right_eig_c_with, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub m: f64,
    pub hbar: f64,
    #[serde(rename = "V")]
    pub v: f64,
    /// Amplitude of the `j` perturbation.
    #[serde(rename = "W")]
    pub w: Complex64,
    #[serde(rename = "E")]
    pub e: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self {
            m: 0.5,
            hbar: 1.0,
            v: 0.0,
            w: Complex64::new(0.0, 0.0),
            e: 0.0,
        }
    }
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(Error::InvalidInput(format!("mass must be positive and finite, got {}", self.m)));
        }
        if !(self.hbar > 0.0 && self.hbar.is_finite()) {
            return Err(Error::InvalidInput(format!("hbar must be positive and finite, got {}", self.hbar)));
        }
        if !(self.v.is_finite() && self.e.is_finite() && self.w.is_finite()) {
            return Err(Error::InvalidInput("potentials and energy must be finite".into()));
        }
        Ok(())
    }

    /// `2m / hbar^2`.
    fn coupling(&self) -> f64 {
        2.0 * self.m / (self.hbar * self.hbar)
    }

    /// `k W` as a quaternion.
    fn kw(&self) -> Quaternion {
        Quaternion::K * Quaternion::from_complex(self.w)
    }

    fn energy_scale(&self) -> f64 {
        self.v.abs() + self.w.norm() + self.e.abs()
    }
}

/// `A_0 = (2m/hbar^2) (V + k W + L_i R_i E)`, so that `psi'' = A_0 psi`.
pub fn build_a0(p: &PhysicalParams) -> Result<MatrixC> {
    p.validate()?;
    let s = p.coupling();
    let m0 = MatrixH::scalar(1, (Quaternion::real(p.v) + p.kw()).scale(s));
    let m1 = MatrixH::scalar(1, Quaternion::I.scale(s * p.e));
    MatrixC::new(m0, m1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StationaryBasis {
    pub exponents: Vec<Complex64>,
    /// `eta_k` in `psi_k(x) = eta_k e^{z_k x}`.
    pub directions: Vec<Quaternion>,
    /// Relative residual of the stationary equation on a sample grid.
    pub residuals: Vec<f64>,
    /// The companion lacks a full eigenbasis (for instance `E = V`, `W = 0`);
    /// some directions repeat and do not span the solution space.
    pub defective: bool,
}

impl StationaryBasis {
    pub fn evaluate(&self, k: usize, x: f64) -> Quaternion {
        self.directions[k] * Quaternion::from_complex((self.exponents[k] * x).exp())
    }
}

const SAMPLE_GRID: [f64; 5] = [-1.0, -0.5, 0.0, 0.5, 1.0];

/// Residual of `i hbar^2/2m psi'' - i V psi + j W psi + psi i E` for
/// `psi = eta e^{z x}`, relative to `|psi|` and the energy scale.
pub fn stationary_residual(p: &PhysicalParams, eta: Quaternion, z: Complex64) -> f64 {
    let kinetic = p.hbar * p.hbar / (2.0 * p.m);
    let scale = p.energy_scale() + kinetic * z.norm_sqr();
    let jw = Quaternion::J * Quaternion::from_complex(p.w);
    SAMPLE_GRID
        .iter()
        .map(|&x| {
            let ez = Quaternion::from_complex((z * x).exp());
            let psi = eta * ez;
            let psi2 = eta * Quaternion::from_complex(z * z) * ez;
            let r = Quaternion::I * psi2.scale(kinetic) - Quaternion::I * psi.scale(p.v)
                + jw * psi
                + psi * Quaternion::I.scale(p.e);
            r.norm() / (psi.norm() * scale).max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max)
}

/// Four exponents and directions from the right eigenpairs of `[[0, A_0], [1, 0]]`.
pub fn stationary_basis(p: &PhysicalParams) -> Result<StationaryBasis> {
    stationary_basis_with(p, &Tolerances::default())
}

pub fn stationary_basis_with(p: &PhysicalParams, tol: &Tolerances) -> Result<StationaryBasis> {
    let a0 = build_a0(p)?;
    let problem = OdeProblem::new(vec![Operator::C(MatrixC::zeros(1)), Operator::C(a0)], None)?;
    let Operator::C(c) = companion(&problem)? else {
        unreachable!("C-linear coefficients give a C-linear companion")
    };
    let pairs = right_eig_c_with(&c, tol)?;
    let defective = pairs.iter().any(|e| !e.independent);
    let mut basis = StationaryBasis {
        exponents: Vec::with_capacity(4),
        directions: Vec::with_capacity(4),
        residuals: Vec::with_capacity(4),
        defective,
    };
    for e in pairs {
        let eta = e.psi[1];
        let eta = eta.scale(1.0 / eta.norm().max(f64::MIN_POSITIVE));
        basis.residuals.push(stationary_residual(p, eta, e.z));
        basis.exponents.push(e.z);
        basis.directions.push(eta);
    }
    Ok(basis)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FullSolutionReport {
    /// Largest relative residual with `psi(x) exp(-iEt/hbar)`.
    pub right_residual: f64,
    /// The same with the exponential placed on the left.
    pub left_residual: f64,
    pub right_ok: bool,
    /// Whether the left placement fails by more than a factor 10; `None` when
    /// `W = 0`, where both placements are equivalent.
    pub left_breaks: Option<bool>,
}

/// Accepted relative residual for the finite-difference check.
pub const FULL_SOLUTION_TOL: f64 = 1e-6;

/// Checks the time-dependent equation for every basis function by centered
/// differences with step `h` in both variables.
pub fn verify_full_solution(
    p: &PhysicalParams,
    basis: &StationaryBasis,
    ts: &[f64],
    xs: &[f64],
    h: f64,
) -> Result<FullSolutionReport> {
    p.validate()?;
    if !(h > 0.0) {
        return Err(Error::InvalidInput(format!("step must be positive, got {h}")));
    }
    let kinetic = p.hbar * p.hbar / (2.0 * p.m);
    let jw = Quaternion::J * Quaternion::from_complex(p.w);
    let phase = |t: f64| Quaternion::from_complex(Complex64::new(0.0, -p.e * t / p.hbar).exp());

    let residual = |k: usize, right: bool| -> f64 {
        let psi = |x: f64, t: f64| {
            let s = basis.evaluate(k, x);
            if right {
                s * phase(t)
            } else {
                phase(t) * s
            }
        };
        let zk = basis.exponents[k].norm();
        let scale = (p.energy_scale() + kinetic * zk * zk) / p.hbar;
        let mut worst: f64 = 0.0;
        for &t in ts {
            for &x in xs {
                let c = psi(x, t);
                let dt = (psi(x, t + h) - psi(x, t - h)).scale(0.5 / h);
                let dxx = (psi(x + h, t) - c.scale(2.0) + psi(x - h, t)).scale(1.0 / (h * h));
                let rhs = (Quaternion::I * (dxx.scale(kinetic) - c.scale(p.v)) + jw * c).scale(1.0 / p.hbar);
                let r = (dt - rhs).norm() / (c.norm() * scale).max(f64::MIN_POSITIVE);
                worst = worst.max(r);
            }
        }
        worst
    };

    let n = basis.exponents.len();
    let right_residual = (0..n).map(|k| residual(k, true)).fold(0.0, f64::max);
    let left_residual = (0..n).map(|k| residual(k, false)).fold(0.0, f64::max);
    let left_breaks = (p.w.norm() > 0.0).then(|| left_residual > 10.0 * right_residual.max(FULL_SOLUTION_TOL));
    Ok(FullSolutionReport {
        right_residual,
        left_residual,
        right_ok: right_residual < FULL_SOLUTION_TOL,
        left_breaks,
    })
}

/// `psi = eta e^{z x}` for a direction and exponent taken from a basis.
pub fn basis_vector(basis: &StationaryBasis, k: usize, x: f64) -> VectorH {
    VectorH::new(vec![basis.evaluate(k, x)]).expect("one entry")
}
