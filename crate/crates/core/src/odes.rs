//! Linear quaternionic ODEs with constant coefficients,
//! `psi^(n) = A_{n-1} psi^(n-1) + ... + A_0 psi`.

use num_complex::Complex64;
use serde::Serialize;

use crate::eigen::eig_real;
use crate::embed::embed_h;
use crate::error::{Error, Result};
use crate::funcalc::{expm_with, ExpmRoute, PropagatorRequest};
use crate::linops::{MatrixH, Operator, OperatorKind, VectorH};
use crate::quat::Quaternion;
use crate::spectra::{coupled_eig_r_with, right_eig_c_with, right_eig_h_with, EigenpairH, Tolerances};

/// Relative size below which the bottom block of a companion eigenvector counts as zero.
pub const ZERO_W_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct OdeProblem {
    /// `A_{n-1}, ..., A_0`, all of one kind and dimension.
    pub coefficients: Vec<Operator>,
    /// `psi(0), psi'(0), ..., psi^(n-1)(0)`.
    pub initial: Option<Vec<VectorH>>,
}

impl OdeProblem {
    pub fn new(coefficients: Vec<Operator>, initial: Option<Vec<VectorH>>) -> Result<Self> {
        let p = Self { coefficients, initial };
        p.validate()?;
        Ok(p)
    }

    /// Scalar `psi'' = alpha psi' + beta psi`.
    pub fn second_order_h(alpha: Quaternion, beta: Quaternion) -> Self {
        Self {
            coefficients: vec![
                Operator::H(MatrixH::scalar(1, alpha)),
                Operator::H(MatrixH::scalar(1, beta)),
            ],
            initial: None,
        }
    }

    pub fn with_initial(mut self, initial: Vec<VectorH>) -> Result<Self> {
        self.initial = Some(initial);
        self.validate()?;
        Ok(self)
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn kind(&self) -> OperatorKind {
        self.coefficients[0].kind()
    }

    /// Dimension of `psi`.
    pub fn dim(&self) -> usize {
        self.coefficients[0].dim()
    }

    pub fn validate(&self) -> Result<()> {
        let Some(first) = self.coefficients.first() else {
            return Err(Error::InvalidInput("an ODE needs at least one coefficient".into()));
        };
        for c in &self.coefficients[1..] {
            if c.kind() != first.kind() {
                return Err(Error::KindMismatch {
                    expected: first.kind().tag(),
                    found: c.kind().tag(),
                });
            }
            if c.dim() != first.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: c.dim(),
                });
            }
        }
        if let Some(ic) = &self.initial {
            if ic.len() != self.order() {
                return Err(Error::InvalidInput(format!(
                    "order {} needs {} initial values, got {}",
                    self.order(),
                    self.order(),
                    ic.len()
                )));
            }
            if let Some(v) = ic.iter().find(|v| v.len() != first.dim()) {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    found: v.len(),
                });
            }
        }
        Ok(())
    }
}

/// Block companion `[[A_{n-1} ... A_0], [1 0 ... 0], ..., [0 ... 1 0]]` acting
/// on the state `(psi^(n-1); ...; psi)`.
pub fn companion(p: &OdeProblem) -> Result<Operator> {
    p.validate()?;
    let (order, n, kind) = (p.order(), p.dim(), p.kind());
    let parts = (0..kind.parts())
        .map(|part| {
            let mut m = MatrixH::zeros(order * n);
            for (k, c) in p.coefficients.iter().enumerate() {
                m.set_block(0, k, c.parts()[part]);
            }
            if part == 0 {
                for k in 1..order {
                    m.set_block(k, k - 1, &MatrixH::identity(n));
                }
            }
            m
        })
        .collect();
    Operator::from_parts(kind, parts)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadraticRoots {
    pub roots: Vec<Quaternion>,
    /// The roots form a whole 2-sphere; `roots` holds its complex representative.
    pub spherical: bool,
}

/// Roots of `q^2 = alpha q + beta` from the right eigenpairs of `[[alpha, beta], [1, 0]]`.
pub fn quadratic_roots(alpha: Quaternion, beta: Quaternion) -> Result<QuadraticRoots> {
    quadratic_roots_with(alpha, beta, &Tolerances::default())
}

pub fn quadratic_roots_with(alpha: Quaternion, beta: Quaternion, tol: &Tolerances) -> Result<QuadraticRoots> {
    if !alpha.is_finite() || !beta.is_finite() {
        return Err(Error::InvalidInput("non-finite polynomial coefficient".into()));
    }
    let m = MatrixH::from_rows(&[vec![alpha, beta], vec![Quaternion::ONE, Quaternion::ZERO]])?;
    let pairs = right_eig_h_with(&m, tol)?;
    let scale = 1.0 + alpha.norm() + beta.norm();

    let (z0, z1) = (pairs[0].z, pairs[1].z);
    if z0.im > 1e-8 * scale && (z0 - z1).norm() <= 1e-8 * scale {
        let x = 0.5 * (z0.re + z1.re);
        let y = 0.5 * (z0.im + z1.im);
        let on_sphere = [Quaternion::I, -Quaternion::I, Quaternion::J, Quaternion::K]
            .iter()
            .all(|&u| quadratic_residual(alpha, beta, Quaternion::real(x) + u.scale(y)) <= 1e-9 * scale * scale);
        if on_sphere {
            return Ok(QuadraticRoots {
                roots: vec![Quaternion::new(x, y, 0.0, 0.0)],
                spherical: true,
            });
        }
    }

    let mut roots: Vec<Quaternion> = Vec::with_capacity(2);
    for pair in &pairs {
        let q = root_from_pair(pair)?;
        if !roots.iter().any(|r| (*r - q).norm() <= 1e-8 * scale) {
            roots.push(q);
        }
    }
    roots.sort_by(|a, b| a.to_array().partial_cmp(&b.to_array()).expect("finite roots"));
    Ok(QuadraticRoots { roots, spherical: false })
}

/// `q = w z w^-1` where `(v; w)` is the eigenvector; `v = w z` by the companion shape.
fn root_from_pair(pair: &EigenpairH) -> Result<Quaternion> {
    let w = pair.psi[1];
    if w.norm() < ZERO_W_TOL * pair.psi.norm() {
        return Err(Error::ZeroW { norm: w.norm() });
    }
    let u = w.scale(1.0 / w.norm());
    Ok(u * Quaternion::from_complex(pair.z) * u.conj())
}

/// `|q^2 - alpha q - beta|`.
pub fn quadratic_residual(alpha: Quaternion, beta: Quaternion, q: Quaternion) -> f64 {
    (q * q - alpha * q - beta).norm()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Exponent {
    /// `psi(x) = eta e^{z x}`, exponential on the right.
    Complex { z: Complex64 },
    /// `psi(x) = e^{lambda x} (eta cos mu x - partner sin mu x)` and
    /// `e^{lambda x} (eta sin mu x + partner cos mu x)`.
    Coupled { lambda: f64, mu: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentialSolution {
    pub exponent: Exponent,
    pub direction: VectorH,
    /// Second direction of a coupled pair (zero when `mu = 0`).
    pub partner: Option<VectorH>,
    /// Per-component left exponents `q_k = eta_k z eta_k^-1`, so that
    /// `psi_k(x) = e^{q_k x} eta_k` (`H` kind only).
    pub left_exponents: Option<Vec<Quaternion>>,
    /// Eigen-residual of the companion state.
    pub residual: f64,
}

impl ExponentialSolution {
    /// The solution at `x`; `second` selects the sine-led member of a coupled pair.
    pub fn evaluate(&self, x: f64, second: bool) -> VectorH {
        match self.exponent {
            Exponent::Complex { z } => self.direction.mul_right(Quaternion::from_complex((z * x).exp())),
            Exponent::Coupled { lambda, mu } => {
                let e = (lambda * x).exp();
                let (s, c) = (mu * x).sin_cos();
                let phi = self.partner.clone().unwrap_or_else(|| VectorH::zeros(self.direction.len()));
                if second {
                    self.direction.scale(e * s).add(&phi.scale(e * c))
                } else {
                    self.direction.scale(e * c).sub(&phi.scale(e * s))
                }
            }
        }
    }
}

fn bottom_block(v: &VectorH, order: usize, n: usize) -> VectorH {
    VectorH::new(v.entries()[(order - 1) * n..].to_vec()).expect("n >= 1")
}

/// Exponential solutions from the companion eigenpairs.
pub fn general_solution(p: &OdeProblem) -> Result<Vec<ExponentialSolution>> {
    general_solution_with(p, &Tolerances::default())
}

pub fn general_solution_with(p: &OdeProblem, tol: &Tolerances) -> Result<Vec<ExponentialSolution>> {
    let c = companion(p)?;
    let (order, n) = (p.order(), p.dim());
    let complex_solutions = |pairs: Vec<EigenpairH>, left: bool| -> Result<Vec<ExponentialSolution>> {
        if pairs.iter().any(|e| !e.independent) {
            return Err(Error::DefectiveCompanion);
        }
        Ok(pairs
            .into_iter()
            .map(|e| {
                let eta = bottom_block(&e.psi, order, n);
                let left_exponents = left.then(|| {
                    let zq = Quaternion::from_complex(e.z);
                    eta.iter()
                        .map(|&w| match w.inverse() {
                            Some(inv) if w.norm() > ZERO_W_TOL * e.psi.norm() => w * zq * inv,
                            _ => zq,
                        })
                        .collect()
                });
                ExponentialSolution {
                    exponent: Exponent::Complex { z: e.z },
                    direction: eta,
                    partner: None,
                    left_exponents,
                    residual: e.residual,
                }
            })
            .collect())
    };
    match &c {
        Operator::H(m) => complex_solutions(right_eig_h_with(m, tol)?, true),
        Operator::C(m) => complex_solutions(right_eig_c_with(m, tol)?, false),
        Operator::R(m) => {
            let spec = eig_real(&embed_h(m), tol.residual)?;
            if spec.independent_count() < spec.len() {
                return Err(Error::DefectiveCompanion);
            }
            Ok(coupled_eig_r_with(m, tol)?
                .into_iter()
                .map(|e| ExponentialSolution {
                    exponent: Exponent::Coupled {
                        lambda: e.lambda,
                        mu: e.mu,
                    },
                    direction: bottom_block(&e.psi, order, n),
                    partner: Some(bottom_block(&e.phi, order, n)),
                    left_exponents: None,
                    residual: e.residual,
                })
                .collect())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub x: f64,
    pub psi: VectorH,
}

/// `psi(x)` on the grid, one exponential of the companion per point.
pub fn solve_ivp(p: &OdeProblem, xs: &[f64]) -> Result<Vec<TrajectoryPoint>> {
    solve_ivp_with(p, xs, &Tolerances::default())
}

pub fn solve_ivp_with(p: &OdeProblem, xs: &[f64], tol: &Tolerances) -> Result<Vec<TrajectoryPoint>> {
    let c = companion(p)?;
    let ic = p
        .initial
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("initial values are required".into()))?;
    let (order, n) = (p.order(), p.dim());
    let state = VectorH::new(ic.iter().rev().flat_map(|v| v.iter().copied()).collect())?;
    xs.iter()
        .map(|&x| {
            let prop = expm_with(
                &PropagatorRequest {
                    operator: c.clone(),
                    x,
                },
                ExpmRoute::Embedding,
                tol,
            )?;
            Ok(TrajectoryPoint {
                x,
                psi: bottom_block(&prop.apply(&state)?, order, n),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::{MatrixC, MatrixR};

    fn q(a: f64, b: f64, c: f64, d: f64) -> Quaternion {
        Quaternion::new(a, b, c, d)
    }

    fn scalar_vec(x: Quaternion) -> VectorH {
        VectorH::new(vec![x]).unwrap()
    }

    #[test]
    fn companion_shapes() {
        let (a, b) = (q(1.0, 2.0, 0.0, 0.0), q(0.0, 0.0, 3.0, 4.0));
        let Operator::H(c) = companion(&OdeProblem::second_order_h(a, b)).unwrap() else { panic!() };
        assert_eq!(c.rows(), vec![vec![a, b], vec![Quaternion::ONE, Quaternion::ZERO]]);

        let p = OdeProblem::new(vec![Operator::R(MatrixR::right_unit(2, 1))], None).unwrap();
        assert_eq!(companion(&p).unwrap(), p.coefficients[0]);

        let zero = Operator::H(MatrixH::zeros(1));
        let p = OdeProblem::new(vec![zero.clone(), zero.clone(), zero], None).unwrap();
        let Operator::H(c) = companion(&p).unwrap() else { panic!() };
        let c3 = c.mul(&c).unwrap().mul(&c).unwrap();
        assert!(c3.is_zero() && !c.mul(&c).unwrap().is_zero());
    }

    #[test]
    fn mixed_kinds_rejected() {
        let p = OdeProblem::new(
            vec![Operator::H(MatrixH::zeros(1)), Operator::C(MatrixC::zeros(1))],
            None,
        );
        assert!(matches!(p, Err(Error::KindMismatch { .. })));
        let p = OdeProblem::second_order_h(Quaternion::ZERO, Quaternion::ONE).with_initial(vec![scalar_vec(Quaternion::ONE)]);
        assert!(p.is_err());
    }

    #[test]
    fn sphere_of_square_roots_of_minus_one() {
        let r = quadratic_roots(Quaternion::ZERO, Quaternion::real(-1.0)).unwrap();
        assert!(r.spherical);
        assert_eq!(r.roots.len(), 1);
        assert!((r.roots[0] - Quaternion::I).norm() < 1e-14);
    }

    #[test]
    fn real_roots_are_isolated() {
        let r = quadratic_roots(Quaternion::ZERO, Quaternion::ONE).unwrap();
        assert!(!r.spherical);
        assert_eq!(r.roots.len(), 2);
        assert!((r.roots[0] + Quaternion::ONE).norm() < 1e-14);
        assert!((r.roots[1] - Quaternion::ONE).norm() < 1e-14);
    }

    #[test]
    fn noncommuting_coefficients() {
        let (a, b) = (q(0.0, 1.0, 1.0, 0.0), Quaternion::ONE);
        let r = quadratic_roots(a, b).unwrap();
        assert!(!r.spherical);
        assert_eq!(r.roots.len(), 2);
        for &x in &r.roots {
            assert!(quadratic_residual(a, b, x) < 1e-12);
        }
    }

    #[test]
    fn oscillator_exponents() {
        let p = OdeProblem::second_order_h(Quaternion::ZERO, Quaternion::real(-1.0));
        let sols = general_solution(&p).unwrap();
        assert_eq!(sols.len(), 2);
        for s in &sols {
            let Exponent::Complex { z } = s.exponent else { panic!() };
            assert!((z - Complex64::new(0.0, 1.0)).norm() < 1e-12);
            let ql = s.left_exponents.as_ref().unwrap()[0];
            assert!(quadratic_residual(Quaternion::ZERO, Quaternion::real(-1.0), ql) < 1e-12);
        }
    }

    #[test]
    fn cosine_ivp() {
        let p = OdeProblem::second_order_h(Quaternion::ZERO, Quaternion::real(-1.0))
            .with_initial(vec![scalar_vec(Quaternion::ONE), scalar_vec(Quaternion::ZERO)])
            .unwrap();
        let xs: Vec<f64> = (0..20).map(|k| 0.3 * k as f64).collect();
        for pt in solve_ivp(&p, &xs).unwrap() {
            assert!((pt.psi[0] - Quaternion::real(pt.x.cos())).norm() < 1e-12);
        }
    }

    #[test]
    fn first_order_right_rotation_is_coupled() {
        let p = OdeProblem::new(vec![Operator::R(MatrixR::right_unit(1, 1))], None).unwrap();
        let sols = general_solution(&p).unwrap();
        assert_eq!(sols.len(), 2);
        for s in &sols {
            assert_eq!(s.exponent, Exponent::Coupled { lambda: 0.0, mu: 1.0 });
            // psi' = psi i for both members
            let h = 1e-5;
            for second in [false, true] {
                let x = 0.7;
                let d = s.evaluate(x + h, second).sub(&s.evaluate(x - h, second)).scale(0.5 / h);
                let rhs = s.evaluate(x, second).mul_right(Quaternion::I);
                assert!(d.sub(&rhs).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn defective_companion() {
        // psi'' = 0
        let p = OdeProblem::second_order_h(Quaternion::ZERO, Quaternion::ZERO);
        assert!(matches!(general_solution(&p), Err(Error::DefectiveCompanion)));
    }
}
