//! Integer powers and exponentials of quaternionic operators.

use num_complex::Complex64;

use crate::dense::{DenseMatrix, Scalar};
use crate::eigen::{eig_complex, eig_real};
use crate::embed::{embed_f, embed_g, embed_h, pullback_f, pullback_g, pullback_h};
use crate::error::{Error, Result};
use crate::linops::{MatrixH, Operator};
use crate::quat::Quaternion;
use crate::spectra::{diagonalize_h_with, Tolerances};

/// `exp(operator * x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PropagatorRequest {
    pub operator: Operator,
    pub x: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExpmRoute {
    /// Dense exponential of the embedding, pulled back.
    #[default]
    Embedding,
    /// Eigendecomposition `S exp(D x) S^-1`; fails on defective input.
    Canonical,
}

/// Condition-number cap for the eigenvector matrix in the canonical route.
const CONDITION_CAP: f64 = 1e12;

pub fn power(m: &Operator, k: u32) -> Operator {
    let mut result = Operator::identity(m.kind(), m.dim());
    let mut base = m.clone();
    let mut e = k;
    while e > 0 {
        if e & 1 == 1 {
            result = result.mul(&base).expect("same kind and dimension");
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(&base).expect("same kind and dimension");
        }
    }
    result
}

/// Embedding route with default tolerances.
pub fn expm(req: &PropagatorRequest) -> Result<Operator> {
    expm_with(req, ExpmRoute::Embedding, &Tolerances::default())
}

pub fn expm_with(req: &PropagatorRequest, route: ExpmRoute, tol: &Tolerances) -> Result<Operator> {
    if !req.x.is_finite() {
        return Err(Error::InvalidInput(format!("evolution parameter must be finite, got {}", req.x)));
    }
    match route {
        ExpmRoute::Embedding => expm_embedding(&req.operator, req.x, tol.image),
        ExpmRoute::Canonical => expm_canonical(&req.operator, req.x, tol),
    }
}

fn not_in_image(e: Error) -> Error {
    match e {
        Error::NotInImage { violation } => Error::InternalConsistency(format!(
            "exponential left the embedding image (pattern violation {violation:.3e})"
        )),
        other => other,
    }
}

fn expm_embedding(op: &Operator, x: f64, image_tol: f64) -> Result<Operator> {
    Ok(match op {
        Operator::H(m) => {
            let e = expm_dense(&embed_f(m).scale(Complex64::new(x, 0.0)));
            Operator::H(pullback_f(&e, image_tol).map_err(not_in_image)?)
        }
        Operator::C(m) => {
            let e = expm_dense(&embed_g(m).scale(Complex64::new(x, 0.0)));
            Operator::C(pullback_g(&e, image_tol).map_err(not_in_image)?)
        }
        Operator::R(m) => {
            let e = expm_dense(&embed_h(m).scale(x));
            Operator::R(pullback_h(&e, image_tol).map_err(not_in_image)?)
        }
    })
}

fn expm_canonical(op: &Operator, x: f64, tol: &Tolerances) -> Result<Operator> {
    match op {
        Operator::H(m) => {
            let cf = diagonalize_h_with(m, tol)?;
            let s_inv = cf
                .s
                .inverse()
                .ok_or_else(|| Error::InternalConsistency("eigenvector matrix lost invertibility".into()))?;
            let d: Vec<Quaternion> = (0..m.dim())
                .map(|k| Quaternion::from_complex((cf.d[(k, k)].complex_part() * x).exp()))
                .collect();
            Ok(Operator::H(cf.s.mul(&MatrixH::diag(&d))?.mul(&s_inv)?))
        }
        Operator::C(m) => {
            let e = eigen_exp(&embed_g(m), x, tol.residual)?;
            Ok(Operator::C(pullback_g(&e, tol.image).map_err(not_in_image)?))
        }
        Operator::R(m) => {
            let h = embed_h(m);
            let spec = eig_real(&h, tol.residual)?;
            let e = assemble_exp(&spec.eigenvalues, &spec.eigenvectors, spec.independent_count(), x)?;
            Ok(Operator::R(pullback_h(&e.real_part(), tol.image).map_err(not_in_image)?))
        }
    }
}

fn eigen_exp(a: &DenseMatrix<Complex64>, x: f64, residual: f64) -> Result<DenseMatrix<Complex64>> {
    let spec = eig_complex(a, residual)?;
    assemble_exp(&spec.eigenvalues, &spec.eigenvectors, spec.independent_count(), x)
}

fn assemble_exp(
    values: &[Complex64],
    vectors: &[Vec<Complex64>],
    independent: usize,
    x: f64,
) -> Result<DenseMatrix<Complex64>> {
    let n = values.len();
    if independent < n {
        return Err(Error::Defective { structure: vec![] });
    }
    let mut v = DenseMatrix::zeros(n);
    for (j, col) in vectors.iter().enumerate() {
        v.set_column(j, col);
    }
    let v_inv = v.inverse().ok_or(Error::Defective { structure: vec![] })?;
    if v.inf_norm() * v_inv.inf_norm() > CONDITION_CAP {
        return Err(Error::Defective { structure: vec![] });
    }
    let d = DenseMatrix::from_diag(&values.iter().map(|z| (z * x).exp()).collect::<Vec<_>>());
    Ok(v.matmul(&d).matmul(&v_inv))
}

/// Scaling and squaring with a diagonal (6, 6) Pade approximant.
pub fn expm_dense<T: Scalar>(a: &DenseMatrix<T>) -> DenseMatrix<T> {
    const Q: usize = 6;
    let n = a.dim();
    let norm = a.inf_norm();
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let a = a.scale(T::from_f64(0.5f64.powi(squarings as i32)));

    let mut c = [1.0; Q + 1];
    for k in 1..=Q {
        c[k] = c[k - 1] * (Q - k + 1) as f64 / (k * (2 * Q - k + 1)) as f64;
    }
    let mut num = DenseMatrix::identity(n);
    let mut den = DenseMatrix::identity(n);
    let mut p = DenseMatrix::identity(n);
    for (k, &ck) in c.iter().enumerate().skip(1) {
        p = p.matmul(&a);
        let term = p.scale(T::from_f64(ck));
        num = &num + &term;
        den = if k % 2 == 0 { &den + &term } else { &den - &term };
    }
    let lu = den.lu();
    let mut r = DenseMatrix::zeros(n);
    for j in 0..n {
        r.set_column(j, &lu.solve(&num.column(j)));
    }
    for _ in 0..squarings {
        r = r.matmul(&r);
    }
    r
}
