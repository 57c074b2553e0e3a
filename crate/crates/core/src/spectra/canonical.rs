//! Diagonalization, triangularization and Jordan structure.

use num_complex::Complex64;
use serde::Serialize;

use super::{right_eig_h_with, Tolerances};
use crate::dense::{rank, ComplexMatrix, RealMatrix};
use crate::eigen::{clusters, eigenvalues_complex, eigenvalues_real, real_schur};
use crate::embed::{embed_f, embed_g, embed_h};
use crate::error::{Error, Result};
use crate::linops::{apply_h, MatrixH, MatrixR, Operator, OperatorKind, VectorH};
use crate::quat::Quaternion;

/// `M S = S (D + N)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalFormH {
    pub s: MatrixH,
    pub d: MatrixH,
    pub nilpotent: MatrixH,
    /// Jordan block sizes per distinct eigenvalue.
    pub structure: Vec<Vec<usize>>,
    /// `||M - S D S^-1||_F`.
    pub residual: f64,
}

pub fn diagonalize_h(m: &MatrixH) -> Result<CanonicalFormH> {
    diagonalize_h_with(m, &Tolerances::default())
}

pub fn diagonalize_h_with(m: &MatrixH, tol: &Tolerances) -> Result<CanonicalFormH> {
    let n = m.dim();
    let pairs = right_eig_h_with(m, tol)?;
    if pairs.iter().any(|p| !p.independent) {
        return Err(defective(m, tol));
    }
    let cols: Vec<VectorH> = pairs.iter().map(|p| p.psi.clone()).collect();
    let s = MatrixH::from_columns(&cols)?;
    let Some(s_inv) = s.inverse() else {
        return Err(defective(m, tol));
    };
    let d = MatrixH::diag(&pairs.iter().map(|p| Quaternion::from_complex(p.z)).collect::<Vec<_>>());
    let back = s.mul(&d)?.mul(&s_inv)?;
    let residual = m.sub(&back)?.fro_norm();
    if residual > tol.residual * m.fro_norm().max(f64::MIN_POSITIVE) {
        return Err(defective(m, tol));
    }
    let zs: Vec<Complex64> = pairs.iter().map(|p| p.z).collect();
    let radius = 1e-8 * m.fro_norm().max(f64::MIN_POSITIVE);
    let structure = clusters(&zs, radius).iter().map(|g| vec![1; g.len()]).collect();
    Ok(CanonicalFormH {
        s,
        d,
        nilpotent: MatrixH::zeros(n),
        structure,
        residual,
    })
}

fn defective(m: &MatrixH, tol: &Tolerances) -> Error {
    match jordan_structure_with(&Operator::H(m.clone()), tol) {
        Ok(report) => Error::Defective {
            structure: report.structure(),
        },
        Err(e) => e,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JordanGroup {
    pub eigenvalue: Complex64,
    /// Block sizes, descending.
    pub blocks: Vec<usize>,
}

/// Real pseudo-triangular form `J = O A O^-1 = D + N` of the real embedding.
///
/// `D` holds `1x1` real eigenvalues and `2x2` blocks `[[l, -m], [m, l]]`;
/// `N` is the strictly block-upper remainder.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoTriangular {
    pub o: RealMatrix,
    pub o_inv: RealMatrix,
    pub d: RealMatrix,
    pub n: RealMatrix,
    /// Start index and size of each diagonal block.
    pub blocks: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JordanReport {
    pub kind: OperatorKind,
    pub groups: Vec<JordanGroup>,
    pub pseudo_triangular: Option<PseudoTriangular>,
}

impl JordanReport {
    pub fn structure(&self) -> Vec<Vec<usize>> {
        self.groups.iter().map(|g| g.blocks.clone()).collect()
    }

    pub fn is_diagonalizable(&self) -> bool {
        self.groups.iter().all(|g| g.blocks.iter().all(|&b| b == 1))
    }
}

pub fn jordan_structure(op: &Operator) -> Result<JordanReport> {
    jordan_structure_with(op, &Tolerances::default())
}

/// Jordan block sizes from rank sequences of `(A - lambda)^k` on the embedding.
///
/// `H`: eigenvalues with `Im >= 0`; real eigenvalues, which the complex
/// embedding doubles, have their block list halved. `C`: every eigenvalue of
/// the `g` embedding. `R`: eigenvalues of the real embedding with `Im >= 0`,
/// plus the pseudo-triangular form.
pub fn jordan_structure_with(op: &Operator, tol: &Tolerances) -> Result<JordanReport> {
    let (a, values, real_h) = match op {
        Operator::H(m) => {
            let f = embed_f(m);
            let v = eigenvalues_complex(&f)?;
            (f, v, None)
        }
        Operator::C(m) => {
            let g = embed_g(m);
            let v = eigenvalues_complex(&g)?;
            (g, v, None)
        }
        Operator::R(m) => {
            let h = embed_h(m);
            let v = eigenvalues_real(&h)?;
            (h.to_complex(), v, Some(h))
        }
    };
    let dim = a.dim();
    let sv = a.singular_values();
    let scale = sv.first().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let radius = tol.cluster.sqrt() * a.fro_norm().max(f64::MIN_POSITIVE);
    let mut groups = Vec::new();
    for members in clusters(&values, radius) {
        let s = members.len();
        let mean = members.iter().map(|&k| values[k]).sum::<Complex64>() / s as f64;
        let b = a.shifted(mean);
        let mut nullity = vec![0usize];
        let mut power = ComplexMatrix::identity(dim);
        for k in 1..=s {
            power = power.matmul(&b);
            let thr = tol.cluster * scale.powi(k as i32);
            let null_k = (dim - rank(&power, thr)).max(*nullity.last().expect("seeded"));
            nullity.push(null_k);
            if null_k >= s {
                break;
            }
        }
        let reached = *nullity.last().expect("seeded");
        if reached != s {
            return Err(Error::ClusterAmbiguity {
                eigenvalue: mean,
                expected: s,
                found: reached,
            });
        }
        let at_least: Vec<usize> = nullity.windows(2).map(|w| w[1] - w[0]).collect();
        let mut blocks = Vec::with_capacity(at_least[0]);
        for k in 1..=at_least.len() {
            let exactly = at_least[k - 1] - at_least.get(k).copied().unwrap_or(0);
            blocks.extend(std::iter::repeat_n(k, exactly));
        }
        blocks.sort_unstable_by(|x, y| y.cmp(x));
        groups.push(JordanGroup {
            eigenvalue: mean,
            blocks,
        });
    }

    let kind = op.kind();
    let mut kept = Vec::new();
    for mut g in groups {
        let near_real = g.eigenvalue.im.abs() <= radius;
        match kind {
            OperatorKind::C => kept.push(g),
            OperatorKind::H | OperatorKind::R if g.eigenvalue.im < 0.0 && !near_real => {}
            OperatorKind::H => {
                if near_real {
                    if g.blocks.len() % 2 != 0 {
                        return Err(Error::InternalConsistency(format!(
                            "real eigenvalue {} of the complex embedding has unpaired Jordan blocks {:?}",
                            g.eigenvalue.re, g.blocks
                        )));
                    }
                    g.blocks = g.blocks.iter().step_by(2).copied().collect();
                    g.eigenvalue.im = 0.0;
                }
                kept.push(g);
            }
            OperatorKind::R => {
                if near_real {
                    g.eigenvalue.im = 0.0;
                }
                kept.push(g);
            }
        }
    }
    kept.sort_by(|x, y| {
        x.eigenvalue
            .re
            .total_cmp(&y.eigenvalue.re)
            .then(x.eigenvalue.im.total_cmp(&y.eigenvalue.im))
    });
    let pseudo_triangular = match real_h {
        Some(h) => Some(pseudo_triangular(&h)?),
        None => None,
    };
    Ok(JordanReport {
        kind,
        groups: kept,
        pseudo_triangular,
    })
}

fn pseudo_triangular(h: &RealMatrix) -> Result<PseudoTriangular> {
    let (z, t) = real_schur(h)?;
    let n = t.dim();
    let mut scale = vec![1.0; n];
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            let (b, c) = (t[(i, i + 1)], t[(i + 1, i)]);
            scale[i] = (b.abs() / c.abs()).sqrt();
            scale[i + 1] = if b > 0.0 { -1.0 } else { 1.0 };
            blocks.push((i, 2));
            i += 2;
        } else {
            blocks.push((i, 1));
            i += 1;
        }
    }
    // J = D^-1 T D, O = D^-1 Z^T
    let j = RealMatrix::from_fn(n, |r, c| t[(r, c)] * scale[c] / scale[r]);
    let o = RealMatrix::from_fn(n, |r, c| z[(c, r)] / scale[r]);
    let o_inv = RealMatrix::from_fn(n, |r, c| z[(r, c)] * scale[c]);
    let mut d = RealMatrix::zeros(n);
    for &(p, size) in &blocks {
        if size == 1 {
            d[(p, p)] = t[(p, p)];
        } else {
            let lam = t[(p, p)];
            let mu = (-(t[(p, p + 1)] * t[(p + 1, p)])).sqrt();
            d[(p, p)] = lam;
            d[(p + 1, p + 1)] = lam;
            d[(p, p + 1)] = -mu;
            d[(p + 1, p)] = mu;
        }
    }
    let mut nil = &j - &d;
    for &(p, size) in &blocks {
        for r in p..p + size {
            for c in p..p + size {
                nil[(r, c)] = 0.0;
            }
        }
    }
    Ok(PseudoTriangular {
        o,
        o_inv,
        d,
        n: nil,
        blocks,
    })
}

/// Which of the three displayed real diagonal block shapes to translate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DBlockKind {
    /// Two complex pairs: `lambdas = [l0, l1]`, `mus = [m0, m1]`.
    TwoPairs,
    /// One complex pair and two reals: `lambdas = [l0, l1, l2]`, `mus = [m0]`.
    PairAndReals,
    /// Four reals: `lambdas = [l0, l1, l2, l3]`, no `mus`.
    FourReals,
}

impl TryFrom<u8> for DBlockKind {
    type Error = Error;
    fn try_from(k: u8) -> Result<Self> {
        match k {
            1 => Ok(Self::TwoPairs),
            2 => Ok(Self::PairAndReals),
            3 => Ok(Self::FourReals),
            _ => Err(Error::InvalidInput(format!("D-block kind must be 1, 2 or 3, got {k}"))),
        }
    }
}

struct Terms(MatrixR);

impl Terms {
    fn new() -> Self {
        Terms(MatrixR::zeros(1))
    }

    /// Adds `coef L_a R_b`.
    fn add(&mut self, coef: f64, a: usize, b: usize) {
        let mut q = self.0.parts[b][(0, 0)].to_array();
        q[a] += coef;
        self.0.parts[b][(0, 0)] = Quaternion::from_array(q);
    }

    /// Adds `coef (1 + si L_i R_i + sj L_j R_j + sk L_k R_k)`.
    fn diagonal(&mut self, coef: f64, si: f64, sj: f64, sk: f64) {
        self.add(coef, 0, 0);
        self.add(coef * si, 1, 1);
        self.add(coef * sj, 2, 2);
        self.add(coef * sk, 3, 3);
    }

    /// Adds `coef (L_i + s R_i)`.
    fn rotation(&mut self, coef: f64, s: f64) {
        self.add(coef, 1, 0);
        self.add(coef * s, 0, 1);
    }
}

/// The one-component `R`-linear operator whose real embedding is the
/// requested diagonal block (`[[l, -m], [m, l]]` for complex pairs).
pub fn translate_d_blocks(kind: DBlockKind, lambdas: &[f64], mus: &[f64]) -> Result<MatrixR> {
    let expected = match kind {
        DBlockKind::TwoPairs => (2, 2),
        DBlockKind::PairAndReals => (3, 1),
        DBlockKind::FourReals => (4, 0),
    };
    if (lambdas.len(), mus.len()) != expected {
        return Err(Error::InvalidInput(format!(
            "{kind:?} takes {} lambdas and {} mus, got {} and {}",
            expected.0,
            expected.1,
            lambdas.len(),
            mus.len()
        )));
    }
    let mut t = Terms::new();
    match kind {
        DBlockKind::TwoPairs => {
            t.diagonal(0.5 * lambdas[0], -1.0, 0.0, 0.0);
            t.rotation(0.5 * mus[0], 1.0);
            t.diagonal(0.5 * lambdas[1], 1.0, 0.0, 0.0);
            t.rotation(0.5 * mus[1], -1.0);
        }
        DBlockKind::PairAndReals => {
            t.diagonal(0.5 * lambdas[0], -1.0, 0.0, 0.0);
            t.rotation(0.5 * mus[0], 1.0);
            t.diagonal(0.25 * lambdas[1], 1.0, -1.0, 1.0);
            t.diagonal(0.25 * lambdas[2], 1.0, 1.0, -1.0);
        }
        DBlockKind::FourReals => {
            t.diagonal(0.25 * lambdas[0], -1.0, -1.0, -1.0);
            t.diagonal(0.25 * lambdas[1], -1.0, 1.0, 1.0);
            t.diagonal(0.25 * lambdas[2], 1.0, -1.0, 1.0);
            t.diagonal(0.25 * lambdas[3], 1.0, 1.0, -1.0);
        }
    }
    Ok(t.0)
}

/// Unitary `U` and upper triangular `T` with `U^* M U = T`, diagonal entries
/// complex with `Im >= 0`.
pub fn triangularize_h(m: &MatrixH) -> Result<(MatrixH, MatrixH)> {
    triangularize_h_with(m, &Tolerances::default())
}

pub fn triangularize_h_with(m: &MatrixH, tol: &Tolerances) -> Result<(MatrixH, MatrixH)> {
    let n = m.dim();
    let mut u = MatrixH::identity(n);
    let mut t = m.clone();
    for k in 0..n {
        let sub = t.trailing(k);
        let pair = right_eig_h_with(&sub, tol)?
            .into_iter()
            .next()
            .expect("at least one eigenpair");
        let w = complete_unitary(&pair.psi)?;
        let w_adj = w.adjoint();
        let new_sub = w_adj.mul(&sub)?.mul(&w)?;
        let m_sub = n - k;
        for i in 0..m_sub {
            for j in 0..m_sub {
                t[(k + i, k + j)] = new_sub[(i, j)];
            }
        }
        // rows above the window pick up the change of basis on the right
        for i in 0..k {
            let row: Vec<Quaternion> = (0..m_sub).map(|j| t[(i, k + j)]).collect();
            for j in 0..m_sub {
                t[(i, k + j)] = (0..m_sub).fold(Quaternion::ZERO, |acc, l| acc + row[l] * w[(l, j)]);
            }
        }
        for i in 0..n {
            let row: Vec<Quaternion> = (0..m_sub).map(|j| u[(i, k + j)]).collect();
            for j in 0..m_sub {
                u[(i, k + j)] = (0..m_sub).fold(Quaternion::ZERO, |acc, l| acc + row[l] * w[(l, j)]);
            }
        }
        t[(k, k)] = Quaternion::from_complex(pair.z);
        for i in k + 1..n {
            t[(i, k)] = Quaternion::ZERO;
        }
    }
    Ok((u, t))
}

/// Unitary matrix whose first column is the unit vector `psi`, completed by
/// Gram-Schmidt with coefficients acting from the right.
fn complete_unitary(psi: &VectorH) -> Result<MatrixH> {
    let n = psi.len();
    let mut cols = vec![psi.normalized().ok_or_else(|| {
        Error::InternalConsistency("zero eigenvector in triangularization".into())
    })?];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| psi[a].norm().total_cmp(&psi[b].norm()));
    for e in order {
        if cols.len() == n {
            break;
        }
        let mut w = VectorH::basis(n, e);
        for _ in 0..2 {
            for c in &cols {
                w = w.sub(&c.mul_right(c.inner(&w)));
            }
        }
        if let Some(unit) = w.normalized().filter(|_| w.norm() > 1e-6) {
            cols.push(unit);
        }
    }
    if cols.len() != n {
        return Err(Error::InternalConsistency("Gram-Schmidt completion failed".into()));
    }
    MatrixH::from_columns(&cols)
}

/// `||M psi - psi z||` helper used by the canonical-form tests.
#[allow(dead_code)]
fn residual_h(m: &MatrixH, psi: &VectorH, z: Complex64) -> f64 {
    apply_h(m, psi)
        .map(|v| v.sub(&psi.mul_right(Quaternion::from_complex(z))).norm())
        .unwrap_or(f64::INFINITY)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linops::MatrixC;

    fn q(a: f64, b: f64, c: f64, d: f64) -> Quaternion {
        Quaternion::new(a, b, c, d)
    }

    #[test]
    fn diagonalize_diag_i_j() {
        let m = MatrixH::diag(&[Quaternion::I, Quaternion::J]);
        let cf = diagonalize_h(&m).unwrap();
        assert!((cf.d[(0, 0)] - Quaternion::I).norm() < 1e-14);
        assert!((cf.d[(1, 1)] - Quaternion::I).norm() < 1e-14);
        assert!(cf.residual < 1e-14);
        for k in 0..2 {
            assert!(residual_h(&m, &cf.s.column(k), cf.d[(k, k)].complex_part()) < 1e-14);
        }
        assert_eq!(cf.structure, vec![vec![1, 1]]);
    }

    #[test]
    fn nilpotent_is_defective() {
        let mut m = MatrixH::zeros(2);
        m[(0, 1)] = Quaternion::ONE;
        match diagonalize_h(&m) {
            Err(Error::Defective { structure }) => assert_eq!(structure, vec![vec![2]]),
            other => panic!("expected Defective, got {other:?}"),
        }
    }

    #[test]
    fn hermitian_has_real_spectrum() {
        let m = MatrixH::from_rows(&[vec![Quaternion::ONE, Quaternion::I], vec![-Quaternion::I, Quaternion::ONE]])
            .unwrap();
        let cf = diagonalize_h(&m).unwrap();
        assert!(cf.d[(0, 0)].norm() < 1e-14);
        assert!((cf.d[(1, 1)] - Quaternion::real(2.0)).norm() < 1e-14);
    }

    #[test]
    fn zero_matrix_structure() {
        for op in [
            Operator::H(MatrixH::zeros(3)),
            Operator::C(MatrixC::zeros(2)),
            Operator::R(MatrixR::zeros(1)),
        ] {
            let rep = jordan_structure(&op).unwrap();
            assert_eq!(rep.groups.len(), 1);
            assert_eq!(rep.groups[0].eigenvalue, Complex64::new(0.0, 0.0));
            assert!(rep.is_diagonalizable());
        }
        let rep = jordan_structure(&Operator::H(MatrixH::zeros(3))).unwrap();
        assert_eq!(rep.groups[0].blocks, vec![1, 1, 1]);
    }

    #[test]
    fn pseudo_triangular_right_i() {
        let rep = jordan_structure(&Operator::R(MatrixR::right_unit(1, 1))).unwrap();
        let pt = rep.pseudo_triangular.unwrap();
        let h = embed_h(&MatrixR::right_unit(1, 1));
        let j = pt.o.matmul(&h).matmul(&pt.o_inv);
        assert!((&j - &(&pt.d + &pt.n)).max_abs() < 1e-14);
        for &(p, size) in &pt.blocks {
            assert_eq!(size, 2);
            assert_eq!(pt.d[(p, p + 1)], -pt.d[(p + 1, p)]);
            assert!((pt.d[(p + 1, p)] - 1.0).abs() < 1e-14);
        }
        assert_eq!(rep.groups.len(), 1);
        assert_eq!(rep.groups[0].blocks, vec![1, 1]);
    }

    #[test]
    fn d_block_kinds() {
        assert!(DBlockKind::try_from(4).is_err());
        assert!(translate_d_blocks(DBlockKind::FourReals, &[1.0, 2.0, 3.0], &[]).is_err());
        let op = translate_d_blocks(DBlockKind::FourReals, &[1.0, 2.0, 3.0, 4.0], &[]).unwrap();
        assert_eq!(embed_h(&op), RealMatrix::from_diag(&[1.0, 2.0, 3.0, 4.0]));
        let op = translate_d_blocks(DBlockKind::TwoPairs, &[2.0, 2.0], &[3.0, 3.0]).unwrap();
        assert_eq!(op, MatrixR::from_h(MatrixH::scalar(1, q(2.0, 3.0, 0.0, 0.0))));
    }

    #[test]
    fn triangularize_scalar_j() {
        let (u, t) = triangularize_h(&MatrixH::scalar(1, Quaternion::J)).unwrap();
        assert!((t[(0, 0)] - Quaternion::I).norm() < 1e-14);
        let check = u.adjoint().mul(&MatrixH::scalar(1, Quaternion::J)).unwrap().mul(&u).unwrap();
        assert!((check[(0, 0)] - Quaternion::I).norm() < 1e-14);
    }

    #[test]
    fn triangularize_upper_triangular_input() {
        let m = MatrixH::from_rows(&[
            vec![q(1.0, 2.0, 0.0, 0.0), q(0.0, 1.0, 1.0, 0.0)],
            vec![Quaternion::ZERO, q(-1.0, 0.0, 0.0, 3.0)],
        ])
        .unwrap();
        let (u, t) = triangularize_h(&m).unwrap();
        let back = u.mul(&t).unwrap().mul(&u.adjoint()).unwrap();
        assert!(m.sub(&back).unwrap().fro_norm() < 1e-12);
        assert_eq!(t[(1, 0)], Quaternion::ZERO);
        for k in 0..2 {
            assert!(t[(k, k)].q2 == 0.0 && t[(k, k)].q3 == 0.0 && t[(k, k)].q1 >= 0.0);
        }
    }
}
