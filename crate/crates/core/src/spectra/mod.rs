//! Right eigenvalue problems for `H`- and `C`-linear matrices and the coupled
//! problem for `R`-linear matrices.

mod canonical;

pub use canonical::{
    diagonalize_h, diagonalize_h_with, jordan_structure, jordan_structure_with, translate_d_blocks,
    triangularize_h, triangularize_h_with, CanonicalFormH, DBlockKind, JordanGroup, JordanReport,
    PseudoTriangular,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::dense::{inner, vec_norm, ComplexVector};
use crate::eigen::{eig_complex, eig_real};
use crate::embed::{embed_f, embed_g, embed_h, unembed_vec_f, unembed_vec_h};
use crate::error::{Error, Result};
use crate::linops::{apply_c, apply_h, apply_r, MatrixC, MatrixH, MatrixR, VectorH};
use crate::quat::Quaternion;

/// Tolerances shared by the spectral routines.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Relative residual bound `||M psi - psi z|| <= residual ||M||`.
    pub residual: f64,
    /// Relative pattern violation accepted by the embedding pullbacks.
    pub image: f64,
    /// Relative rank threshold for Jordan structure decisions.
    pub cluster: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual: 1e-8,
            image: 1e-10,
            cluster: 1e-9,
        }
    }
}

/// Right eigenpair `M psi = psi z` with complex `z`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenpairH {
    pub z: Complex64,
    pub psi: VectorH,
    /// `||M psi - psi z||` for the unit vector `psi`.
    pub residual: f64,
    /// `false` when the embedding could not supply an independent eigenvector
    /// for this copy of `z` (defective operator).
    pub independent: bool,
}

/// Coupled pair `M psi = lambda psi - mu phi`, `M phi = lambda phi + mu psi`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoupledEigenpair {
    pub lambda: f64,
    pub mu: f64,
    pub psi: VectorH,
    pub phi: VectorH,
    /// Larger of the two equation residuals.
    pub residual: f64,
}

impl CoupledEigenpair {
    /// Residuals of the two coupled equations for `m`.
    pub fn residuals(&self, m: &MatrixR) -> Result<(f64, f64)> {
        coupled_residuals(m, self.lambda, self.mu, &self.psi, &self.phi)
    }
}

pub(crate) fn coupled_residuals(
    m: &MatrixR,
    lambda: f64,
    mu: f64,
    psi: &VectorH,
    phi: &VectorH,
) -> Result<(f64, f64)> {
    let mpsi = apply_r(m, psi)?;
    let mphi = apply_r(m, phi)?;
    let r1 = mpsi.sub(&psi.scale(lambda).sub(&phi.scale(mu))).norm();
    let r2 = mphi.sub(&phi.scale(lambda).add(&psi.scale(mu))).norm();
    Ok((r1, r2))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoupledCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl CoupledCoefficients {
    /// `(a + d)^2 - 4 (ad - bc)`; negative exactly when the block has complex eigenvalues.
    pub fn discriminant(&self) -> f64 {
        let tr = self.a + self.d;
        tr * tr - 4.0 * (self.a * self.d - self.b * self.c)
    }
}

/// `(lambda, mu)` with `lambda ± i mu` the eigenvalues of `[[a, b], [c, d]]`, `mu > 0`.
pub fn reduce_coupled_coefficients(c: CoupledCoefficients) -> Result<(f64, f64)> {
    let disc = c.discriminant();
    if !(disc < 0.0) {
        return Err(Error::NonComplexSpectrum { discriminant: disc });
    }
    Ok((0.5 * (c.a + c.d), 0.5 * (-disc).sqrt()))
}

fn pair_residual_h(m: &MatrixH, psi: &VectorH, z: Complex64) -> Result<f64> {
    Ok(apply_h(m, psi)?.sub(&psi.mul_right(Quaternion::from_complex(z))).norm())
}

fn pair_residual_c(m: &MatrixC, psi: &VectorH, z: Complex64) -> Result<f64> {
    Ok(apply_c(m, psi)?.sub(&psi.mul_right(Quaternion::from_complex(z))).norm())
}

/// `J (x1; x2) = (-conj x2; conj x1)`, the antilinear symmetry of `f`-images.
fn j_map(v: &[Complex64]) -> ComplexVector {
    let n = v.len() / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    for i in 0..n {
        out[i] = -v[n + i].conj();
        out[n + i] = v[i].conj();
    }
    out
}

fn project_out(v: &mut [Complex64], basis: &[ComplexVector]) {
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
}

fn unit_vector_h(v: &[Complex64]) -> Result<VectorH> {
    let psi = unembed_vec_f(v)?;
    Ok(psi.normalized().unwrap_or(psi))
}

pub fn right_eig_h(m: &MatrixH) -> Result<Vec<EigenpairH>> {
    right_eig_h_with(m, &Tolerances::default())
}

/// `n` right eigenpairs with `Im z >= 0`, from the `2n` eigenpairs of `f(m)`.
pub fn right_eig_h_with(m: &MatrixH, tol: &Tolerances) -> Result<Vec<EigenpairH>> {
    let n = m.dim();
    let f = embed_f(m);
    let spec = eig_complex(&f, tol.residual)?;
    let scale = f.fro_norm().max(f64::MIN_POSITIVE);
    let tau = 1e-8 * scale;

    // (z, vector, independent)
    let mut chosen: Vec<(Complex64, ComplexVector, bool)> = Vec::with_capacity(n);
    let mut upper: Vec<usize> = (0..spec.len()).filter(|&k| spec.eigenvalues[k].im > tau).collect();
    if upper.len() > n {
        upper.sort_by(|&a, &b| spec.eigenvalues[b].im.total_cmp(&spec.eigenvalues[a].im));
        upper.truncate(n);
        upper.sort_unstable();
    }
    for &k in &upper {
        chosen.push((spec.eigenvalues[k], spec.eigenvectors[k].clone(), spec.report[k].independent));
    }

    // Near-real eigenvalues come in J-related pairs (v, Jv) describing one
    // quaternionic direction; keep one vector per pair.
    let near: Vec<usize> = (0..spec.len()).filter(|&k| spec.eigenvalues[k].im.abs() <= tau).collect();
    let needed = n - chosen.len();
    let mut basis: Vec<ComplexVector> = Vec::new();
    let mut picked = Vec::new();
    for &k in &near {
        if picked.len() == needed {
            break;
        }
        let v = &spec.eigenvectors[k];
        let mut r = v.clone();
        project_out(&mut r, &basis);
        let rn = vec_norm(&r);
        if rn > 1e-3 && spec.report[k].independent {
            r.iter_mut().for_each(|x| *x /= rn);
            let jr = j_map(&r);
            basis.push(r);
            basis.push(jr);
            picked.push(k);
        }
    }
    let mut fill = near.iter().copied().filter(|k| !picked.contains(k));
    let mut dependent = Vec::new();
    while picked.len() + dependent.len() < needed {
        match fill.next() {
            Some(k) => dependent.push(k),
            None => break,
        }
    }
    for (&k, independent) in picked.iter().map(|k| (k, true)).chain(dependent.iter().map(|k| (k, false))) {
        let z = spec.eigenvalues[k];
        let v = if z.im < 0.0 {
            j_map(&spec.eigenvectors[k])
        } else {
            spec.eigenvectors[k].clone()
        };
        chosen.push((Complex64::new(z.re, z.im.abs()), v, independent));
    }
    if chosen.len() != n {
        return Err(Error::InternalConsistency(format!(
            "embedding spectrum yielded {} right eigenvalue representatives for dimension {n}",
            chosen.len()
        )));
    }
    chosen.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    chosen
        .into_iter()
        .map(|(z, v, independent)| {
            let psi = unit_vector_h(&v)?;
            let residual = pair_residual_h(m, &psi, z)?;
            Ok(EigenpairH {
                z,
                psi,
                residual,
                independent,
            })
        })
        .collect()
}

pub fn right_eig_c(m: &MatrixC) -> Result<Vec<EigenpairH>> {
    right_eig_c_with(m, &Tolerances::default())
}

/// All `2n` right eigenpairs `M psi = psi z` of a `C`-linear matrix.
pub fn right_eig_c_with(m: &MatrixC, tol: &Tolerances) -> Result<Vec<EigenpairH>> {
    let g = embed_g(m);
    let spec = eig_complex(&g, tol.residual)?;
    (0..spec.len())
        .map(|k| {
            let z = spec.eigenvalues[k];
            let psi = unit_vector_h(&spec.eigenvectors[k])?;
            let residual = pair_residual_c(m, &psi, z)?;
            Ok(EigenpairH {
                z,
                psi,
                residual,
                independent: spec.report[k].independent,
            })
        })
        .collect()
}

pub fn coupled_eig_r(m: &MatrixR) -> Result<Vec<CoupledEigenpair>> {
    coupled_eig_r_with(m, &Tolerances::default())
}

/// Coupled pairs from the real embedding: one pair per real eigenvalue
/// (`mu = 0`, `phi = 0`) and one per eigenvalue with positive imaginary part.
pub fn coupled_eig_r_with(m: &MatrixR, tol: &Tolerances) -> Result<Vec<CoupledEigenpair>> {
    let h = embed_h(m);
    let spec = eig_real(&h, tol.residual)?;
    let mut out = Vec::new();
    for k in 0..spec.len() {
        let z = spec.eigenvalues[k];
        if z.im < 0.0 {
            continue;
        }
        let v = &spec.eigenvectors[k];
        let p: Vec<f64> = v.iter().map(|x| x.re).collect();
        let (psi, phi, mu) = if z.im == 0.0 {
            let psi = unembed_vec_h(&p)?;
            (psi.normalized().unwrap_or(psi), VectorH::zeros(m.dim()), 0.0)
        } else {
            let q: Vec<f64> = v.iter().map(|x| x.im).collect();
            let norm = vec_norm(v).max(f64::MIN_POSITIVE);
            let psi = unembed_vec_h(&p)?.scale(1.0 / norm);
            let phi = unembed_vec_h(&q)?.scale(1.0 / norm);
            (psi, phi, z.im)
        };
        let (r1, r2) = coupled_residuals(m, z.re, mu, &psi, &phi)?;
        out.push(CoupledEigenpair {
            lambda: z.re,
            mu,
            psi,
            phi,
            residual: r1.max(r2),
        });
    }
    Ok(out)
}

/// Turns a coupled pair of a `C`-linear matrix into a right eigenpair:
/// `psi + phi i` has eigenvalue `lambda + i mu`, `psi - phi i` has
/// `lambda - i mu`; the better conditioned (larger) combination is returned.
pub fn verify_coupled_equiv_c(m: &MatrixC, pair: &CoupledEigenpair) -> Result<EigenpairH> {
    verify_coupled_equiv_c_with(m, pair, &Tolerances::default())
}

pub fn verify_coupled_equiv_c_with(
    m: &MatrixC,
    pair: &CoupledEigenpair,
    tol: &Tolerances,
) -> Result<EigenpairH> {
    let n = m.dim();
    if pair.psi.len() != n || pair.phi.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: pair.psi.len(),
        });
    }
    let (r1, r2) = coupled_residuals(&m.to_r(), pair.lambda, pair.mu, &pair.psi, &pair.phi)?;
    let size = pair.psi.norm() + pair.phi.norm();
    let bound = tol.residual * m.fro_norm().max(f64::MIN_POSITIVE) * size.max(f64::MIN_POSITIVE);
    if r1.max(r2) > bound {
        return Err(Error::InvalidInput(format!(
            "pair does not satisfy the coupled equations (residual {:.3e})",
            r1.max(r2)
        )));
    }
    let phi_i = pair.phi.mul_right(Quaternion::I);
    let plus = pair.psi.add(&phi_i);
    let minus = pair.psi.sub(&phi_i);
    let (chi, z) = if plus.norm() >= minus.norm() {
        (plus, Complex64::new(pair.lambda, pair.mu))
    } else {
        (minus, Complex64::new(pair.lambda, -pair.mu))
    };
    if chi.norm() <= 1e-12 * size.max(f64::MIN_POSITIVE) || size == 0.0 {
        return Err(Error::DegeneratePair);
    }
    let psi = chi.normalized().ok_or(Error::DegeneratePair)?;
    let residual = pair_residual_c(m, &psi, z)?;
    Ok(EigenpairH {
        z,
        psi,
        residual,
        independent: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_j() {
        let m = MatrixH::scalar(1, Quaternion::J);
        let pairs = right_eig_h(&m).unwrap();
        assert_eq!(pairs.len(), 1);
        assert!((pairs[0].z - c(0., 1.)).norm() < 1e-14);
        let expected = Quaternion::new(1.0, 0.0, 0.0, 1.0) * std::f64::consts::FRAC_1_SQRT_2;
        // j (1 + k) = (1 + k) i
        assert_eq!(
            Quaternion::J * Quaternion::new(1.0, 0.0, 0.0, 1.0),
            Quaternion::new(1.0, 0.0, 0.0, 1.0) * Quaternion::I
        );
        assert!((pairs[0].psi[0] - expected).norm() < 1e-14);
    }

    #[test]
    fn scalar_i() {
        let pairs = right_eig_h(&MatrixH::scalar(1, Quaternion::I)).unwrap();
        assert!((pairs[0].z - c(0., 1.)).norm() < 1e-15);
        assert!((pairs[0].psi[0] - Quaternion::ONE).norm() < 1e-15);
    }

    #[test]
    fn real_eigenvalues_counted_once() {
        let m = MatrixH::diag(&[Quaternion::real(2.0), Quaternion::real(-1.0), Quaternion::real(2.0)]);
        let pairs = right_eig_h(&m).unwrap();
        let zs: Vec<f64> = pairs.iter().map(|p| p.z.re).collect();
        assert_eq!(zs, vec![-1.0, 2.0, 2.0]);
        assert!(pairs.iter().all(|p| p.residual < 1e-14 && p.independent));
    }

    #[test]
    fn right_i_c_linear() {
        let pairs = right_eig_c(&MatrixC::right_i(1)).unwrap();
        assert_eq!(pairs.len(), 2);
        for p in &pairs {
            assert!((p.z - c(0., 1.)).norm() < 1e-14);
            assert!(p.residual < 1e-14);
        }
        // R_i psi = psi i holds for psi = 1 and psi = j alike; -i is not an eigenvalue
        assert_eq!(pairs[0].psi[0], Quaternion::ONE);
        assert_eq!(pairs[1].psi[0], Quaternion::J);
    }

    #[test]
    fn zero_c_linear() {
        let pairs = right_eig_c(&MatrixC::zeros(2)).unwrap();
        assert_eq!(pairs.len(), 4);
        assert!(pairs.iter().all(|p| p.z == c(0., 0.) && p.residual == 0.0));
    }

    #[test]
    fn coupled_right_i() {
        let m = MatrixR::right_unit(1, 1);
        let pairs = coupled_eig_r(&m).unwrap();
        assert_eq!(pairs.len(), 2);
        for p in &pairs {
            assert!(p.lambda.abs() < 1e-14 && (p.mu - 1.0).abs() < 1e-14);
            assert!(p.residual < 1e-14);
        }
        // psi = 1, phi = -i solves both lines exactly
        let one = VectorH::new(vec![Quaternion::ONE]).unwrap();
        let minus_i = VectorH::new(vec![-Quaternion::I]).unwrap();
        let (r1, r2) = coupled_residuals(&m, 0.0, 1.0, &one, &minus_i).unwrap();
        assert_eq!((r1, r2), (0.0, 0.0));
    }

    #[test]
    fn coupled_left_right_i() {
        let m = MatrixR::left_right(1, 1, 1);
        let pairs = coupled_eig_r(&m).unwrap();
        let mut ls: Vec<f64> = pairs.iter().map(|p| p.lambda).collect();
        ls.sort_by(f64::total_cmp);
        assert_eq!(ls, vec![-1.0, -1.0, 1.0, 1.0]);
        assert!(pairs.iter().all(|p| p.mu == 0.0 && p.residual < 1e-14));
    }

    #[test]
    fn reduce_examples() {
        let r = |a, b, c, d| reduce_coupled_coefficients(CoupledCoefficients { a, b, c, d });
        assert_eq!(r(0.0, -1.0, 1.0, 0.0).unwrap(), (0.0, 1.0));
        let (l, m) = r(1.5, -0.25, 0.25, 1.5).unwrap();
        assert!((l - 1.5).abs() < 1e-15 && (m - 0.25).abs() < 1e-15);
        assert!(matches!(r(1.0, 0.0, 0.0, 2.0), Err(Error::NonComplexSpectrum { .. })));
    }

    #[test]
    fn equivalence_from_right_pair() {
        let mut m0 = MatrixH::zeros(2);
        m0[(0, 0)] = Quaternion::new(1.0, 2.0, 0.0, -1.0);
        m0[(0, 1)] = Quaternion::new(0.5, 0.0, 1.0, 0.0);
        m0[(1, 1)] = Quaternion::new(-1.0, 0.0, 0.0, 2.0);
        let mut m1 = MatrixH::zeros(2);
        m1[(1, 0)] = Quaternion::new(0.0, 1.0, 1.0, 0.0);
        let m = MatrixC::new(m0, m1).unwrap();
        for p in right_eig_c(&m).unwrap() {
            // psi z = lambda psi + mu psi i, so (psi, phi = psi i) solves the
            // coupled system with mu -> -mu
            let pair = CoupledEigenpair {
                lambda: p.z.re,
                mu: -p.z.im,
                psi: p.psi.clone(),
                phi: p.psi.mul_right(Quaternion::I),
                residual: 0.0,
            };
            let back = verify_coupled_equiv_c(&m, &pair).unwrap();
            assert!((back.z - p.z).norm() < 1e-12);
            assert!(back.psi.sub(&p.psi).norm() < 1e-12);
        }
    }

    #[test]
    fn equivalence_real_case() {
        let m = MatrixC::from_h(MatrixH::diag(&[Quaternion::real(3.0), Quaternion::real(-2.0)]));
        let pair = CoupledEigenpair {
            lambda: 3.0,
            mu: 0.0,
            psi: VectorH::basis(2, 0),
            phi: VectorH::zeros(2),
            residual: 0.0,
        };
        let back = verify_coupled_equiv_c(&m, &pair).unwrap();
        assert_eq!(back.z, c(3.0, 0.0));
        assert_eq!(back.psi, VectorH::basis(2, 0));
        let zero = CoupledEigenpair {
            psi: VectorH::zeros(2),
            ..pair
        };
        assert!(matches!(verify_coupled_equiv_c(&m, &zero), Err(Error::DegeneratePair)));
    }
}
