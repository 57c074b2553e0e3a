//! Structure-preserving embeddings of quaternionic operators.
//!
//! * `f`: `MatrixH -> 2n x 2n` complex, `[[M1, -conj M2], [M2, conj M1]]` for `M = M1 + j M2`.
//! * `g`: `MatrixC -> 2n x 2n` complex, `f(m0) + i f(m1)`.
//! * `h`: `MatrixR -> 4n x 4n` real, `sum_mu hat(m_mu) B_mu` with `B = (1, I, J, K)`.
//!
//! Vectors embed as `(psi1; psi2)` (complex) and `(psi0; psi1; psi2; psi3)` (real),
//! each block holding one component of every entry.

use num_complex::Complex64;

use crate::dense::{ComplexMatrix, ComplexVector, RealMatrix, RealVector};
use crate::error::{Error, Result};
use crate::linops::{MatrixC, MatrixH, MatrixR, VectorH};
use crate::quat::{symplectic_decompose, Quaternion, SymplecticPair};

pub const DEFAULT_IMAGE_TOL: f64 = 1e-10;

const I_UNIT: Complex64 = Complex64::new(0.0, 1.0);

/// Signed 4x4 permutation for left multiplication by `h_a` on `(q0, q1, q2, q3)`.
fn left_pattern(a: usize) -> [[f64; 4]; 4] {
    pattern(|x| Quaternion::UNITS[a] * x)
}

/// Signed 4x4 permutation for right multiplication by `h_b`.
fn right_pattern(b: usize) -> [[f64; 4]; 4] {
    pattern(|x| x * Quaternion::UNITS[b])
}

fn pattern(op: impl Fn(Quaternion) -> Quaternion) -> [[f64; 4]; 4] {
    let mut p = [[0.0; 4]; 4];
    for (s, unit) in Quaternion::UNITS.iter().enumerate() {
        let col = op(*unit).to_array();
        for r in 0..4 {
            p[r][s] = col[r];
        }
    }
    p
}

fn mul4(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// `L_a R_b` as a 4x4 signed permutation.
fn lr_pattern(a: usize, b: usize) -> [[f64; 4]; 4] {
    mul4(&left_pattern(a), &right_pattern(b))
}

fn kron_identity(p: &[[f64; 4]; 4], n: usize) -> RealMatrix {
    let mut out = RealMatrix::zeros(4 * n);
    for (r, row) in p.iter().enumerate() {
        for (s, &v) in row.iter().enumerate() {
            if v != 0.0 {
                for i in 0..n {
                    out[(r * n + i, s * n + i)] = v;
                }
            }
        }
    }
    out
}

/// The real counterparts of the right actions `R_i`, `R_j`, `R_k` on `H^n`.
pub fn right_unit_matrices(n: usize) -> [RealMatrix; 3] {
    [1, 2, 3].map(|b| kron_identity(&right_pattern(b), n))
}

pub fn embed_f(m: &MatrixH) -> ComplexMatrix {
    let n = m.dim();
    let mut out = ComplexMatrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            let SymplecticPair { z1, z2 } = symplectic_decompose(m[(i, j)]);
            out[(i, j)] = z1;
            out[(i, n + j)] = -z2.conj();
            out[(n + i, j)] = z2;
            out[(n + i, n + j)] = z1.conj();
        }
    }
    out
}

pub fn embed_g(m: &MatrixC) -> ComplexMatrix {
    let a = embed_f(&m.m0);
    let b = embed_f(&m.m1);
    &a + &b.scale(I_UNIT)
}

/// Real `4n x 4n` block pattern of an `H`-linear matrix (left multiplication).
pub fn embed_h_left(m: &MatrixH) -> RealMatrix {
    let n = m.dim();
    let mut out = RealMatrix::zeros(4 * n);
    let pats: Vec<_> = (0..4).map(left_pattern).collect();
    for i in 0..n {
        for j in 0..n {
            let c = m[(i, j)].to_array();
            for (a, pat) in pats.iter().enumerate() {
                if c[a] == 0.0 {
                    continue;
                }
                for r in 0..4 {
                    for s in 0..4 {
                        if pat[r][s] != 0.0 {
                            out[(r * n + i, s * n + j)] += pat[r][s] * c[a];
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn embed_h(m: &MatrixR) -> RealMatrix {
    let n = m.dim();
    let mut out = RealMatrix::zeros(4 * n);
    for (b, part) in m.parts.iter().enumerate() {
        if part.is_zero() {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let c = part[(i, j)].to_array();
                for (a, &ca) in c.iter().enumerate() {
                    if ca == 0.0 {
                        continue;
                    }
                    let pat = lr_pattern(a, b);
                    for r in 0..4 {
                        for s in 0..4 {
                            if pat[r][s] != 0.0 {
                                out[(r * n + i, s * n + j)] += pat[r][s] * ca;
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn embed_vec_f(v: &VectorH) -> ComplexVector {
    let n = v.len();
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n];
    for (i, q) in v.iter().enumerate() {
        let p = symplectic_decompose(*q);
        out[i] = p.z1;
        out[n + i] = p.z2;
    }
    out
}

pub fn embed_vec_h(v: &VectorH) -> RealVector {
    let n = v.len();
    let mut out = vec![0.0; 4 * n];
    for (i, q) in v.iter().enumerate() {
        for (c, x) in q.to_array().into_iter().enumerate() {
            out[c * n + i] = x;
        }
    }
    out
}

/// Inverse of [`embed_vec_f`]: `psi = psi1 + j psi2`.
pub fn unembed_vec_f(v: &[Complex64]) -> Result<VectorH> {
    if v.is_empty() || !v.len().is_multiple_of(2) {
        return Err(Error::InvalidInput(format!(
            "complex vector length {} is not a positive even number",
            v.len()
        )));
    }
    let n = v.len() / 2;
    VectorH::new(
        (0..n)
            .map(|i| SymplecticPair { z1: v[i], z2: v[n + i] }.reconstruct())
            .collect(),
    )
}

/// Inverse of [`embed_vec_h`].
pub fn unembed_vec_h(v: &[f64]) -> Result<VectorH> {
    if v.is_empty() || !v.len().is_multiple_of(4) {
        return Err(Error::InvalidInput(format!(
            "real vector length {} is not a positive multiple of 4",
            v.len()
        )));
    }
    let n = v.len() / 4;
    VectorH::new(
        (0..n)
            .map(|i| Quaternion::new(v[i], v[n + i], v[2 * n + i], v[3 * n + i]))
            .collect(),
    )
}

fn half_dim(m: usize, factor: usize) -> Result<usize> {
    if m == 0 || !m.is_multiple_of(factor) {
        return Err(Error::InvalidInput(format!(
            "matrix dimension {m} is not a positive multiple of {factor}"
        )));
    }
    Ok(m / factor)
}

fn relative_scale(max_abs: f64) -> f64 {
    if max_abs > 0.0 {
        max_abs
    } else {
        1.0
    }
}

/// Distance of `c` from the image of `f`, relative to its largest entry.
pub fn f_pattern_violation(c: &ComplexMatrix) -> Result<f64> {
    let n = half_dim(c.dim(), 2)?;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let d1 = (c[(i, j)] - c[(n + i, n + j)].conj()).norm();
            let d2 = (c[(n + i, j)] + c[(i, n + j)].conj()).norm();
            worst = worst.max(d1).max(d2);
        }
    }
    Ok(worst / relative_scale(c.max_abs()))
}

/// Preimage under `f`, averaging the redundant blocks.
pub fn pullback_f(c: &ComplexMatrix, tol: f64) -> Result<MatrixH> {
    let violation = f_pattern_violation(c)?;
    if !(violation <= tol) {
        return Err(Error::NotInImage { violation });
    }
    let n = c.dim() / 2;
    Ok(MatrixH::from_fn(n, |i, j| {
        let z1 = (c[(i, j)] + c[(n + i, n + j)].conj()) * 0.5;
        let z2 = (c[(n + i, j)] - c[(i, n + j)].conj()) * 0.5;
        SymplecticPair { z1, z2 }.reconstruct()
    }))
}

/// Preimage under `g`. The map is onto all `2n x 2n` complex matrices, so
/// `tol` only guards against non-finite input.
pub fn pullback_g(c: &ComplexMatrix, tol: f64) -> Result<MatrixC> {
    let n = half_dim(c.dim(), 2)?;
    if !c.is_finite() {
        return Err(Error::NotInImage {
            violation: f64::INFINITY,
        });
    }
    let _ = tol;
    let mut m0 = MatrixH::zeros(n);
    let mut m1 = MatrixH::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let p = c[(i, j)];
            let q = c[(i, n + j)];
            let r = c[(n + i, j)];
            let s = c[(n + i, n + j)];
            let a0 = (p + s.conj()) * 0.5;
            let a1 = (p - s.conj()) / (2.0 * I_UNIT);
            let b0 = (r - q.conj()) * 0.5;
            let b1 = (r + q.conj()) / (2.0 * I_UNIT);
            m0[(i, j)] = SymplecticPair { z1: a0, z2: b0 }.reconstruct();
            m1[(i, j)] = SymplecticPair { z1: a1, z2: b1 }.reconstruct();
        }
    }
    Ok(MatrixC { m0, m1 })
}

/// Preimage under `h` by projection onto the orthogonal basis `L_a R_b`.
/// Like `g`, `h` is onto, so only non-finite input is rejected.
pub fn pullback_h(c: &RealMatrix, tol: f64) -> Result<MatrixR> {
    let n = half_dim(c.dim(), 4)?;
    if !c.is_finite() {
        return Err(Error::NotInImage {
            violation: f64::INFINITY,
        });
    }
    let _ = tol;
    let mut parts: [MatrixH; 4] = std::array::from_fn(|_| MatrixH::zeros(n));
    for (b, part) in parts.iter_mut().enumerate() {
        for a in 0..4 {
            let pat = lr_pattern(a, b);
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0.0;
                    for (r, row) in pat.iter().enumerate() {
                        for (s, &v) in row.iter().enumerate() {
                            if v != 0.0 {
                                acc += v * c[(r * n + i, s * n + j)];
                            }
                        }
                    }
                    let mut comps = part[(i, j)].to_array();
                    comps[a] = acc * 0.25;
                    part[(i, j)] = Quaternion::from_array(comps);
                }
            }
        }
    }
    Ok(MatrixR { parts })
}
