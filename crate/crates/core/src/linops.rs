//! Quaternionic vectors and the three operator kinds.
//!
//! * [`MatrixH`]: `H`-linear, an `n x n` quaternionic matrix acting from the left.
//! * [`MatrixC`]: `C`-linear, `m0 + m1 R_i`.
//! * [`MatrixR`]: `R`-linear, `m0 + m1 R_i + m2 R_j + m3 R_k`.
//!
//! Right actions `R_mu psi = psi h_mu` compose in reversed order:
//! `R_mu R_nu psi = psi h_nu h_mu`. Left units `L_mu` are not a separate type;
//! `L_k W` is simply the matrix `k W`.

use std::ops::{Index, IndexMut};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quat::Quaternion;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct VectorH {
    entries: Vec<Quaternion>,
}

impl VectorH {
    pub fn new(entries: Vec<Quaternion>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidInput("vector length must be at least 1".into()));
        }
        Ok(Self { entries })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: vec![Quaternion::ZERO; n],
        }
    }

    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.entries[k] = Quaternion::ONE;
        v
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Quaternion> {
        self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &Quaternion> {
        self.entries.iter()
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `psi q`, scalar acting from the right.
    pub fn mul_right(&self, q: Quaternion) -> Self {
        Self {
            entries: self.entries.iter().map(|&x| x * q).collect(),
        }
    }

    /// `q psi`, scalar acting from the left.
    pub fn mul_left(&self, q: Quaternion) -> Self {
        Self {
            entries: self.entries.iter().map(|&x| q * x).collect(),
        }
    }

    pub fn scale(&self, r: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|&x| x * r).collect(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.len(), o.len(), "vector length mismatch");
        Self {
            entries: self.entries.iter().zip(&o.entries).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!(self.len(), o.len(), "vector length mismatch");
        Self {
            entries: self.entries.iter().zip(&o.entries).map(|(&a, &b)| a - b).collect(),
        }
    }

    /// Quaternionic inner product `sum conj(a_i) b_i` (conjugate-linear on the left).
    pub fn inner(&self, o: &Self) -> Quaternion {
        self.entries
            .iter()
            .zip(&o.entries)
            .fold(Quaternion::ZERO, |acc, (&a, &b)| acc + a.conj() * b)
    }

    /// Unit-norm copy; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(1.0 / n))
    }
}

impl Index<usize> for VectorH {
    type Output = Quaternion;
    fn index(&self, i: usize) -> &Quaternion {
        &self.entries[i]
    }
}

impl IndexMut<usize> for VectorH {
    fn index_mut(&mut self, i: usize) -> &mut Quaternion {
        &mut self.entries[i]
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Square quaternionic matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixH {
    n: usize,
    data: Vec<Quaternion>,
}

impl MatrixH {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Quaternion::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scalar(n, Quaternion::ONE)
    }

    /// `q` times the identity (the left action `L_q`).
    pub fn scalar(n: usize, q: Quaternion) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = q;
        }
        m
    }

    pub fn diag(d: &[Quaternion]) -> Self {
        let mut m = Self::zeros(d.len());
        for (i, &q) in d.iter().enumerate() {
            m[(i, i)] = q;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Quaternion) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(rows: &[Vec<Quaternion>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::InvalidInput("matrix dimension must be at least 1".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for r in rows {
            check_dim(n, r.len())?;
            data.extend_from_slice(r);
        }
        Ok(Self { n, data })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[VectorH]) -> Result<Self> {
        let n = cols.len();
        for c in cols {
            check_dim(n, c.len())?;
        }
        Ok(Self::from_fn(n, |i, j| cols[j][i]))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<Quaternion>> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn column(&self, j: usize) -> VectorH {
        VectorH {
            entries: (0..self.n).map(|i| self[(i, j)]).collect(),
        }
    }

    pub fn as_slice(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(Quaternion) -> Quaternion) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&q| f(q)).collect(),
        }
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&q| q == Quaternion::ZERO)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|q| q.is_finite())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        check_dim(self.n, o.n)?;
        Ok(Self {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| a + b).collect(),
        })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        check_dim(self.n, o.n)?;
        Ok(Self {
            n: self.n,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| a - b).collect(),
        })
    }

    pub fn scale(&self, r: f64) -> Self {
        self.map(|q| q * r)
    }

    /// Entry-wise `q m`: the product `L_q m`.
    pub fn mul_left_scalar(&self, q: Quaternion) -> Self {
        self.map(|x| q * x)
    }

    /// Entry-wise `m q`.
    pub fn mul_right_scalar(&self, q: Quaternion) -> Self {
        self.map(|x| x * q)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        check_dim(self.n, o.n)?;
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Quaternion::ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * o.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Inverse through the complex embedding; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let inv = crate::embed::embed_f(self).inverse()?;
        crate::embed::pullback_f(&inv, 1e-6).ok()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    /// Component matrices `(M0, M1, M2, M3)` with `M = M0 + i M1 + j M2 + k M3`.
    pub fn real_components(&self) -> [Vec<f64>; 4] {
        let mut out: [Vec<f64>; 4] = Default::default();
        for q in &self.data {
            out[0].push(q.q0);
            out[1].push(q.q1);
            out[2].push(q.q2);
            out[3].push(q.q3);
        }
        out
    }

    /// Copies `block` into the window at block coordinates `(bi, bj)`.
    pub fn set_block(&mut self, bi: usize, bj: usize, block: &Self) {
        let s = block.n;
        for i in 0..s {
            for j in 0..s {
                self[(bi * s + i, bj * s + j)] = block[(i, j)];
            }
        }
    }

    pub fn block(&self, bi: usize, bj: usize, size: usize) -> Self {
        Self::from_fn(size, |i, j| self[(bi * size + i, bj * size + j)])
    }

    /// Trailing principal submatrix starting at `start`.
    pub fn trailing(&self, start: usize) -> Self {
        let m = self.n - start;
        Self::from_fn(m, |i, j| self[(start + i, start + j)])
    }
}

impl Index<(usize, usize)> for MatrixH {
    type Output = Quaternion;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Quaternion {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for MatrixH {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion {
        &mut self.data[i * self.n + j]
    }
}

/// `C`-linear operator `m0 + m1 R_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixC {
    pub m0: MatrixH,
    pub m1: MatrixH,
}

impl MatrixC {
    pub fn new(m0: MatrixH, m1: MatrixH) -> Result<Self> {
        check_dim(m0.dim(), m1.dim())?;
        Ok(Self { m0, m1 })
    }

    pub fn from_h(m: MatrixH) -> Self {
        let n = m.dim();
        Self {
            m0: m,
            m1: MatrixH::zeros(n),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_h(MatrixH::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_h(MatrixH::zeros(n))
    }

    /// The right action `R_i` on `n` components.
    pub fn right_i(n: usize) -> Self {
        Self {
            m0: MatrixH::zeros(n),
            m1: MatrixH::identity(n),
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.m0.dim()
    }

    pub fn to_r(&self) -> MatrixR {
        let n = self.dim();
        MatrixR {
            parts: [
                self.m0.clone(),
                self.m1.clone(),
                MatrixH::zeros(n),
                MatrixH::zeros(n),
            ],
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(Self {
            m0: self.m0.add(&o.m0)?,
            m1: self.m1.add(&o.m1)?,
        })
    }

    pub fn scale(&self, r: f64) -> Self {
        Self {
            m0: self.m0.scale(r),
            m1: self.m1.scale(r),
        }
    }

    /// `(A0 + A1 R_i)(B0 + B1 R_i) = (A0 B0 - A1 B1) + (A0 B1 + A1 B0) R_i`.
    pub fn mul(&self, o: &Self) -> Result<Self> {
        let a0b0 = self.m0.mul(&o.m0)?;
        let a1b1 = self.m1.mul(&o.m1)?;
        let a0b1 = self.m0.mul(&o.m1)?;
        let a1b0 = self.m1.mul(&o.m0)?;
        Ok(Self {
            m0: a0b0.sub(&a1b1)?,
            m1: a0b1.add(&a1b0)?,
        })
    }

    pub fn fro_norm(&self) -> f64 {
        crate::embed::embed_g(self).fro_norm() / std::f64::consts::SQRT_2
    }
}

/// `R`-linear operator `sum_mu parts[mu] R_mu`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixR {
    pub parts: [MatrixH; 4],
}

impl MatrixR {
    pub fn new(parts: [MatrixH; 4]) -> Result<Self> {
        let n = parts[0].dim();
        for p in &parts[1..] {
            check_dim(n, p.dim())?;
        }
        Ok(Self { parts })
    }

    pub fn from_h(m: MatrixH) -> Self {
        let n = m.dim();
        Self {
            parts: [m, MatrixH::zeros(n), MatrixH::zeros(n), MatrixH::zeros(n)],
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_h(MatrixH::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        Self::from_h(MatrixH::identity(n))
    }

    /// The right action `R_mu` (`mu = 0..4` for `1, i, j, k`) on `n` components.
    pub fn right_unit(n: usize, mu: usize) -> Self {
        let mut m = Self::zeros(n);
        m.parts[mu] = MatrixH::identity(n);
        m
    }

    /// `L_a R_b` for basis units `h_a`, `h_b`.
    pub fn left_right(n: usize, a: usize, b: usize) -> Self {
        let mut m = Self::zeros(n);
        m.parts[b] = MatrixH::scalar(n, Quaternion::UNITS[a]);
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.parts[0].dim()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(Self {
            parts: [
                self.parts[0].add(&o.parts[0])?,
                self.parts[1].add(&o.parts[1])?,
                self.parts[2].add(&o.parts[2])?,
                self.parts[3].add(&o.parts[3])?,
            ],
        })
    }

    pub fn scale(&self, r: f64) -> Self {
        Self {
            parts: self.parts.clone().map(|p| p.scale(r)),
        }
    }

    /// Composition `self ∘ o`.
    ///
    /// `(A_mu R_mu)(B_nu R_nu) psi = A_mu B_nu psi h_nu h_mu`, so each pair
    /// contributes `A_mu B_nu` to the component of `h_nu h_mu` (a signed unit).
    pub fn mul(&self, o: &Self) -> Result<Self> {
        check_dim(self.dim(), o.dim())?;
        let mut out = Self::zeros(self.dim());
        for mu in 0..4 {
            for nu in 0..4 {
                let (target, sign) = unit_product(nu, mu);
                let prod = self.parts[mu].mul(&o.parts[nu])?;
                let term = if sign > 0.0 { prod } else { prod.scale(-1.0) };
                out.parts[target] = out.parts[target].add(&term)?;
            }
        }
        Ok(out)
    }

    pub fn fro_norm(&self) -> f64 {
        crate::embed::embed_h(self).fro_norm() / 2.0
    }
}

/// `h_a h_b = sign * h_target`.
pub(crate) fn unit_product(a: usize, b: usize) -> (usize, f64) {
    let p = Quaternion::UNITS[a] * Quaternion::UNITS[b];
    let c = p.to_array();
    let idx = c.iter().position(|x| *x != 0.0).expect("unit product is a signed unit");
    (idx, c[idx])
}

/// `m v`, entries multiplied from the left.
pub fn apply_h(m: &MatrixH, v: &VectorH) -> Result<VectorH> {
    check_dim(m.dim(), v.len())?;
    let n = m.dim();
    let entries = (0..n)
        .map(|i| (0..n).fold(Quaternion::ZERO, |acc, j| acc + m[(i, j)] * v[j]))
        .collect();
    Ok(VectorH { entries })
}

/// `m0 v + (m1 v) i`.
pub fn apply_c(m: &MatrixC, v: &VectorH) -> Result<VectorH> {
    let a = apply_h(&m.m0, v)?;
    let b = apply_h(&m.m1, v)?;
    Ok(a.add(&b.mul_right(Quaternion::I)))
}

/// `sum_mu (m_mu v) h_mu`.
pub fn apply_r(m: &MatrixR, v: &VectorH) -> Result<VectorH> {
    check_dim(m.dim(), v.len())?;
    let mut out = VectorH::zeros(v.len());
    for (mu, part) in m.parts.iter().enumerate() {
        if part.is_zero() {
            continue;
        }
        out = out.add(&apply_h(part, v)?.mul_right(Quaternion::UNITS[mu]));
    }
    Ok(out)
}

pub fn mul_r(a: &MatrixR, b: &MatrixR) -> Result<MatrixR> {
    a.mul(b)
}

pub fn adjoint_h(m: &MatrixH) -> MatrixH {
    m.adjoint()
}

/// Which ring an operator lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    H,
    C,
    R,
}

impl OperatorKind {
    pub fn tag(self) -> &'static str {
        match self {
            OperatorKind::H => "H",
            OperatorKind::C => "C",
            OperatorKind::R => "R",
        }
    }

    pub fn parts(self) -> usize {
        match self {
            OperatorKind::H => 1,
            OperatorKind::C => 2,
            OperatorKind::R => 4,
        }
    }
}

/// An operator of any of the three kinds.
#[derive(Clone, Debug, PartialEq)]
pub enum Operator {
    H(MatrixH),
    C(MatrixC),
    R(MatrixR),
}

impl Operator {
    pub fn kind(&self) -> OperatorKind {
        match self {
            Operator::H(_) => OperatorKind::H,
            Operator::C(_) => OperatorKind::C,
            Operator::R(_) => OperatorKind::R,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Operator::H(m) => m.dim(),
            Operator::C(m) => m.dim(),
            Operator::R(m) => m.dim(),
        }
    }

    pub fn identity(kind: OperatorKind, n: usize) -> Self {
        match kind {
            OperatorKind::H => Operator::H(MatrixH::identity(n)),
            OperatorKind::C => Operator::C(MatrixC::identity(n)),
            OperatorKind::R => Operator::R(MatrixR::identity(n)),
        }
    }

    pub fn zeros(kind: OperatorKind, n: usize) -> Self {
        match kind {
            OperatorKind::H => Operator::H(MatrixH::zeros(n)),
            OperatorKind::C => Operator::C(MatrixC::zeros(n)),
            OperatorKind::R => Operator::R(MatrixR::zeros(n)),
        }
    }

    pub fn apply(&self, v: &VectorH) -> Result<VectorH> {
        match self {
            Operator::H(m) => apply_h(m, v),
            Operator::C(m) => apply_c(m, v),
            Operator::R(m) => apply_r(m, v),
        }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (Operator::H(a), Operator::H(b)) => Ok(Operator::H(a.mul(b)?)),
            (Operator::C(a), Operator::C(b)) => Ok(Operator::C(a.mul(b)?)),
            (Operator::R(a), Operator::R(b)) => Ok(Operator::R(a.mul(b)?)),
            (a, b) => Err(Error::KindMismatch {
                expected: a.kind().tag(),
                found: b.kind().tag(),
            }),
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        match (self, o) {
            (Operator::H(a), Operator::H(b)) => Ok(Operator::H(a.add(b)?)),
            (Operator::C(a), Operator::C(b)) => Ok(Operator::C(a.add(b)?)),
            (Operator::R(a), Operator::R(b)) => Ok(Operator::R(a.add(b)?)),
            (a, b) => Err(Error::KindMismatch {
                expected: a.kind().tag(),
                found: b.kind().tag(),
            }),
        }
    }

    pub fn scale(&self, r: f64) -> Self {
        match self {
            Operator::H(m) => Operator::H(m.scale(r)),
            Operator::C(m) => Operator::C(m.scale(r)),
            Operator::R(m) => Operator::R(m.scale(r)),
        }
    }

    /// Frobenius norm of the operator on `H^n` viewed as `R^{4n}`, halved so
    /// that it agrees with the quaternionic Frobenius norm on `H`-linear input.
    pub fn norm(&self) -> f64 {
        match self {
            Operator::H(m) => m.fro_norm(),
            Operator::C(m) => m.fro_norm(),
            Operator::R(m) => m.fro_norm(),
        }
    }

    /// The same operator viewed in the widest ring.
    pub fn to_r(&self) -> MatrixR {
        match self {
            Operator::H(m) => MatrixR::from_h(m.clone()),
            Operator::C(m) => m.to_r(),
            Operator::R(m) => m.clone(),
        }
    }

    /// Parts in storage order (1, 2 or 4 matrices).
    pub fn parts(&self) -> Vec<&MatrixH> {
        match self {
            Operator::H(m) => vec![m],
            Operator::C(m) => vec![&m.m0, &m.m1],
            Operator::R(m) => m.parts.iter().collect(),
        }
    }

    pub fn from_parts(kind: OperatorKind, parts: Vec<MatrixH>) -> Result<Self> {
        if parts.len() != kind.parts() {
            return Err(Error::InvalidInput(format!(
                "kind {} expects {} parts, got {}",
                kind.tag(),
                kind.parts(),
                parts.len()
            )));
        }
        let mut it = parts.into_iter();
        let mut next = || it.next().expect("part count checked");
        Ok(match kind {
            OperatorKind::H => Operator::H(next()),
            OperatorKind::C => Operator::C(MatrixC::new(next(), next())?),
            OperatorKind::R => Operator::R(MatrixR::new([next(), next(), next(), next()])?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: f64, b: f64, c: f64, d: f64) -> Quaternion {
        Quaternion::new(a, b, c, d)
    }

    #[test]
    fn apply_h_examples() {
        let v = VectorH::new(vec![q(1.0, 2.0, 3.0, 4.0), q(-1.0, 0.5, 0.0, 2.0)]).unwrap();
        assert_eq!(apply_h(&MatrixH::identity(2), &v).unwrap(), v);

        // j (1 + k) = j + jk = j + i
        let m = MatrixH::scalar(1, Quaternion::J);
        let r = apply_h(&m, &VectorH::new(vec![q(1.0, 0.0, 0.0, 1.0)]).unwrap()).unwrap();
        assert_eq!(r[0], Quaternion::J * q(1.0, 0.0, 0.0, 1.0));
        assert_eq!(r[0], q(0.0, 1.0, 1.0, 0.0));

        let mut shift = MatrixH::zeros(2);
        shift[(0, 1)] = Quaternion::ONE;
        let r = apply_h(&shift, &v).unwrap();
        assert_eq!(r[0], v[1]);
        assert_eq!(r[1], Quaternion::ZERO);
    }

    #[test]
    fn apply_r_examples() {
        let v = VectorH::new(vec![q(0.3, -1.0, 2.0, 0.5)]).unwrap();
        let ri = MatrixR::right_unit(1, 1);
        assert_eq!(apply_r(&ri, &v).unwrap()[0], v[0] * Quaternion::I);

        // L_i R_i 1 = i 1 i = -1
        let lr = MatrixR::left_right(1, 1, 1);
        let one = VectorH::new(vec![Quaternion::ONE]).unwrap();
        assert_eq!(apply_r(&lr, &one).unwrap()[0], -Quaternion::ONE);

        assert_eq!(apply_r(&MatrixR::zeros(1), &v).unwrap()[0], Quaternion::ZERO);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let v = VectorH::zeros(3);
        assert!(matches!(
            apply_h(&MatrixH::identity(2), &v),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
        assert!(MatrixR::identity(2).mul(&MatrixR::identity(3)).is_err());
        assert!(VectorH::new(vec![]).is_err());
    }

    #[test]
    fn right_units_compose_in_reverse() {
        let ri = MatrixR::right_unit(1, 1);
        let rj = MatrixR::right_unit(1, 2);
        let rk = MatrixR::right_unit(1, 3);
        // R_i R_j = -R_k
        assert_eq!(mul_r(&ri, &rj).unwrap(), rk.scale(-1.0));
        // R_k R_j R_i = -1
        let kji = mul_r(&mul_r(&rk, &rj).unwrap(), &ri).unwrap();
        assert_eq!(kji, MatrixR::identity(1).scale(-1.0));
        for mu in 1..4 {
            let r = MatrixR::right_unit(1, mu);
            assert_eq!(mul_r(&r, &r).unwrap(), MatrixR::identity(1).scale(-1.0));
        }
    }

    #[test]
    fn left_and_right_units_commute() {
        for a in 0..4 {
            for b in 0..4 {
                let l = MatrixR::from_h(MatrixH::scalar(1, Quaternion::UNITS[a]));
                let r = MatrixR::right_unit(1, b);
                assert_eq!(mul_r(&l, &r).unwrap(), mul_r(&r, &l).unwrap());
            }
        }
    }

    #[test]
    fn identity_is_neutral() {
        let mut a = MatrixR::zeros(2);
        a.parts[2][(0, 1)] = q(1.0, 2.0, -1.0, 0.5);
        a.parts[1][(1, 0)] = q(0.0, 3.0, 0.0, -2.0);
        assert_eq!(mul_r(&a, &MatrixR::identity(2)).unwrap(), a);
        assert_eq!(mul_r(&MatrixR::identity(2), &a).unwrap(), a);
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(
            adjoint_h(&MatrixH::scalar(1, Quaternion::J)),
            MatrixH::scalar(1, -Quaternion::J)
        );
        assert_eq!(adjoint_h(&MatrixH::identity(3)), MatrixH::identity(3));
        let x = q(1.0, 2.0, 3.0, 4.0);
        let mut m = MatrixH::zeros(2);
        m[(0, 1)] = x;
        let mut expected = MatrixH::zeros(2);
        expected[(1, 0)] = x.conj();
        assert_eq!(adjoint_h(&m), expected);
        assert_eq!(adjoint_h(&adjoint_h(&m)), m);
    }

    #[test]
    fn c_linear_failure_for_j() {
        // R_i is C-linear but not H-linear: R_i(v j) != (R_i v) j.
        let m = MatrixC::right_i(1);
        let v = VectorH::new(vec![Quaternion::ONE]).unwrap();
        let lhs = apply_c(&m, &v.mul_right(Quaternion::J)).unwrap();
        let rhs = apply_c(&m, &v).unwrap().mul_right(Quaternion::J);
        assert!(lhs.sub(&rhs).norm() > 0.1);
    }
}
