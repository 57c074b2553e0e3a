//! Dense nonsymmetric eigensolver.
//!
//! Eigenvalues come from balancing, Householder reduction to Hessenberg form
//! and shifted QR (complex single-shift, or real Francis double-shift which
//! also yields a real Schur form). Eigenvectors are then obtained by inverse
//! iteration on the original matrix with the converged eigenvalue as shift.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dense::{inner, vec_norm, ComplexMatrix, ComplexVector, DenseMatrix, RealMatrix, Scalar};
use crate::error::{Error, Result};

pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-8;

const EPS: f64 = f64::EPSILON;
const INVERSE_ITERATIONS: usize = 3;
const CLUSTER_RADIUS: f64 = 1e-6;
const INDEPENDENCE: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairReport {
    /// `||A v - lambda v||` for the unit vector `v`.
    pub residual: f64,
    /// QR iterations spent before this eigenvalue deflated.
    pub iterations: usize,
    /// `false` when the eigenvalue belongs to a cluster whose eigenspace is
    /// smaller than its algebraic multiplicity; the vector is then a copy of
    /// an independent one from the same cluster.
    pub independent: bool,
}

#[derive(Clone, Debug)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<Complex64>,
    pub eigenvectors: Vec<ComplexVector>,
    pub report: Vec<PairReport>,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn max_residual(&self) -> f64 {
        self.report.iter().map(|r| r.residual).fold(0.0, f64::max)
    }

    /// Number of linearly independent eigenvectors found.
    pub fn independent_count(&self) -> usize {
        self.report.iter().filter(|r| r.independent).count()
    }
}

/// Parlett-Reinsch balancing with powers of two; returns the scaled matrix.
pub fn balance<T: Scalar>(a: &DenseMatrix<T>) -> DenseMatrix<T> {
    let n = a.dim();
    let mut b = a.clone();
    const RADIX: f64 = 2.0;
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += b[(j, i)].abs();
                    r += b[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let fi = T::from_f64(1.0 / f);
                let ft = T::from_f64(f);
                for j in 0..n {
                    b[(i, j)] = b[(i, j)] * fi;
                    b[(j, i)] = b[(j, i)] * ft;
                }
            }
        }
        if done {
            return b;
        }
    }
}

/// Householder reduction `A = Q H Q^*`; `Q` is accumulated when requested.
pub fn hessenberg<T: Scalar>(a: &DenseMatrix<T>, accumulate: bool) -> (DenseMatrix<T>, Option<DenseMatrix<T>>) {
    let n = a.dim();
    let mut h = a.clone();
    let mut q = accumulate.then(|| DenseMatrix::<T>::identity(n));
    for k in 0..n.saturating_sub(2) {
        let x: Vec<T> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = vec_norm(&x);
        if xnorm == 0.0 {
            continue;
        }
        let alpha = -(x[0].sign() * T::from_f64(xnorm));
        let mut v = x;
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|z| z.abs_sqr()).sum();
        if vv == 0.0 {
            continue;
        }
        let two = T::from_f64(2.0 / vv);
        // left: rows k+1.., columns k..
        for j in k..n {
            let mut s = T::zero();
            for (m, vm) in v.iter().enumerate() {
                s += vm.conj() * h[(k + 1 + m, j)];
            }
            let s = s * two;
            for (m, vm) in v.iter().enumerate() {
                h[(k + 1 + m, j)] -= *vm * s;
            }
        }
        // right: all rows, columns k+1..
        apply_reflector_right(&mut h, &v, k + 1, 0, n, two);
        if let Some(q) = q.as_mut() {
            apply_reflector_right(q, &v, k + 1, 0, n, two);
        }
        h[(k + 1, k)] = alpha;
        for i in k + 2..n {
            h[(i, k)] = T::zero();
        }
    }
    (h, q)
}

fn apply_reflector_right<T: Scalar>(
    m: &mut DenseMatrix<T>,
    v: &[T],
    col0: usize,
    row_start: usize,
    row_end: usize,
    two: T,
) {
    for i in row_start..row_end {
        let mut s = T::zero();
        for (c, vc) in v.iter().enumerate() {
            s += m[(i, col0 + c)] * *vc;
        }
        let s = s * two;
        for (c, vc) in v.iter().enumerate() {
            m[(i, col0 + c)] -= s * vc.conj();
        }
    }
}

/// `(a, b) -> (c, s)` with `[[c, s], [-conj s, c]] (a, b)^T = (r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    let r = an.hypot(bn);
    if r == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let p = (a - d) * 0.5;
    let bc = b * c;
    let disc = (p * p + bc).sqrt();
    let den1 = p + disc;
    let den2 = p - disc;
    let den = if den1.norm() >= den2.norm() { den1 } else { den2 };
    if den.norm() == 0.0 {
        d
    } else {
        d - bc / den
    }
}

/// Eigenvalues of an upper Hessenberg complex matrix with per-eigenvalue
/// iteration counts, in deflation order.
fn complex_hessenberg_qr(mut h: ComplexMatrix) -> Result<(Vec<Complex64>, Vec<usize>)> {
    let n = h.dim();
    let mut eig = vec![Complex64::new(0.0, 0.0); n];
    let mut its_at = vec![0usize; n];
    let norm = h.max_abs().max(f64::MIN_POSITIVE);
    let cap = 30 * n.max(1);
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n;
    while hi > 0 {
        let top = hi - 1;
        let mut l = top;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == 0.0 { norm } else { s };
            if h[(l, l - 1)].norm() <= EPS * s {
                h[(l, l - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            l -= 1;
        }
        if l == top {
            eig[top] = h[(top, top)];
            its_at[top] = its;
            hi -= 1;
            its = 0;
            continue;
        }
        if total >= cap {
            return Err(Error::NoConvergence {
                iterations: total,
                partial: eig[hi..].to_vec(),
            });
        }
        total += 1;
        its += 1;
        let mu = if its == 10 || its == 20 {
            let mut s = h[(top, top - 1)].re.abs();
            if top >= 2 {
                s += h[(top - 1, top - 2)].re.abs();
            }
            h[(top, top)] + 0.75 * s
        } else {
            wilkinson(
                h[(top - 1, top - 1)],
                h[(top - 1, top)],
                h[(top, top - 1)],
                h[(top, top)],
            )
        };
        for i in l..=top {
            h[(i, i)] -= mu;
        }
        let mut rots = Vec::with_capacity(top - l);
        for k in l..top {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=top {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x * c + s * y;
                h[(k + 1, j)] = -s.conj() * x + y * c;
            }
            h[(k + 1, k)] = Complex64::new(0.0, 0.0);
            rots.push((c, s));
        }
        for (off, &(c, s)) in rots.iter().enumerate() {
            let k = l + off;
            for i in l..=(k + 1).min(top) {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x * c + y * s.conj();
                h[(i, k + 1)] = -x * s + y * c;
            }
        }
        for i in l..=top {
            h[(i, i)] += mu;
        }
    }
    Ok((eig, its_at))
}

/// Real Schur decomposition `A = Z T Z^T` with `T` quasi upper triangular.
/// Each 2x2 diagonal block of `T` has equal diagonal entries and off-diagonal
/// entries of opposite sign, so its eigenvalues are `t11 ± i sqrt(-t12 t21)`.
pub fn real_schur(a: &RealMatrix) -> Result<(RealMatrix, RealMatrix)> {
    let (t, z, _) = real_schur_impl(a)?;
    Ok((z, t))
}

fn real_schur_impl(a: &RealMatrix) -> Result<(RealMatrix, RealMatrix, Vec<usize>)> {
    let n = a.dim();
    let (mut h, z) = hessenberg(a, true);
    let mut z = z.expect("accumulated");
    let mut its_at = vec![0usize; n];
    let norm = h.max_abs().max(f64::MIN_POSITIVE);
    let cap = 30 * n.max(1);
    let mut total = 0usize;
    let mut its = 0usize;
    let mut hi = n;
    while hi > 0 {
        let top = hi - 1;
        let mut l = top;
        while l > 0 {
            let s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            let s = if s == 0.0 { norm } else { s };
            if h[(l, l - 1)].abs() <= EPS * s {
                h[(l, l - 1)] = 0.0;
                break;
            }
            l -= 1;
        }
        if l == top {
            its_at[top] = its;
            hi -= 1;
            its = 0;
            continue;
        }
        if l + 1 == top {
            standardize_block(&mut h, &mut z, top - 1);
            its_at[top] = its;
            its_at[top - 1] = its;
            hi -= 2;
            its = 0;
            continue;
        }
        if total >= cap {
            return Err(Error::NoConvergence {
                iterations: total,
                partial: quasi_triangular_eigenvalues(&h, hi),
            });
        }
        total += 1;
        its += 1;
        let (sum, prod) = if its == 10 || its == 20 {
            let s = h[(top, top - 1)].abs() + h[(top - 1, top - 2)].abs();
            (1.5 * s, s * s)
        } else {
            let (p, q) = (top - 1, top);
            (
                h[(p, p)] + h[(q, q)],
                h[(p, p)] * h[(q, q)] - h[(p, q)] * h[(q, p)],
            )
        };
        francis_sweep(&mut h, &mut z, l, top, sum, prod);
    }
    Ok((h, z, its_at))
}

fn francis_sweep(h: &mut RealMatrix, z: &mut RealMatrix, l: usize, top: usize, sum: f64, prod: f64) {
    let n = h.dim();
    let mut x = h[(l, l)] * h[(l, l)] + h[(l, l + 1)] * h[(l + 1, l)] - sum * h[(l, l)] + prod;
    let mut y = h[(l + 1, l)] * (h[(l, l)] + h[(l + 1, l + 1)] - sum);
    let mut w = h[(l + 1, l)] * h[(l + 2, l + 1)];
    for k in l..=top - 2 {
        if k > l {
            x = h[(k, k - 1)];
            y = h[(k + 1, k - 1)];
            w = h[(k + 2, k - 1)];
        }
        let v = householder_vec(&[x, y, w]);
        if let Some((v, two)) = v {
            let col0 = if k > l { k - 1 } else { l };
            reflect_rows(h, &v, k, col0, n, two);
            let row_end = (k + 3).min(top) + 1;
            apply_reflector_right(h, &v, k, 0, row_end, two);
            apply_reflector_right(z, &v, k, 0, n, two);
            if k > l {
                h[(k + 1, k - 1)] = 0.0;
                h[(k + 2, k - 1)] = 0.0;
            }
        }
    }
    let k = top - 1;
    x = h[(k, k - 1)];
    y = h[(k + 1, k - 1)];
    if let Some((v, two)) = householder_vec(&[x, y]) {
        reflect_rows(h, &v, k, k - 1, n, two);
        apply_reflector_right(h, &v, k, 0, top + 1, two);
        apply_reflector_right(z, &v, k, 0, n, two);
        h[(k + 1, k - 1)] = 0.0;
    }
}

fn householder_vec(x: &[f64]) -> Option<(Vec<f64>, f64)> {
    let norm = vec_norm(x);
    if norm == 0.0 {
        return None;
    }
    let alpha = -x[0].sign() * norm;
    let mut v = x.to_vec();
    v[0] -= alpha;
    let vv: f64 = v.iter().map(|t| t * t).sum();
    if vv == 0.0 {
        return None;
    }
    Some((v, 2.0 / vv))
}

fn reflect_rows(h: &mut RealMatrix, v: &[f64], row0: usize, col_start: usize, col_end: usize, two: f64) {
    for j in col_start..col_end {
        let s: f64 = v.iter().enumerate().map(|(m, vm)| vm * h[(row0 + m, j)]).sum::<f64>() * two;
        for (m, vm) in v.iter().enumerate() {
            h[(row0 + m, j)] -= vm * s;
        }
    }
}

/// Applies the 2x2 rotation with columns `(c, s)`, `(-s, c)` at rows/columns `p, p+1`.
fn rotate_pair(h: &mut RealMatrix, z: &mut RealMatrix, p: usize, c: f64, s: f64) {
    let n = h.dim();
    for j in 0..n {
        let x = h[(p, j)];
        let y = h[(p + 1, j)];
        h[(p, j)] = c * x + s * y;
        h[(p + 1, j)] = -s * x + c * y;
    }
    for i in 0..n {
        let x = h[(i, p)];
        let y = h[(i, p + 1)];
        h[(i, p)] = c * x + s * y;
        h[(i, p + 1)] = -s * x + c * y;
    }
    for i in 0..n {
        let x = z[(i, p)];
        let y = z[(i, p + 1)];
        z[(i, p)] = c * x + s * y;
        z[(i, p + 1)] = -s * x + c * y;
    }
}

/// Brings the converged block at `p` to standard form: triangular for real
/// eigenvalues, equal diagonal and opposite-sign off-diagonal otherwise.
fn standardize_block(h: &mut RealMatrix, z: &mut RealMatrix, p: usize) {
    let (a, b, c, d) = (h[(p, p)], h[(p, p + 1)], h[(p + 1, p)], h[(p + 1, p + 1)]);
    let half = 0.5 * (a - d);
    let disc = half * half + b * c;
    if disc >= 0.0 {
        // eigenvector (x, y) of the eigenvalue farther from cancellation
        let root = disc.sqrt();
        let lam = 0.5 * (a + d) + if half >= 0.0 { root } else { -root };
        let (x1, y1) = (b, lam - a);
        let (x2, y2) = (lam - d, c);
        let (x, y) = if x1.hypot(y1) >= x2.hypot(y2) { (x1, y1) } else { (x2, y2) };
        let r = x.hypot(y);
        if r > 0.0 {
            rotate_pair(h, z, p, x / r, y / r);
        }
        h[(p + 1, p)] = 0.0;
    } else {
        let theta = 0.5 * (-(a - d)).atan2(b + c);
        rotate_pair(h, z, p, theta.cos(), theta.sin());
        let mean = 0.5 * (h[(p, p)] + h[(p + 1, p + 1)]);
        h[(p, p)] = mean;
        h[(p + 1, p + 1)] = mean;
    }
}

fn quasi_triangular_eigenvalues(t: &RealMatrix, start: usize) -> Vec<Complex64> {
    let n = t.dim();
    let mut out = Vec::with_capacity(n - start.min(n));
    let mut i = start;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            let re = 0.5 * (t[(i, i)] + t[(i + 1, i + 1)]);
            let half = 0.5 * (t[(i, i)] - t[(i + 1, i + 1)]);
            let im = (-(half * half + t[(i, i + 1)] * t[(i + 1, i)])).max(0.0).sqrt();
            out.push(Complex64::new(re, im));
            out.push(Complex64::new(re, -im));
            i += 2;
        } else {
            out.push(Complex64::new(t[(i, i)], 0.0));
            i += 1;
        }
    }
    out
}

fn lex_sort(ev: &mut [(Complex64, usize)]) {
    ev.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
}

fn check_finite<T: Scalar>(a: &DenseMatrix<T>) -> Result<()> {
    if a.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput("matrix has non-finite entries".into()))
    }
}

/// Eigenvalues only, sorted lexicographically by `(re, im)`.
pub fn eigenvalues_complex(a: &ComplexMatrix) -> Result<Vec<Complex64>> {
    Ok(complex_values_with_iterations(a)?.into_iter().map(|p| p.0).collect())
}

pub fn eigenvalues_real(a: &RealMatrix) -> Result<Vec<Complex64>> {
    Ok(real_values_with_iterations(a)?.into_iter().map(|p| p.0).collect())
}

fn complex_values_with_iterations(a: &ComplexMatrix) -> Result<Vec<(Complex64, usize)>> {
    check_finite(a)?;
    if a.dim() == 0 {
        return Ok(vec![]);
    }
    let (h, _) = hessenberg(&balance(a), false);
    let (ev, its) = complex_hessenberg_qr(h)?;
    let mut pairs: Vec<_> = ev.into_iter().zip(its).collect();
    lex_sort(&mut pairs);
    Ok(pairs)
}

fn real_values_with_iterations(a: &RealMatrix) -> Result<Vec<(Complex64, usize)>> {
    check_finite(a)?;
    if a.dim() == 0 {
        return Ok(vec![]);
    }
    let (t, _, its) = real_schur_impl(&balance(a))?;
    let mut pairs: Vec<_> = quasi_triangular_eigenvalues(&t, 0).into_iter().zip(its).collect();
    lex_sort(&mut pairs);
    Ok(pairs)
}

pub fn eig_complex(a: &ComplexMatrix, tol: f64) -> Result<SpectrumResult> {
    let pairs = complex_values_with_iterations(a)?;
    Ok(attach_vectors(a, pairs, tol, false))
}

/// Same contract as [`eig_complex`]; the spectrum is closed under conjugation,
/// real eigenvalues carry real eigenvectors and conjugate eigenvalues carry
/// conjugate eigenvectors.
pub fn eig_real(a: &RealMatrix, tol: f64) -> Result<SpectrumResult> {
    let pairs = real_values_with_iterations(a)?;
    Ok(attach_vectors(&a.to_complex(), pairs, tol, true))
}

fn start_vector(n: usize, seed: u64) -> ComplexVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64;
            Complex64::new(2.0 * u - 1.0, 0.0)
        })
        .collect()
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let nrm = vec_norm(v);
    if nrm > 0.0 && nrm.is_finite() {
        for x in v.iter_mut() {
            *x /= nrm;
        }
    }
    nrm
}

/// Makes the largest-modulus component real and positive.
fn fix_phase(v: &mut [Complex64]) {
    let mut best = 0;
    let mut bn = -1.0;
    for (i, x) in v.iter().enumerate() {
        let m = x.norm();
        if m > bn * (1.0 + 1e-12) {
            bn = m;
            best = i;
        }
    }
    if bn > 0.0 {
        let ph = v[best].conj() / bn;
        for x in v.iter_mut() {
            *x *= ph;
        }
        v[best] = Complex64::new(v[best].re, 0.0);
    }
}

fn residual(a: &ComplexMatrix, lambda: Complex64, v: &[Complex64]) -> f64 {
    let av = a.matvec(v);
    av.iter()
        .zip(v)
        .map(|(x, y)| (x - lambda * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Removes the components along the orthonormal columns of `q`.
fn project_out(v: &mut [Complex64], q: &[ComplexVector]) {
    for _ in 0..2 {
        for b in q {
            let c = inner(b, v);
            for (x, y) in v.iter_mut().zip(b) {
                *x -= c * y;
            }
        }
    }
}

fn inverse_iteration(
    a: &ComplexMatrix,
    lambda: Complex64,
    seed: u64,
    anorm: f64,
    against: &[ComplexVector],
) -> ComplexVector {
    let n = a.dim();
    let mut lu = a.shifted(lambda).lu();
    lu.regularize((EPS * anorm).max(f64::MIN_POSITIVE));
    let mut v = start_vector(n, seed);
    project_out(&mut v, against);
    normalize(&mut v);
    for _ in 0..INVERSE_ITERATIONS {
        let mut w = lu.solve(&v);
        if !w.iter().all(|x| x.is_finite()) {
            break;
        }
        project_out(&mut w, against);
        if normalize(&mut w) == 0.0 {
            break;
        }
        v = w;
    }
    v
}

pub(crate) fn clusters(values: &[Complex64], radius: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut j = i;
        while p[j] != r {
            let next = p[j];
            p[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj.max(ri)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if root_of[r] == usize::MAX {
            root_of[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_of[r]].push(i);
    }
    groups
}

struct ClusterVectors {
    vectors: Vec<ComplexVector>,
    independent: Vec<bool>,
}

fn cluster_vectors(
    a: &ComplexMatrix,
    values: &[Complex64],
    members: &[usize],
    anorm: f64,
    tol: f64,
) -> ClusterVectors {
    let n = a.dim();
    let lambda0 = values[members[0]];
    if (a.shifted(lambda0)).fro_norm() <= tol * anorm && members.len() <= n {
        // scalar matrix: every vector is an eigenvector, use coordinates
        let vectors = (0..members.len())
            .map(|k| {
                let mut e = vec![Complex64::new(0.0, 0.0); n];
                e[k] = Complex64::new(1.0, 0.0);
                e
            })
            .collect();
        return ClusterVectors {
            vectors,
            independent: vec![true; members.len()],
        };
    }
    let mut basis: Vec<ComplexVector> = Vec::new();
    let mut vectors = Vec::with_capacity(members.len());
    let mut independent = Vec::with_capacity(members.len());
    let bound = tol * anorm.max(f64::MIN_POSITIVE);
    for &m in members {
        let lambda = values[m];
        let seed = m as u64;
        let mut accepted = None;
        let plain = inverse_iteration(a, lambda, seed, anorm, &[]);
        if distance_from(&plain, &basis) > INDEPENDENCE && residual(a, lambda, &plain) <= bound {
            accepted = Some(plain);
        } else if !basis.is_empty() {
            let projected = inverse_iteration(a, lambda, seed, anorm, &basis);
            if vec_norm(&projected) > 0.0
                && distance_from(&projected, &basis) > INDEPENDENCE
                && residual(a, lambda, &projected) <= bound
            {
                accepted = Some(projected);
            }
        }
        match accepted {
            Some(v) => {
                let mut q = v.clone();
                project_out(&mut q, &basis);
                normalize(&mut q);
                basis.push(q);
                vectors.push(v);
                independent.push(true);
            }
            None => {
                let fallback = vectors
                    .first()
                    .cloned()
                    .unwrap_or_else(|| inverse_iteration(a, lambda, seed, anorm, &[]));
                if vectors.is_empty() {
                    let mut q = fallback.clone();
                    normalize(&mut q);
                    basis.push(q);
                }
                vectors.push(fallback);
                independent.push(false);
            }
        }
    }
    ClusterVectors { vectors, independent }
}

fn distance_from(v: &[Complex64], basis: &[ComplexVector]) -> f64 {
    let mut w = v.to_vec();
    project_out(&mut w, basis);
    vec_norm(&w)
}

fn attach_vectors(a: &ComplexMatrix, pairs: Vec<(Complex64, usize)>, tol: f64, real_input: bool) -> SpectrumResult {
    let n = a.dim();
    let anorm = a.fro_norm();
    let mut values: Vec<Complex64> = pairs.iter().map(|p| p.0).collect();
    let iterations: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    let mut vectors = vec![Vec::new(); n];
    let mut independent = vec![true; n];
    let radius = CLUSTER_RADIUS * anorm.max(f64::MIN_POSITIVE);
    for members in clusters(&values, radius) {
        let mut cv = cluster_vectors(a, &values, &members, anorm, tol);
        if members.len() > 1 && cv.independent.iter().any(|ok| !ok) {
            let mean = members.iter().map(|&m| values[m]).sum::<Complex64>() / members.len() as f64;
            let mean = if real_input && mean.im.abs() <= radius {
                Complex64::new(mean.re, 0.0)
            } else {
                mean
            };
            for &m in &members {
                values[m] = mean;
            }
            cv = cluster_vectors(a, &values, &members, anorm, tol);
        }
        for (k, &m) in members.iter().enumerate() {
            vectors[m] = cv.vectors[k].clone();
            independent[m] = cv.independent[k];
        }
    }
    if real_input {
        for i in 0..n {
            if values[i].im < 0.0 {
                let mate = (0..n).find(|&j| values[j] == values[i].conj() && values[j].im > 0.0);
                if let Some(j) = mate {
                    let rank_i = (0..i).filter(|&k| values[k] == values[i]).count();
                    let js: Vec<usize> = (0..n).filter(|&k| values[k] == values[j]).collect();
                    let j = js.get(rank_i).copied().unwrap_or(j);
                    vectors[i] = vectors[j].iter().map(|z| z.conj()).collect();
                    independent[i] = independent[j];
                }
            } else if values[i].im == 0.0 {
                for z in vectors[i].iter_mut() {
                    z.im = 0.0;
                }
            }
        }
    }
    let mut report = Vec::with_capacity(n);
    for i in 0..n {
        normalize(&mut vectors[i]);
        fix_phase(&mut vectors[i]);
        report.push(PairReport {
            residual: residual(a, values[i], &vectors[i]),
            iterations: iterations[i],
            independent: independent[i],
        });
    }
    // mean replacement can reorder ties; keep the documented order
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| values[x].re.total_cmp(&values[y].re).then(values[x].im.total_cmp(&values[y].im)));
    SpectrumResult {
        eigenvalues: order.iter().map(|&i| values[i]).collect(),
        eigenvectors: order.iter().map(|&i| vectors[i].clone()).collect(),
        report: order.iter().map(|&i| report[i]).collect(),
    }
}
