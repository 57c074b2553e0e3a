//! Quaternion scalars `q0 + i q1 + j q2 + k q3` over `f64`.
//!
//! Besides Hamilton arithmetic this module provides the two scalar tools the
//! rest of the crate leans on: the symplectic split `q = z1 + j z2` into a pair
//! of complex numbers, and unitary rephasing `ū q u = z` that moves a
//! quaternion onto its complex representative with non-negative imaginary
//! part.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type ComplexScalar = Complex64;

#[derive(Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    /// Basis units `h_mu = (1, i, j, k)`.
    pub const UNITS: [Quaternion; 4] = [Self::ONE, Self::I, Self::J, Self::K];

    #[inline]
    pub const fn new(q0: f64, q1: f64, q2: f64, q3: f64) -> Self {
        Self { q0, q1, q2, q3 }
    }

    #[inline]
    pub const fn real(r: f64) -> Self {
        Self::new(r, 0.0, 0.0, 0.0)
    }

    /// Embeds `re + i im` with vanishing `j` and `k` parts.
    #[inline]
    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z.re, z.im, 0.0, 0.0)
    }

    #[inline]
    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    #[inline]
    pub fn to_array(self) -> [f64; 4] {
        [self.q0, self.q1, self.q2, self.q3]
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.q0, -self.q1, -self.q2, -self.q3)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.q0 * self.q0 + self.q1 * self.q1 + self.q2 * self.q2 + self.q3 * self.q3
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Length of the imaginary part `|(q1, q2, q3)|`.
    #[inline]
    pub fn imag_norm(self) -> f64 {
        (self.q1 * self.q1 + self.q2 * self.q2 + self.q3 * self.q3).sqrt()
    }

    #[inline]
    pub fn imag(self) -> Self {
        Self::new(0.0, self.q1, self.q2, self.q3)
    }

    #[inline]
    pub fn scale(self, r: f64) -> Self {
        Self::new(self.q0 * r, self.q1 * r, self.q2 * r, self.q3 * r)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inverse(self) -> Option<Self> {
        let n = self.norm_sqr();
        if n == 0.0 {
            None
        } else {
            Some(self.conj().scale(1.0 / n))
        }
    }

    pub fn is_finite(self) -> bool {
        self.q0.is_finite() && self.q1.is_finite() && self.q2.is_finite() && self.q3.is_finite()
    }

    /// `exp(q) = e^{q0} (cos|v| + v/|v| sin|v|)`.
    pub fn exp(self) -> Self {
        let r = self.q0.exp();
        let t = self.imag_norm();
        if t == 0.0 {
            return Self::real(r);
        }
        let s = r * t.sin() / t;
        Self::new(r * t.cos(), self.q1 * s, self.q2 * s, self.q3 * s)
    }

    /// Complex part `q0 + i q1` (the `z1` of the symplectic split).
    #[inline]
    pub fn complex_part(self) -> Complex64 {
        Complex64::new(self.q0, self.q1)
    }
}

impl fmt::Debug for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {:+}i {:+}j {:+}k)", self.q0, self.q1, self.q2, self.q3)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.q0 + o.q0, self.q1 + o.q1, self.q2 + o.q2, self.q3 + o.q3)
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.q0 - o.q0, self.q1 - o.q1, self.q2 - o.q2, self.q3 - o.q3)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.q0, -self.q1, -self.q2, -self.q3)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        let (a0, a1, a2, a3) = (self.q0, self.q1, self.q2, self.q3);
        let (b0, b1, b2, b3) = (o.q0, o.q1, o.q2, o.q3);
        Self::new(
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, r: f64) -> Self {
        self.scale(r)
    }
}

impl Mul<Quaternion> for f64 {
    type Output = Quaternion;
    #[inline]
    fn mul(self, q: Quaternion) -> Quaternion {
        q.scale(self)
    }
}

impl Mul<Complex64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, z: Complex64) -> Self {
        self * Quaternion::from_complex(z)
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn div(self, r: f64) -> Self {
        self.scale(1.0 / r)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl SubAssign for Quaternion {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl MulAssign for Quaternion {
    #[inline]
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl From<Complex64> for Quaternion {
    fn from(z: Complex64) -> Self {
        Self::from_complex(z)
    }
}

impl From<f64> for Quaternion {
    fn from(r: f64) -> Self {
        Self::real(r)
    }
}

impl Serialize for Quaternion {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Quaternion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        <[f64; 4]>::deserialize(d).map(Self::from_array)
    }
}

/// The pair `(z1, z2)` with `q = z1 + j z2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticPair {
    pub z1: Complex64,
    pub z2: Complex64,
}

impl SymplecticPair {
    /// `z1 + j z2`. Since `j i = -k`, `j (a + i b) = a j - b k`.
    #[inline]
    pub fn reconstruct(self) -> Quaternion {
        Quaternion::new(self.z1.re, self.z1.im, self.z2.re, -self.z2.im)
    }
}

/// Splits `q` as `z1 + j z2` with `z1 = q0 + i q1` and `z2 = q2 - i q3`.
#[inline]
pub fn symplectic_decompose(q: Quaternion) -> SymplecticPair {
    SymplecticPair {
        z1: Complex64::new(q.q0, q.q1),
        z2: Complex64::new(q.q2, -q.q3),
    }
}

/// Finds a unit `u` with `ū q u = z`, `z = q0 + i |Im q|`.
///
/// `u` rotates `i` onto the unit imaginary direction of `q` under
/// `v -> u v ū`. Real `q` gives `u = 1`; the antipodal direction `-i` gives
/// `u = j`.
pub fn rephase_to_complex(q: Quaternion) -> (Complex64, Quaternion) {
    let t = q.imag_norm();
    let z = Complex64::new(q.q0, t);
    if t == 0.0 {
        return (z, Quaternion::ONE);
    }
    let (n1, n2, n3) = (q.q1 / t, q.q2 / t, q.q3 / t);
    // u ∝ (1 + n1) - n3 j + n2 k; 1 + n1 is rewritten near n1 = -1 to avoid cancellation.
    let perp = n2 * n2 + n3 * n3;
    let w = if n1 >= 0.0 { 1.0 + n1 } else { perp / (1.0 - n1) };
    let norm = (w * w + perp).sqrt();
    if norm == 0.0 {
        return (z, Quaternion::J);
    }
    (z, Quaternion::new(w / norm, 0.0, -n3 / norm, n2 / norm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn defining_relations() {
        use Quaternion as Q;
        assert_eq!(Q::I * Q::J, Q::K);
        assert_eq!(Q::J * Q::K, Q::I);
        assert_eq!(Q::K * Q::I, Q::J);
        assert_eq!(Q::J * Q::I, -Q::K);
        assert_eq!(Q::I * Q::I, -Q::ONE);
        assert_eq!(Q::I * Q::J * Q::K, -Q::ONE);
    }

    #[test]
    fn product_by_distributivity() {
        // (1+i)(1+j) = 1 + j + i + ij = 1 + i + j + k
        let a = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let b = Quaternion::new(1.0, 0.0, 1.0, 0.0);
        let mut expanded = Quaternion::ZERO;
        for (ca, ua) in [(1.0, Quaternion::ONE), (1.0, Quaternion::I)] {
            for (cb, ub) in [(1.0, Quaternion::ONE), (1.0, Quaternion::J)] {
                expanded += (ua * ub) * (ca * cb);
            }
        }
        assert_eq!(a * b, Quaternion::new(1.0, 1.0, 1.0, 1.0));
        assert_eq!(a * b, expanded);
    }

    #[test]
    fn symplectic_examples() {
        let p = symplectic_decompose(Quaternion::new(1.0, 2.0, 3.0, 4.0));
        assert_eq!(p.z1, Complex64::new(1.0, 2.0));
        assert_eq!(p.z2, Complex64::new(3.0, -4.0));
        let z = symplectic_decompose(Quaternion::ZERO);
        assert_eq!(z.z1, Complex64::new(0.0, 0.0));
        assert_eq!(z.z2, Complex64::new(0.0, 0.0));
        let j = symplectic_decompose(Quaternion::J);
        assert_eq!(j.z1, Complex64::new(0.0, 0.0));
        assert_eq!(j.z2, Complex64::new(1.0, 0.0));
        // j (3 - 4i) computed with the Hamilton product
        let jz2 = Quaternion::J * Quaternion::new(3.0, -4.0, 0.0, 0.0);
        assert_eq!(jz2, Quaternion::new(0.0, 0.0, 3.0, 4.0));
    }

    #[test]
    fn rephase_examples() {
        let (z, u) = rephase_to_complex(Quaternion::J);
        assert_eq!(z, Complex64::new(0.0, 1.0));
        assert!((u.norm() - 1.0).abs() < 1e-15);
        assert!(close(u.conj() * Quaternion::J * u, Quaternion::I, 1e-15));
        // the alternative (i + j)/sqrt2 also rotates j onto i; both differ by a right factor commuting with i
        let alt = Quaternion::new(0.0, 1.0, 1.0, 0.0) / 2f64.sqrt();
        assert!(close(alt.conj() * Quaternion::J * alt, Quaternion::I, 1e-15));

        let (z, u) = rephase_to_complex(Quaternion::real(3.0));
        assert_eq!(z, Complex64::new(3.0, 0.0));
        assert_eq!(u, Quaternion::ONE);

        let (z, u) = rephase_to_complex(Quaternion::new(1.0, 1.0, 0.0, 0.0));
        assert_eq!(z, Complex64::new(1.0, 1.0));
        assert_eq!(u, Quaternion::ONE);
    }

    #[test]
    fn rephase_antipodal() {
        let q = Quaternion::new(2.0, -5.0, 0.0, 0.0);
        let (z, u) = rephase_to_complex(q);
        assert_eq!(u, Quaternion::J);
        assert_eq!(z, Complex64::new(2.0, 5.0));
        assert!(close(u.conj() * q * u, Quaternion::new(2.0, 5.0, 0.0, 0.0), 0.0));
        // nearly antipodal stays accurate
        let q = Quaternion::new(0.5, -1.0, 1e-12, -3e-13);
        let (z, u) = rephase_to_complex(q);
        assert!(close(u.conj() * q * u, Quaternion::from_complex(z), 1e-15));
    }

    #[test]
    fn exp_matches_series() {
        let q = Quaternion::new(0.3, -0.7, 0.2, 0.5);
        let mut term = Quaternion::ONE;
        let mut sum = Quaternion::ONE;
        for k in 1..40 {
            term = term * q / k as f64;
            sum += term;
        }
        assert!(close(q.exp(), sum, 1e-14));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn quat() -> impl Strategy<Value = Quaternion> {
            prop::array::uniform4(-10.0f64..10.0).prop_map(Quaternion::from_array)
        }

        proptest! {
            #[test]
            fn symplectic_round_trip_is_exact(q in quat()) {
                prop_assert_eq!(symplectic_decompose(q).reconstruct(), q);
            }

            #[test]
            fn conj_is_involution(q in quat()) {
                prop_assert_eq!(q.conj().conj(), q);
                let n = q * q.conj();
                prop_assert!((n.q0 - q.norm_sqr()).abs() <= 1e-12 * (1.0 + q.norm_sqr()));
                prop_assert!(n.imag_norm() <= 1e-12 * (1.0 + q.norm_sqr()));
            }

            #[test]
            fn norm_is_multiplicative(a in quat(), b in quat()) {
                let lhs = (a * b).norm();
                let rhs = a.norm() * b.norm();
                prop_assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * rhs.max(1e-300) * 4.0);
            }

            #[test]
            fn associativity(a in quat(), b in quat(), c in quat()) {
                let lhs = (a * b) * c;
                let rhs = a * (b * c);
                let scale = a.norm() * b.norm() * c.norm();
                prop_assert!((lhs - rhs).norm() <= 1e-13 * scale.max(1e-300));
            }

            #[test]
            fn unitary_conjugation_preserves_norm_and_real_part(q in quat(), u in quat()) {
                prop_assume!(u.norm() > 1e-3);
                let u = u / u.norm();
                let r = u.conj() * q * u;
                prop_assert!((r.norm() - q.norm()).abs() <= 1e-14 * q.norm().max(1.0));
                prop_assert!((r.q0 - q.q0).abs() <= 1e-14 * q.norm().max(1.0));
            }

            #[test]
            fn rephase_lands_on_upper_half_plane(q in quat()) {
                let (z, u) = rephase_to_complex(q);
                prop_assert!(z.im >= 0.0);
                prop_assert!((u.norm() - 1.0).abs() <= 1e-15);
                prop_assert!((z.im - q.imag_norm()).abs() <= 1e-14 * q.imag_norm());
                let r = u.conj() * q * u;
                prop_assert!((r - Quaternion::from_complex(z)).norm() <= 1e-14 * q.norm().max(1.0));
            }
        }
    }
}
