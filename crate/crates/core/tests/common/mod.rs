#![allow(dead_code)]

use num_complex::Complex64;
use quatspec::{MatrixC, MatrixH, MatrixR, Operator, OperatorKind, Quaternion, VectorH};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn quat(rng: &mut ChaCha8Rng) -> Quaternion {
    Quaternion::new(
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
    )
}

pub fn unit_quat(rng: &mut ChaCha8Rng) -> Quaternion {
    loop {
        let q = quat(rng);
        if q.norm() > 0.1 {
            return q.scale(1.0 / q.norm());
        }
    }
}

pub fn int_quat(rng: &mut ChaCha8Rng) -> Quaternion {
    Quaternion::new(
        rng.gen_range(-5..=5) as f64,
        rng.gen_range(-5..=5) as f64,
        rng.gen_range(-5..=5) as f64,
        rng.gen_range(-5..=5) as f64,
    )
}

pub fn matrix_h(rng: &mut ChaCha8Rng, n: usize) -> MatrixH {
    MatrixH::from_fn(n, |_, _| quat(rng))
}

pub fn matrix_c(rng: &mut ChaCha8Rng, n: usize) -> MatrixC {
    MatrixC::new(matrix_h(rng, n), matrix_h(rng, n)).unwrap()
}

pub fn matrix_r(rng: &mut ChaCha8Rng, n: usize) -> MatrixR {
    MatrixR::new([matrix_h(rng, n), matrix_h(rng, n), matrix_h(rng, n), matrix_h(rng, n)]).unwrap()
}

pub fn operator(rng: &mut ChaCha8Rng, kind: OperatorKind, n: usize) -> Operator {
    match kind {
        OperatorKind::H => Operator::H(matrix_h(rng, n)),
        OperatorKind::C => Operator::C(matrix_c(rng, n)),
        OperatorKind::R => Operator::R(matrix_r(rng, n)),
    }
}

pub fn vector(rng: &mut ChaCha8Rng, n: usize) -> VectorH {
    VectorH::new((0..n).map(|_| quat(rng)).collect()).unwrap()
}

pub const KINDS: [OperatorKind; 3] = [OperatorKind::H, OperatorKind::C, OperatorKind::R];

/// Largest distance in a greedy one-to-one matching of two multisets.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .fold((usize::MAX, f64::INFINITY), |acc, t| if t.1 < acc.1 { t } else { acc });
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

/// Quaternion product written out component by component.
pub fn hamilton(a: Quaternion, b: Quaternion) -> Quaternion {
    Quaternion::new(
        a.q0 * b.q0 - a.q1 * b.q1 - a.q2 * b.q2 - a.q3 * b.q3,
        a.q0 * b.q1 + a.q1 * b.q0 + a.q2 * b.q3 - a.q3 * b.q2,
        a.q0 * b.q2 - a.q1 * b.q3 + a.q2 * b.q0 + a.q3 * b.q1,
        a.q0 * b.q3 + a.q1 * b.q2 - a.q2 * b.q1 + a.q3 * b.q0,
    )
}

pub fn op_distance(a: &Operator, b: &Operator) -> f64 {
    let diff = a.add(&b.scale(-1.0)).unwrap();
    diff.norm()
}
