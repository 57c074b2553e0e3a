use num_complex::Complex64;
use proptest::prelude::*;
use quatspec::dense::{ComplexMatrix, RealMatrix};
use quatspec::eigen::{eig_complex, eig_real, eigenvalues_complex, eigenvalues_real, real_schur};
use quatspec::embed::right_unit_matrices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_real(rng: &mut ChaCha8Rng, n: usize) -> RealMatrix {
    RealMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Greedy matching distance between two multisets of complex numbers.
fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
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

#[test]
fn right_unit_matrix_spectrum() {
    let [i, _, _] = right_unit_matrices(1);
    let r = eig_real(&i, 1e-8).unwrap();
    let expected = [
        Complex64::new(0.0, -1.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(0.0, 1.0),
    ];
    for (z, e) in r.eigenvalues.iter().zip(expected) {
        assert!((z - e).norm() < 1e-14);
    }
    // (x^2 + 1)^2 has no linear term: eigenvalue sum vanishes, product is 1
    let prod: Complex64 = r.eigenvalues.iter().product();
    assert!((prod - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    assert_eq!(r.independent_count(), 4);
    assert!(r.max_residual() < 1e-14);
}

#[test]
fn residuals_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 1..=24 {
        let a = random_complex(&mut rng, n);
        let r = eig_complex(&a, 1e-8).unwrap();
        assert_eq!(r.len(), n);
        assert!(r.max_residual() <= 1e-8 * a.fro_norm(), "complex n={n}: {}", r.max_residual());
        let b = random_real(&mut rng, n);
        let r = eig_real(&b, 1e-8).unwrap();
        assert!(r.max_residual() <= 1e-8 * b.fro_norm(), "real n={n}: {}", r.max_residual());
        for w in r.eigenvalues.windows(2) {
            assert!((w[0].re, w[0].im) <= (w[1].re, w[1].im));
        }
    }
}

#[test]
fn real_and_complex_paths_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [3, 8, 16] {
        let a = random_real(&mut rng, n);
        let r = eigenvalues_real(&a).unwrap();
        let c = eigenvalues_complex(&a.to_complex()).unwrap();
        assert!(multiset_distance(&r, &c) < 1e-10);
        let conj: Vec<_> = r.iter().map(|z| z.conj()).collect();
        assert!(multiset_distance(&r, &conj) == 0.0);
    }
}

#[test]
fn graded_matrix_benefits_from_balancing() {
    let a = RealMatrix::from_rows(&[
        vec![1.0, 1e6, 0.0],
        vec![1e-6, 2.0, 1e6],
        vec![0.0, 1e-6, 3.0],
    ])
    .unwrap();
    let r = eig_real(&a, 1e-8).unwrap();
    let trace: f64 = r.eigenvalues.iter().map(|z| z.re).sum();
    assert!((trace - 6.0).abs() < 1e-10);
    assert!(r.max_residual() <= 1e-8 * a.fro_norm());
}

#[test]
fn schur_blocks_are_standardized() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = random_real(&mut rng, 9);
    let (z, t) = real_schur(&a).unwrap();
    let back = z.matmul(&t).matmul(&z.transpose());
    assert!((&back - &a).max_abs() < 1e-12);
    let mut i = 0;
    while i < 9 {
        if i + 1 < 9 && t[(i + 1, i)] != 0.0 {
            assert_eq!(t[(i, i)], t[(i + 1, i + 1)]);
            assert!(t[(i, i + 1)] * t[(i + 1, i)] < 0.0);
            i += 2;
        } else {
            i += 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn similarity_invariance(seed in any::<u64>(), n in 1usize..=24) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_complex(&mut rng, n);
        // well-conditioned S: identity plus a small perturbation
        let s = &ComplexMatrix::identity(n) + &random_complex(&mut rng, n).scale(Complex64::new(0.3 / (n as f64).sqrt(), 0.0));
        let sinv = s.inverse().unwrap();
        let b = s.matmul(&a).matmul(&sinv);
        let ea = eigenvalues_complex(&a).unwrap();
        let eb = eigenvalues_complex(&b).unwrap();
        prop_assert!(multiset_distance(&ea, &eb) < 1e-7);
    }

    #[test]
    fn trace_and_determinant(seed in any::<u64>(), n in 1usize..=16) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_real(&mut rng, n);
        let ev = eigenvalues_real(&a).unwrap();
        let sum: Complex64 = ev.iter().sum();
        let prod: Complex64 = ev.iter().product();
        let scale = a.fro_norm().max(1.0);
        prop_assert!((sum - Complex64::new(a.trace(), 0.0)).norm() <= 1e-8 * scale * n as f64);
        let det = a.det();
        prop_assert!((prod - Complex64::new(det, 0.0)).norm() <= 1e-8 * scale.powi(n as i32));
    }
}
