mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use quatspec::dense::RealMatrix;
use quatspec::odes::{general_solution, quadratic_residual, quadratic_roots, solve_ivp, Exponent, OdeProblem};
use quatspec::{MatrixC, MatrixH, Operator, Quaternion, VectorH};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn scalar_vec(q: Quaternion) -> VectorH {
    VectorH::new(vec![q]).unwrap()
}

/// Damped Newton on the four real equations `q^2 - alpha q - beta = 0`.
fn newton_roots(alpha: Quaternion, beta: Quaternion, rng: &mut ChaCha8Rng) -> Vec<Quaternion> {
    let mut found: Vec<Quaternion> = Vec::new();
    for _ in 0..200 {
        let mut q = quat(rng).scale(3.0);
        for _ in 0..100 {
            let f = q * q - alpha * q - beta;
            if f.norm() < 1e-14 {
                break;
            }
            let jac = RealMatrix::from_fn(4, |r, c| {
                let d = Quaternion::UNITS[c];
                (q * d + d * q - alpha * d).to_array()[r]
            });
            let step = jac.lu().solve(&f.to_array());
            let mut t = 1.0;
            loop {
                let cand = q - Quaternion::new(step[0], step[1], step[2], step[3]).scale(t);
                if quadratic_residual(alpha, beta, cand) < f.norm() || t < 1e-4 {
                    q = cand;
                    break;
                }
                t *= 0.5;
            }
        }
        if quadratic_residual(alpha, beta, q) < 1e-12 && !found.iter().any(|r| (*r - q).norm() < 1e-6) {
            found.push(q);
        }
    }
    found
}

#[test]
fn noncommuting_roots_match_newton() {
    let (alpha, beta) = (Quaternion::new(0.0, 1.0, 1.0, 0.0), Quaternion::ONE);
    let r = quadratic_roots(alpha, beta).unwrap();
    assert!(!r.spherical);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let newton = newton_roots(alpha, beta, &mut rng);
    assert_eq!(newton.len(), r.roots.len());
    for q in &r.roots {
        assert!(quadratic_residual(alpha, beta, *q) < 1e-10);
        assert!(newton.iter().any(|p| (*p - *q).norm() < 1e-8));
    }
}

#[test]
fn quaternion_valued_oscillator() {
    // psi(0) = j, psi'(0) = k gives psi = j cos x + k sin x
    let p = OdeProblem::second_order_h(Quaternion::ZERO, Quaternion::real(-1.0))
        .with_initial(vec![scalar_vec(Quaternion::J), scalar_vec(Quaternion::K)])
        .unwrap();
    let xs: Vec<f64> = (0..50).map(|k| 0.1 * k as f64).collect();
    let traj = solve_ivp(&p, &xs).unwrap();
    for w in traj.windows(3) {
        let second = (w[2].psi[0] - w[1].psi[0].scale(2.0) + w[0].psi[0]).scale(1.0 / 0.01);
        assert!((second + w[1].psi[0]).norm() < 1e-3);
    }
    for pt in &traj {
        let expected = Quaternion::J.scale(pt.x.cos()) + Quaternion::K.scale(pt.x.sin());
        assert!((pt.psi[0] - expected).norm() < 1e-12);
    }
}

#[test]
fn first_order_matches_scalar_exponential() {
    let q = Quaternion::new(0.2, -0.7, 0.4, 1.1);
    let p = OdeProblem::new(vec![Operator::H(MatrixH::scalar(1, q))], Some(vec![scalar_vec(Quaternion::ONE)])).unwrap();
    for pt in solve_ivp(&p, &[-1.0, 0.0, 0.5, 2.0]).unwrap() {
        assert!((pt.psi[0] - q.scale(pt.x).exp()).norm() < 1e-12);
    }
}

#[test]
fn schrodinger_companion_has_four_exponents() {
    let a0 = MatrixC::new(MatrixH::zeros(1), MatrixH::scalar(1, Quaternion::I)).unwrap();
    let p = OdeProblem::new(vec![Operator::C(MatrixC::zeros(1)), Operator::C(a0)], None).unwrap();
    let sols = general_solution(&p).unwrap();
    let zs: Vec<Complex64> = sols
        .iter()
        .map(|s| match s.exponent {
            Exponent::Complex { z } => z,
            _ => unreachable!(),
        })
        .collect();
    let expected = [Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
    assert!(multiset_distance(&zs, &expected) < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn roots_substitute(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (alpha, beta) = (quat(&mut rng).scale(3.0), quat(&mut rng).scale(3.0));
        let scale = (1.0 + alpha.norm() + beta.norm()).powi(2);
        let r = quadratic_roots(alpha, beta).unwrap();
        prop_assert!(!r.roots.is_empty() && r.roots.len() <= 2);
        for q in &r.roots {
            prop_assert!(quadratic_residual(alpha, beta, *q) < 1e-9 * scale);
        }
    }

    #[test]
    fn roots_follow_rephasing(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (alpha, beta, u) = (quat(&mut rng), quat(&mut rng), unit_quat(&mut rng));
        let a = quadratic_roots(alpha, beta).unwrap();
        let b = quadratic_roots(u.conj() * alpha * u, u.conj() * beta * u).unwrap();
        prop_assert_eq!(a.roots.len(), b.roots.len());
        for q in &a.roots {
            let moved = u.conj() * *q * u;
            prop_assert!(b.roots.iter().any(|r| (*r - moved).norm() < 1e-9));
        }
    }

    #[test]
    fn left_exponents_solve_the_quadratic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (alpha, beta) = (quat(&mut rng), quat(&mut rng));
        let scale = (1.0 + alpha.norm() + beta.norm()).powi(2);
        for s in general_solution(&OdeProblem::second_order_h(alpha, beta)).unwrap() {
            let q = s.left_exponents.unwrap()[0];
            prop_assert!(quadratic_residual(alpha, beta, q) < 1e-9 * scale);
        }
    }

    #[test]
    fn ivp_superposition(seed in any::<u64>(), n in 1usize..=2, re in -1.0..1.0f64, im in -1.0..1.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let xs = [0.3, 1.1];
        let ic = |rng: &mut ChaCha8Rng| vec![vector(rng, n), vector(rng, n)];
        let (u, v) = (ic(&mut rng), ic(&mut rng));

        let r_coeffs = vec![Operator::R(matrix_r(&mut rng, n).scale(0.3)), Operator::R(matrix_r(&mut rng, n).scale(0.3))];
        let c_coeffs = vec![Operator::C(matrix_c(&mut rng, n).scale(0.3)), Operator::C(matrix_c(&mut rng, n).scale(0.3))];
        let r: f64 = rng.gen_range(-2.0..2.0);
        let c = Quaternion::from_complex(Complex64::new(re, im));
        for (coeffs, scalar) in [(r_coeffs, Quaternion::real(r)), (c_coeffs, c)] {
            let combined: Vec<VectorH> = u.iter().zip(&v).map(|(a, b)| a.add(&b.mul_right(scalar))).collect();
            let run = |init: Vec<VectorH>| solve_ivp(&OdeProblem::new(coeffs.clone(), Some(init)).unwrap(), &xs).unwrap();
            let (tu, tv, tc) = (run(u.clone()), run(v.clone()), run(combined));
            for k in 0..xs.len() {
                let expected = tu[k].psi.add(&tv[k].psi.mul_right(scalar));
                prop_assert!(tc[k].psi.sub(&expected).norm() < 1e-10 * expected.norm().max(1.0));
            }
        }
    }

    #[test]
    fn coupled_solutions_solve_first_order_r(seed in any::<u64>(), n in 1usize..=2) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = matrix_r(&mut rng, n);
        let op = Operator::R(m.clone());
        let sols = general_solution(&OdeProblem::new(vec![op.clone()], None).unwrap()).unwrap();
        let h = 1e-5;
        for s in &sols {
            for second in [false, true] {
                let x = 0.4;
                let d = s.evaluate(x + h, second).sub(&s.evaluate(x - h, second)).scale(0.5 / h);
                let rhs = op.apply(&s.evaluate(x, second)).unwrap();
                prop_assert!(d.sub(&rhs).norm() <= 1e-7 * rhs.norm().max(1.0));
            }
        }
    }
}
