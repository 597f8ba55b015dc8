//! Sturm-bisection eigenvalues against an independent dense oracle.

mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use resonance_core::eigensolve::{solve_lowest, GridPolicy};
use resonance_core::potential::{PotentialFamily, PotentialModel};

#[test]
fn oracle_agrees_with_charpoly_on_tiny_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 2..=8 {
        for _ in 0..4 {
            let t = random_tridiagonal(&mut rng, n);
            let dense = jacobi_eigenvalues(dense_of(&t));
            let roots = charpoly_eigenvalues(&t);
            assert_eq!(roots.len(), n, "char poly missed a root at n = {n}");
            for (a, b) in dense.iter().zip(&roots) {
                assert!((a - b).abs() < 1e-8, "jacobi {a} vs charpoly {b}");
            }
        }
    }
}

#[test]
fn sturm_count_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let t = random_tridiagonal(&mut rng, 40);
    let dense = jacobi_eigenvalues(dense_of(&t));
    for _ in 0..100 {
        let lam = {
            use rand::Rng;
            rng.gen_range(-9.0..9.0)
        };
        let expect = dense.iter().filter(|&&w| w < lam).count();
        assert_eq!(t.sturm_count(lam), expect, "lambda = {lam}");
    }
}

#[test]
fn bisection_eigenvalues_match_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for trial in 0..50 {
        let n = 3 + (trial * 7) % 58;
        let t = random_tridiagonal(&mut rng, n);
        let dense = jacobi_eigenvalues(dense_of(&t));
        let ours = t.lowest_eigenvalues(n).unwrap();
        for (a, b) in ours.iter().zip(&dense) {
            assert!(
                (a - b).abs() <= 1e-10,
                "trial {trial} n {n}: {a} vs {b}"
            );
        }
    }
}

#[test]
fn eigenvalues_strictly_increasing() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let t = random_tridiagonal(&mut rng, 60);
    let w = t.lowest_eigenvalues(60).unwrap();
    for pair in w.windows(2) {
        assert!(pair[1] > pair[0]);
    }
}

#[test]
fn discretization_error_is_second_order() {
    // V = 0 on (-1, 1): lambda_k exact is (k pi / 2)^2; the error ratio
    // between the n and 2n+1 grids sits near 4
    let m = PotentialModel::new(PotentialFamily::InfiniteWellZero, 2.0).unwrap();
    let pol = GridPolicy::default();
    let exact = |k: usize| {
        let x = (k + 1) as f64 * std::f64::consts::PI / 2.0;
        x * x
    };
    for k in 0..3 {
        let n = 400;
        let t1 =
            resonance_core::eigensolve::build_operator(&m, (-1.0, 1.0), 1.0, n, &pol).unwrap();
        let t2 = resonance_core::eigensolve::build_operator(&m, (-1.0, 1.0), 1.0, 2 * n + 1, &pol)
            .unwrap();
        let e1 = exact(k) - t1.eigenvalues_range(k, k).unwrap()[0];
        let e2 = exact(k) - t2.eigenvalues_range(k, k).unwrap()[0];
        let ratio = e1 / e2;
        assert!(
            (3.6..=4.4).contains(&ratio),
            "k = {k}: error ratio {ratio}"
        );
    }
}

#[test]
fn domain_monotonicity_across_widths() {
    // Dirichlet domain inclusion: widening the box lowers every level
    let m = canonical_model();
    let pol = GridPolicy::default();
    let hbar = 0.1;
    let mut prev: Option<Vec<f64>> = None;
    for i in 0..6 {
        let ell = 6.0 + 0.8 * i as f64;
        let w = solve_lowest(&m, (-ell, ell), hbar, 8, &pol).unwrap();
        if let Some(p) = prev {
            for (a, b) in p.iter().zip(&w) {
                assert!(b < a, "level rose when the box widened");
            }
        }
        prev = Some(w);
    }
}

#[test]
fn near_degenerate_pair_has_orthogonal_vectors() {
    // single central barrier in a box: the two lowest states split only
    // through tunneling and inverse iteration must keep them orthogonal
    let m = PotentialModel::new(
        PotentialFamily::TwoGaussianBarriers {
            b_minus: 1.0,
            b_plus: 0.0,
            p_minus: 0.0,
            p_plus: 1.0,
            w_minus: 1.0,
            w_plus: 1.0,
        },
        2.0,
    )
    .unwrap();
    let pol = GridPolicy::default();
    let t = resonance_core::eigensolve::build_operator(&m, (-6.0, 6.0), 0.5, 2000, &pol).unwrap();
    let w = t.lowest_eigenvalues(2).unwrap();
    let split = w[1] - w[0];
    assert!(split > 1e-8, "pair not resolvable: split = {split}");
    let u1 = resonance_core::eigensolve::eigenvector(&t, w[0], &pol).unwrap();
    let u2 = resonance_core::eigensolve::eigenvector(&t, w[1], &pol).unwrap();
    let l2: f64 = u1.vector.iter().map(|v| v * v).sum::<f64>().sqrt();
    let m2: f64 = u2.vector.iter().map(|v| v * v).sum::<f64>().sqrt();
    let dot: f64 = u1
        .vector
        .iter()
        .zip(&u2.vector)
        .map(|(a, b)| a * b)
        .sum::<f64>()
        / (l2 * m2);
    assert!(dot.abs() <= 1e-8, "overlap {dot}");
    assert_eq!(u1.sign_changes(), 0);
    assert_eq!(u2.sign_changes(), 1);
}

#[test]
fn boundary_derivative_matches_spline_oracle() {
    // cubic fit through the first four points, evaluated at the wall
    let m = canonical_model();
    let pol = GridPolicy::default();
    let (om_m, om_p) = CANONICAL_OMEGA;
    let t = resonance_core::eigensolve::build_operator(&m, (om_m, om_p), 0.1, 3000, &pol).unwrap();
    let lam = t.lowest_eigenvalues(1).unwrap()[0];
    let pair = resonance_core::eigensolve::eigenvector(&t, lam, &pol).unwrap();
    let h = t.h;
    // natural cubic through (0, 0), (h, u1), (2h, u2), (3h, u3):
    // derivative at 0 of the Lagrange interpolant
    let u = &pair.vector;
    let spline = |u1: f64, u2: f64, u3: f64| {
        (3.0 * u1 - 1.5 * u2 + u3 / 3.0) / h
    };
    let left = resonance_core::eigensolve::boundary_derivative(
        &pair,
        &t,
        resonance_core::Side::Left,
    );
    let right = resonance_core::eigensolve::boundary_derivative(
        &pair,
        &t,
        resonance_core::Side::Right,
    );
    let n = u.len();
    let oracle_left = spline(u[0], u[1], u[2]).abs();
    let oracle_right = spline(u[n - 1], u[n - 2], u[n - 3]).abs();
    assert!(
        (left - oracle_left).abs() <= 1e-4 * oracle_left,
        "left {left} vs {oracle_left}"
    );
    assert!(
        (right - oracle_right).abs() <= 1e-4 * oracle_right,
        "right {right} vs {oracle_right}"
    );
}
