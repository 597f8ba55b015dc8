//! Shared test oracles: a dense Jacobi eigensolver (validated against
//! characteristic-polynomial bisection for tiny matrices), a brute-force
//! trapezoid quadrature, and the canonical double-barrier model.

// each integration-test target compiles this module separately and uses a
// different subset of it
#![allow(dead_code)]

use rand::Rng;
use resonance_core::potential::{PotentialFamily, PotentialModel};
use resonance_core::TridiagonalOperator;

/// All eigenvalues of a dense symmetric matrix by cyclic Jacobi sweeps.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let norm: f64 = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
        .max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += a[p][q] * a[p][q];
                }
            }
        }
        if off.sqrt() <= 1e-15 * norm {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for i in 0..n {
                    let api = a[p][i];
                    let aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
            }
        }
    }
    let mut w: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    w.sort_by(|x, y| x.partial_cmp(y).unwrap());
    w
}

/// Dense matrix view of a tridiagonal operator.
pub fn dense_of(t: &TridiagonalOperator) -> Vec<Vec<f64>> {
    let n = t.n;
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = t.diag[i];
        if i + 1 < n {
            a[i][i + 1] = t.offdiag[i];
            a[i + 1][i] = t.offdiag[i];
        }
    }
    a
}

/// Characteristic polynomial `det(T - lambda)` by the three-term recurrence.
pub fn char_poly(t: &TridiagonalOperator, lambda: f64) -> f64 {
    let mut p_prev = 1.0;
    let mut p = t.diag[0] - lambda;
    for i in 1..t.n {
        let e = t.offdiag[i - 1];
        let next = (t.diag[i] - lambda) * p - e * e * p_prev;
        p_prev = p;
        p = next;
    }
    p
}

/// All roots of the characteristic polynomial for tiny `n`, located by a
/// dense scan plus bisection.
pub fn charpoly_eigenvalues(t: &TridiagonalOperator) -> Vec<f64> {
    let (lo, hi) = t.spectral_bounds();
    let span = (hi - lo).max(1e-6);
    let m = 200_000usize;
    let mut roots = Vec::new();
    let mut prev_x = lo - 1e-9 * span;
    let mut prev_f = char_poly(t, prev_x);
    for i in 1..=m {
        let x = lo - 1e-9 * span + (span * (1.0 + 2e-9)) * i as f64 / m as f64;
        let f = char_poly(t, x);
        if prev_f == 0.0 {
            roots.push(prev_x);
        } else if prev_f * f < 0.0 {
            let (mut a, mut b, mut fa) = (prev_x, x, prev_f);
            for _ in 0..200 {
                let c = 0.5 * (a + b);
                if c <= a || c >= b {
                    break;
                }
                let fc = char_poly(t, c);
                if (fa < 0.0) == (fc < 0.0) {
                    a = c;
                    fa = fc;
                } else {
                    b = c;
                }
            }
            roots.push(0.5 * (a + b));
        }
        prev_x = x;
        prev_f = f;
    }
    roots
}

/// A random unreduced symmetric tridiagonal operator.
pub fn random_tridiagonal(rng: &mut impl Rng, n: usize) -> TridiagonalOperator {
    let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let offdiag: Vec<f64> = (0..n - 1).map(|_| -rng.gen_range(0.05..3.0)).collect();
    TridiagonalOperator::from_parts((0.0, 1.0), 1.0, diag, offdiag).unwrap()
}

/// Brute-force trapezoid rule with a million panels.
pub fn trapezoid_oracle(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = 0.5 * (f(a) + f(b));
    for i in 1..panels {
        s += f(a + h * i as f64);
    }
    s * h
}

/// The standardized asymmetric double-barrier model used across the
/// pipeline tests.
pub fn canonical_model() -> PotentialModel {
    PotentialModel::new(
        PotentialFamily::TwoGaussianBarriers {
            b_minus: 0.5,
            b_plus: 0.32,
            p_minus: -2.0,
            p_plus: 2.0,
            w_minus: 1.1,
            w_plus: 1.1,
        },
        2.0,
    )
    .unwrap()
}

pub const CANONICAL_OMEGA: (f64, f64) = (-2.76, 2.81);
