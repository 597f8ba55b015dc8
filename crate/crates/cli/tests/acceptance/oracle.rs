//! Dense eigensolver oracle local to the acceptance suite.

use rand::Rng;
use resonance_core::TridiagonalOperator;

pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    let norm: f64 = a
        .iter()
        .flat_map(|r| r.iter())
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt()
        .max(1.0);
    for _ in 0..100 {
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

pub fn random_tridiagonal(rng: &mut impl Rng, n: usize) -> TridiagonalOperator {
    let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
    let offdiag: Vec<f64> = (0..n - 1).map(|_| -rng.gen_range(0.05..3.0)).collect();
    TridiagonalOperator::from_parts((0.0, 1.0), 1.0, diag, offdiag).unwrap()
}
