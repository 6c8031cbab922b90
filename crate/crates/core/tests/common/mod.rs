//! Shared test oracles, kept independent of the library's numeric paths.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use skridge::{DenseMatrix, Matrix, RidgeProblem};

/// Cyclic Jacobi eigendecomposition for small symmetric matrices. Returns
/// ascending eigenvalues and eigenvectors as columns.
pub fn jacobi_eig(a: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut m: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..200 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p][q] * m[p][q];
            }
        }
        if off < 1e-300 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k][p];
                    let vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[x][x].total_cmp(&m[y][y]));
    let values: Vec<f64> = order.iter().map(|&i| m[i][i]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, j| v[i][order[j]]);
    (values, vectors)
}

/// Pseudoinverse assembled from the Jacobi decomposition with a relative
/// eigenvalue cutoff.
pub fn jacobi_pinv(a: &DenseMatrix, rel_cutoff: f64) -> DenseMatrix {
    let n = a.rows();
    let (values, vectors) = jacobi_eig(a);
    let lambda_max = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let cutoff = rel_cutoff * lambda_max;
    let mut out = DenseMatrix::zeros(n, n);
    for (idx, &lam) in values.iter().enumerate() {
        if lam.abs() <= cutoff {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                out.set(
                    i,
                    j,
                    out.get(i, j) + vectors.get(i, idx) * vectors.get(j, idx) / lam,
                );
            }
        }
    }
    out
}

/// Order-m Hadamard matrix straight from the doubling definition.
pub fn hadamard_recursive(m: usize) -> DenseMatrix {
    assert!(m.is_power_of_two());
    let mut h = DenseMatrix::from_fn(1, 1, |_, _| 1.0);
    while h.rows() < m {
        let n = h.rows();
        h = DenseMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let base = h.get(i % n, j % n);
            if i >= n && j >= n {
                -base
            } else {
                base
            }
        });
    }
    h
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Random symmetric matrix with entries of order one.
pub fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let mut a = DenseMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    a.symmetrize();
    a
}

/// Random SPD matrix GᵀG + ridge·I.
pub fn random_spd(n: usize, ridge: f64, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let g = DenseMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut a = g.transpose().matmul(&g);
    for i in 0..n {
        a.set(i, i, a.get(i, i) + ridge);
    }
    a.symmetrize();
    a
}

/// Random SPD system with a normal right-hand side.
pub fn random_spd_problem(n: usize, ridge: f64, seed: u64) -> RidgeProblem {
    let mut r = rng(seed);
    let a = random_spd(n, ridge, &mut r);
    let b = random_vector(n, &mut r);
    RidgeProblem::from_system(Matrix::Dense(a), b).unwrap()
}

/// ‖x − y‖_∞.
pub fn max_abs_diff(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// ‖v‖²_A.
pub fn a_norm_sq(a: &Matrix, v: &[f64]) -> f64 {
    let av = a.matvec(v);
    v.iter().zip(&av).map(|(x, y)| x * y).sum()
}

pub fn sub(x: &[f64], y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}
