//! Symmetric eigendecomposition and the least-norm subsolver.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Symmetry tolerance applied before decomposing, relative to the largest
/// entry magnitude.
pub const SYMMETRY_REL_TOL: f64 = 1e-9;

/// Relative eigenvalue cutoff of the pseudoinverse in [`least_norm_solution`].
pub const PINV_REL_CUTOFF: f64 = 1e-10;

const EIG_DIM_CAP: usize = 2000;

/// Eigendecomposition of a symmetric matrix.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as columns, so that `M V = V diag(values)`.
pub fn eig_sym(m: &DenseMatrix) -> Result<(Vec<f64>, DenseMatrix)> {
    if m.rows() != m.cols() {
        return Err(Error::contract("eig_sym: matrix must be square"));
    }
    if m.rows() > EIG_DIM_CAP {
        return Err(Error::invalid(format!(
            "eig_sym: dimension {} exceeds the supported cap {}",
            m.rows(),
            EIG_DIM_CAP
        )));
    }
    if !m.is_symmetric_within(SYMMETRY_REL_TOL) {
        return Err(Error::contract(format!(
            "eig_sym: matrix is not symmetric (max asymmetry {:.3e})",
            m.asymmetry()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok((Vec::new(), DenseMatrix::zeros(0, 0)));
    }
    // Force exact symmetry so the factorization sees a clean input.
    let mut work = m.clone();
    work.symmetrize();
    let na = DMatrix::from_row_slice(n, n, work.data());
    let eig = na.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Minimum-norm solution of `M x = r` for symmetric positive semidefinite M,
/// i.e. `M† r` with eigenvalues below `PINV_REL_CUTOFF * λ_max` treated as
/// zero.
pub fn least_norm_solution(m: &DenseMatrix, r: &[f64]) -> Result<Vec<f64>> {
    if m.rows() != m.cols() || m.rows() != r.len() {
        return Err(Error::invalid(format!(
            "least_norm_solution: shape mismatch ({}x{} matrix, rhs length {})",
            m.rows(),
            m.cols(),
            r.len()
        )));
    }
    if m.rows() == 0 {
        return Err(Error::invalid("least_norm_solution: empty system"));
    }
    if r.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("least_norm_solution: non-finite rhs"));
    }
    if !m.is_symmetric_within(SYMMETRY_REL_TOL) {
        return Err(Error::contract(format!(
            "least_norm_solution: matrix is not symmetric (max asymmetry {:.3e})",
            m.asymmetry()
        )));
    }
    let (values, vectors) = eig_sym(m)?;
    let lambda_max = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if lambda_max == 0.0 {
        return Ok(vec![0.0; r.len()]);
    }
    let cutoff = PINV_REL_CUTOFF * lambda_max;

    // M† r = Σ_{|λ_i| > cutoff} (v_iᵀ r / λ_i) v_i
    let n = r.len();
    let mut out = vec![0.0; n];
    for (i, &lam) in values.iter().enumerate() {
        if lam.abs() <= cutoff {
            continue;
        }
        let mut proj = 0.0;
        for k in 0..n {
            proj += vectors.get(k, i) * r[k];
        }
        let scale = proj / lam;
        for k in 0..n {
            out[k] += scale * vectors.get(k, i);
        }
    }
    Ok(out)
}
