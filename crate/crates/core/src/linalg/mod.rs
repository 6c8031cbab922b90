//! Matrix containers and the small numeric kernels the solvers are built on.
//!
//! Everything here is 64-bit floats. Types are immutable after construction
//! and safe to share across threads; the free functions are pure.

mod dense;
mod eigen;
mod fwht;
mod sparse;

pub use dense::DenseMatrix;
pub use eigen::{eig_sym, least_norm_solution, PINV_REL_CUTOFF, SYMMETRY_REL_TOL};
pub use fwht::{fwht, fwht_in_place, hadamard_entry};
pub use sparse::CsrMatrix;

use crate::error::Result;

/// Dense or CSR storage behind one interface. The solvers never care which
/// one they are holding.
#[derive(Debug, Clone, PartialEq)]
pub enum Matrix {
    Dense(DenseMatrix),
    Csr(CsrMatrix),
}

impl Matrix {
    pub fn rows(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.rows(),
            Matrix::Csr(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            Matrix::Dense(m) => m.cols(),
            Matrix::Csr(m) => m.cols(),
        }
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self, Matrix::Csr(_))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        match self {
            Matrix::Dense(m) => m.get(i, j),
            Matrix::Csr(m) => m.get(i, j),
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Matrix::Dense(m) => m.matvec(x),
            Matrix::Csr(m) => m.matvec(x),
        }
    }

    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        match self {
            Matrix::Dense(m) => m.tr_matvec(x),
            Matrix::Csr(m) => m.tr_matvec(x),
        }
    }

    /// Submatrix of the listed rows in the listed order, preserving storage.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Matrix> {
        Ok(match self {
            Matrix::Dense(m) => Matrix::Dense(m.select_rows(indices)?),
            Matrix::Csr(m) => Matrix::Csr(m.select_rows(indices)?),
        })
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            Matrix::Dense(m) => m.clone(),
            Matrix::Csr(m) => m.to_dense(),
        }
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.get(i, i)
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows().min(self.cols())).map(|i| self.get(i, i)).sum()
    }

    pub fn is_symmetric_within(&self, rel_tol: f64) -> bool {
        match self {
            Matrix::Dense(m) => m.is_symmetric_within(rel_tol),
            Matrix::Csr(m) => m.to_dense().is_symmetric_within(rel_tol),
        }
    }
}

impl From<DenseMatrix> for Matrix {
    fn from(m: DenseMatrix) -> Self {
        Matrix::Dense(m)
    }
}

impl From<CsrMatrix> for Matrix {
    fn from(m: CsrMatrix) -> Self {
        Matrix::Csr(m)
    }
}

/// Euclidean norm.
pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
