//! Reduction of ridge regression to a symmetric positive (semi)definite
//! linear system `A w = b`.
//!
//! Three routes produce the system: the primal normal equations
//! `(XᵀX + λI) w = Xᵀy` (d×d), the dual form `(XXᵀ + λI) α = y` (n×n) with
//! `w = Xᵀα`, and the Gaussian-kernel form `K(K + λI) α = K y` (n×n).
//! The system matrix is always materialized; its order `m` is `d`, `n` and
//! `n` respectively.

use crate::error::{Error, Result};
use crate::linalg::{CsrMatrix, DenseMatrix, Matrix};

/// Which reduction produced the system. Controls solution recovery.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Primal,
    Dual,
    Kernel,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Route::Primal => "primal",
            Route::Dual => "dual",
            Route::Kernel => "kernel",
        };
        f.write_str(s)
    }
}

/// Gram matrices denser than this fraction of entries are stored dense.
const CSR_KEEP_DENSITY: f64 = 0.25;

/// Order above which the positive-definiteness spot check is skipped.
const PD_CHECK_DIM_CAP: usize = 2000;

/// The assembled SPD system together with enough context to map solutions
/// back to the regression weights.
#[derive(Debug, Clone)]
pub struct RidgeProblem {
    a: Matrix,
    b: Vec<f64>,
    m: usize,
    lambda: f64,
    route: Route,
    x_ref: Option<Matrix>,
    sigma: Option<f64>,
}

impl RidgeProblem {
    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Order of the system matrix.
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn route(&self) -> Route {
        self.route
    }

    pub fn sigma(&self) -> Option<f64> {
        self.sigma
    }

    pub fn data(&self) -> Option<&Matrix> {
        self.x_ref.as_ref()
    }

    /// Residual `A w - b` recomputed from scratch.
    pub fn residual(&self, w: &[f64]) -> Vec<f64> {
        let mut r = self.a.matvec(w);
        for (ri, bi) in r.iter_mut().zip(&self.b) {
            *ri -= bi;
        }
        r
    }

    /// Same provenance, different system. Used by padding.
    pub(crate) fn with_replaced_system(&self, a: Matrix, b: Vec<f64>) -> RidgeProblem {
        RidgeProblem {
            m: a.rows(),
            a,
            b,
            lambda: self.lambda,
            route: self.route,
            x_ref: self.x_ref.clone(),
            sigma: self.sigma,
        }
    }

    /// Wraps an already-assembled symmetric system. Solutions are reported
    /// as-is, like the primal route.
    pub fn from_system(a: Matrix, b: Vec<f64>) -> Result<Self> {
        let m = a.rows();
        if a.cols() != m {
            return Err(Error::invalid("from_system: matrix must be square"));
        }
        if b.len() != m {
            return Err(Error::invalid(format!(
                "from_system: rhs length {} does not match order {}",
                b.len(),
                m
            )));
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("from_system: non-finite rhs entry"));
        }
        if !a.is_symmetric_within(crate::linalg::SYMMETRY_REL_TOL) {
            return Err(Error::contract("from_system: matrix is not symmetric"));
        }
        Ok(Self {
            a,
            b,
            m,
            lambda: 0.0,
            route: Route::Primal,
            x_ref: None,
            sigma: None,
        })
    }
}

fn check_build_inputs(x: &Matrix, y: &[f64], lambda: f64) -> Result<()> {
    if x.rows() == 0 || x.cols() == 0 {
        return Err(Error::invalid("data matrix must be non-empty"));
    }
    if y.len() != x.rows() {
        return Err(Error::invalid(format!(
            "target length {} does not match {} data rows",
            y.len(),
            x.rows()
        )));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite target entry"));
    }
    if !(lambda >= 0.0) {
        return Err(Error::invalid("lambda must be >= 0"));
    }
    Ok(())
}

/// Accumulates `Σ_i rows_i rows_iᵀ` of the given matrix into a dense Gram
/// matrix of order `cols`.
fn gram_of_rows(x: &Matrix) -> DenseMatrix {
    let cols = x.cols();
    let mut g = DenseMatrix::zeros(cols, cols);
    match x {
        Matrix::Dense(xd) => {
            for i in 0..xd.rows() {
                let row = xd.row(i);
                for (p, &vp) in row.iter().enumerate() {
                    if vp == 0.0 {
                        continue;
                    }
                    let grow = g.row_mut(p);
                    for (q, &vq) in row.iter().enumerate() {
                        grow[q] += vp * vq;
                    }
                }
            }
        }
        Matrix::Csr(xs) => {
            for i in 0..xs.rows() {
                let (cols_i, vals_i) = xs.row(i);
                for (pi, &p) in cols_i.iter().enumerate() {
                    let vp = vals_i[pi];
                    let grow = g.row_mut(p);
                    for (qi, &q) in cols_i.iter().enumerate() {
                        grow[q] += vp * vals_i[qi];
                    }
                }
            }
        }
    }
    g
}

/// Stores the assembled symmetric matrix in the cheaper format.
fn pack_system(mut a: DenseMatrix) -> Matrix {
    a.symmetrize();
    let nnz = a.data().iter().filter(|v| **v != 0.0).count();
    let total = a.rows() * a.cols();
    if total > 0 && (nnz as f64) <= CSR_KEEP_DENSITY * total as f64 {
        Matrix::Csr(CsrMatrix::from_dense(&a))
    } else {
        Matrix::Dense(a)
    }
}

/// One-shot positive definiteness probe for the primal and dual routes.
/// Kernel systems are only positive semidefinite, so they are exempt.
fn spot_check_pd(a: &Matrix, lambda: f64) -> Result<()> {
    if lambda <= 0.0 || a.rows() > PD_CHECK_DIM_CAP {
        return Ok(());
    }
    let dense = a.to_dense();
    let na = nalgebra::DMatrix::from_row_slice(dense.rows(), dense.cols(), dense.data());
    if na.cholesky().is_none() {
        return Err(Error::contract(
            "assembled system failed the positive-definiteness spot check",
        ));
    }
    Ok(())
}

/// Primal route: `A = XᵀX + λI`, `b = Xᵀy`, order d.
pub fn build_primal(x: Matrix, y: &[f64], lambda: f64) -> Result<RidgeProblem> {
    check_build_inputs(&x, y, lambda)?;
    let d = x.cols();
    let mut a = gram_of_rows(&x);
    for i in 0..d {
        a.set(i, i, a.get(i, i) + lambda);
    }
    let b = x.tr_matvec(y);
    let a = pack_system(a);
    spot_check_pd(&a, lambda)?;
    Ok(RidgeProblem {
        a,
        b,
        m: d,
        lambda,
        route: Route::Primal,
        x_ref: Some(x),
        sigma: None,
    })
}

/// Dual route: `A = XXᵀ + λI`, `b = y`, order n. The solution α maps back to
/// weights through `w = Xᵀα`.
pub fn build_dual(x: Matrix, y: &[f64], lambda: f64) -> Result<RidgeProblem> {
    check_build_inputs(&x, y, lambda)?;
    let n = x.rows();
    // XXᵀ = Σ_c (column c)(column c)ᵀ, i.e. the row Gram of Xᵀ.
    let xt = match &x {
        Matrix::Dense(m) => Matrix::Dense(m.transpose()),
        Matrix::Csr(m) => Matrix::Csr(m.transpose()),
    };
    let mut a = gram_of_rows(&xt);
    for i in 0..n {
        a.set(i, i, a.get(i, i) + lambda);
    }
    let a = pack_system(a);
    spot_check_pd(&a, lambda)?;
    Ok(RidgeProblem {
        a,
        b: y.to_vec(),
        m: n,
        lambda,
        route: Route::Dual,
        x_ref: Some(x),
        sigma: None,
    })
}

fn rbf(dist_sq: f64, sigma: f64) -> f64 {
    (-dist_sq / (2.0 * sigma * sigma)).exp()
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Gaussian kernel matrix of the rows of X.
fn kernel_matrix(x: &Matrix, sigma: f64) -> DenseMatrix {
    let n = x.rows();
    let rows: Vec<Vec<f64>> = match x {
        Matrix::Dense(m) => (0..n).map(|i| m.row(i).to_vec()).collect(),
        Matrix::Csr(m) => {
            let mut buf = vec![0.0; m.cols()];
            (0..n)
                .map(|i| {
                    let touched = m.scatter_row(i, &mut buf);
                    let dense = buf.clone();
                    for &j in touched {
                        buf[j] = 0.0;
                    }
                    dense
                })
                .collect()
        }
    };
    let mut k = DenseMatrix::zeros(n, n);
    for i in 0..n {
        k.set(i, i, 1.0);
        for j in (i + 1)..n {
            let v = rbf(squared_distance(&rows[i], &rows[j]), sigma);
            k.set(i, j, v);
            k.set(j, i, v);
        }
    }
    k
}

/// Kernel route: `A = K(K + λI)`, `b = K y` with the Gaussian kernel
/// `K_ij = exp(-‖x_i - x_j‖² / 2σ²)`. The system is dense of order n and
/// positive semidefinite (singular exactly when K is).
pub fn build_kernel(x: Matrix, y: &[f64], lambda: f64, sigma: f64) -> Result<RidgeProblem> {
    check_build_inputs(&x, y, lambda)?;
    if !(sigma > 0.0) {
        return Err(Error::invalid("sigma must be > 0"));
    }
    let n = x.rows();
    let k = kernel_matrix(&x, sigma);
    // A = K(K + λI) = K² + λK, assembled as one dense product.
    let mut shifted = k.clone();
    for i in 0..n {
        shifted.set(i, i, shifted.get(i, i) + lambda);
    }
    let mut a = k.matmul(&shifted);
    a.symmetrize();
    let b = k.matvec(y);
    Ok(RidgeProblem {
        a: Matrix::Dense(a),
        b,
        m: n,
        lambda,
        route: Route::Kernel,
        x_ref: Some(x),
        sigma: Some(sigma),
    })
}

/// Picks the smaller system: primal when d ≤ n, dual otherwise.
pub fn auto_select(x: Matrix, y: &[f64], lambda: f64) -> Result<RidgeProblem> {
    if x.cols() <= x.rows() {
        build_primal(x, y, lambda)
    } else {
        build_dual(x, y, lambda)
    }
}

/// Maps a solution of the assembled system back to d-dimensional weights.
/// Primal solutions pass through, dual solutions are multiplied by Xᵀ, and
/// kernel solutions are the α coefficients themselves (see
/// [`predict_kernel`]).
pub fn recover_weights(problem: &RidgeProblem, solution: &[f64]) -> Result<Vec<f64>> {
    if solution.len() != problem.m {
        return Err(Error::invalid(format!(
            "solution length {} does not match system order {}",
            solution.len(),
            problem.m
        )));
    }
    match problem.route {
        Route::Primal => Ok(solution.to_vec()),
        Route::Dual => {
            let x = problem
                .x_ref
                .as_ref()
                .ok_or_else(|| Error::invalid("dual problem is missing its data matrix"))?;
            Ok(x.tr_matvec(solution))
        }
        Route::Kernel => Ok(solution.to_vec()),
    }
}

/// Kernel prediction at a new point: `Σ_i α_i K(x_i, x_new)`.
pub fn predict_kernel(problem: &RidgeProblem, alpha: &[f64], x_new: &[f64]) -> Result<f64> {
    if problem.route != Route::Kernel {
        return Err(Error::invalid("predict_kernel requires a kernel problem"));
    }
    if alpha.len() != problem.m {
        return Err(Error::invalid("alpha length does not match system order"));
    }
    let x = problem
        .x_ref
        .as_ref()
        .ok_or_else(|| Error::invalid("kernel problem is missing its data matrix"))?;
    if x_new.len() != x.cols() {
        return Err(Error::invalid("query point has the wrong dimension"));
    }
    let sigma = problem.sigma.expect("kernel problems always carry sigma");
    let mut buf = vec![0.0; x.cols()];
    let mut out = 0.0;
    for i in 0..x.rows() {
        let dist_sq = match x {
            Matrix::Dense(m) => squared_distance(m.row(i), x_new),
            Matrix::Csr(m) => {
                let touched = m.scatter_row(i, &mut buf);
                let d = squared_distance(&buf, x_new);
                for &j in touched {
                    buf[j] = 0.0;
                }
                d
            }
        };
        out += alpha[i] * rbf(dist_sq, sigma);
    }
    Ok(out)
}
