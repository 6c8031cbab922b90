//! Convergence-rate quantities, computed by explicit enumeration at small
//! scale so solver behaviour can be certified against them.
//!
//! The central object is the expected projection
//! `E[H_S] = Σ_i p_i S_i (S_iᵀ A S_i)† S_iᵀ` of a discrete sketch
//! distribution. From it come the linear rate
//! `ρ = λ_min⁺(A^{1/2} E[H_S] A^{1/2})`, the momentum residual bounds, the
//! coordinate-descent complexity pair, and the exact acceleration
//! parameters (μ, ν). The acceleration quantities are evaluated in the
//! norm induced by the system matrix, where the per-realization projector
//! is `P_i = A^{1/2} S_i (S_iᵀ A S_i)† S_iᵀ A^{1/2}`; this keeps
//! 0 < μ ≤ 1/ν ≤ 1 for every distribution and collapses to μ = ν = 1
//! exactly when the sketch is deterministically the identity.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{eig_sym, DenseMatrix, Matrix};
use crate::sketch::SketchConfig;
use crate::solvers::AccelParams;

/// Eigenvalues below this fraction of the largest count as zero.
pub const RANK_REL_CUTOFF: f64 = 1e-12;

/// Order cap for the enumeration oracles.
const ORACLE_DIM_CAP: usize = 200;

/// Caps for full subset enumeration; use Monte-Carlo estimation beyond.
const ENUM_DIM_CAP: usize = 12;
const ENUM_TAU_CAP: usize = 3;

/// An explicit, finitely-supported sketch distribution.
#[derive(Debug, Clone)]
pub struct DiscreteSketchEnsemble {
    realizations: Vec<DenseMatrix>,
    probabilities: Vec<f64>,
}

impl DiscreteSketchEnsemble {
    pub fn new(realizations: Vec<DenseMatrix>, probabilities: Vec<f64>) -> Result<Self> {
        if realizations.is_empty() || realizations.len() != probabilities.len() {
            return Err(Error::invalid(
                "ensemble needs matching, non-empty realization and probability lists",
            ));
        }
        let (rows, cols) = (realizations[0].rows(), realizations[0].cols());
        if realizations.iter().any(|s| s.rows() != rows || s.cols() != cols) {
            return Err(Error::invalid("ensemble realizations must share one shape"));
        }
        if probabilities.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::invalid("ensemble probabilities must be non-negative"));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "ensemble probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self {
            realizations,
            probabilities,
        })
    }

    /// A single fixed sketching matrix.
    pub fn deterministic(s: DenseMatrix) -> Self {
        Self {
            realizations: vec![s],
            probabilities: vec![1.0],
        }
    }

    /// Coordinate vectors e_1..e_m with equal probability.
    pub fn single_column_uniform(m: usize) -> Self {
        let realizations = (0..m)
            .map(|i| DenseMatrix::from_fn(m, 1, |r, _| if r == i { 1.0 } else { 0.0 }))
            .collect();
        Self {
            realizations,
            probabilities: vec![1.0 / m as f64; m],
        }
    }

    /// Coordinate vectors with p_i = A_ii / trace(A).
    pub fn coordinate_descent(a: &DenseMatrix) -> Result<Self> {
        let m = a.rows();
        let trace = a.trace();
        let mut probabilities = Vec::with_capacity(m);
        for i in 0..m {
            let d = a.get(i, i);
            if !(d > 0.0) {
                return Err(Error::invalid(
                    "coordinate-descent ensemble requires a positive diagonal",
                ));
            }
            probabilities.push(d / trace);
        }
        let realizations = (0..m)
            .map(|i| DenseMatrix::from_fn(m, 1, |r, _| if r == i { 1.0 } else { 0.0 }))
            .collect();
        Ok(Self {
            realizations,
            probabilities,
        })
    }

    /// Arbitrary unit columns with probabilities p_i ∝ s_iᵀ A s_i.
    pub fn convenient_columns(a: &DenseMatrix, columns: &[Vec<f64>]) -> Result<Self> {
        let m = a.rows();
        let mut weights = Vec::with_capacity(columns.len());
        let mut realizations = Vec::with_capacity(columns.len());
        for s in columns {
            if s.len() != m {
                return Err(Error::invalid("column length must match the matrix order"));
            }
            let as_ = a.matvec(s);
            let w = crate::linalg::dot(s, &as_);
            if !(w > 0.0) {
                return Err(Error::invalid(
                    "convenient probabilities need s_iᵀ A s_i > 0 for every column",
                ));
            }
            weights.push(w);
            realizations.push(DenseMatrix::from_fn(m, 1, |r, _| s[r]));
        }
        let total: f64 = weights.iter().sum();
        let probabilities = weights.into_iter().map(|w| w / total).collect();
        Ok(Self {
            realizations,
            probabilities,
        })
    }

    /// Every τ-subset of {0..m} with equal probability, as in the uniform
    /// subsampling sketch. Capped at m ≤ 12, τ ≤ 3; estimate larger
    /// ensembles with [`expected_projection_mc`].
    pub fn subsample_uniform(m: usize, tau: usize) -> Result<Self> {
        if tau == 0 || tau > m {
            return Err(Error::invalid("subset size out of range"));
        }
        if m > ENUM_DIM_CAP || tau > ENUM_TAU_CAP {
            return Err(Error::invalid(format!(
                "subset enumeration is capped at m <= {ENUM_DIM_CAP}, tau <= {ENUM_TAU_CAP}"
            )));
        }
        let mut subsets = Vec::new();
        let mut current = Vec::with_capacity(tau);
        enumerate_subsets(m, tau, 0, &mut current, &mut subsets);
        let count = subsets.len();
        let realizations = subsets
            .into_iter()
            .map(|subset| {
                DenseMatrix::from_fn(m, tau, |r, c| if subset[c] == r { 1.0 } else { 0.0 })
            })
            .collect();
        Ok(Self {
            realizations,
            probabilities: vec![1.0 / count as f64; count],
        })
    }

    pub fn len(&self) -> usize {
        self.realizations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.realizations.is_empty()
    }

    pub fn realizations(&self) -> &[DenseMatrix] {
        &self.realizations
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    fn dim(&self) -> usize {
        self.realizations[0].rows()
    }
}

fn enumerate_subsets(
    m: usize,
    tau: usize,
    start: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == tau {
        out.push(current.clone());
        return;
    }
    let remaining = tau - current.len();
    for i in start..=(m - remaining) {
        current.push(i);
        enumerate_subsets(m, tau, i + 1, current, out);
        current.pop();
    }
}

/// Pseudoinverse of a symmetric matrix with the module's rank cutoff.
fn pinv_sym(m: &DenseMatrix) -> Result<DenseMatrix> {
    let (values, vectors) = eig_sym(m)?;
    let lambda_max = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let cutoff = RANK_REL_CUTOFF * lambda_max;
    let n = m.rows();
    let mut out = DenseMatrix::zeros(n, n);
    for (idx, &lam) in values.iter().enumerate() {
        if lam.abs() <= cutoff {
            continue;
        }
        let inv = 1.0 / lam;
        for i in 0..n {
            let vi = vectors.get(i, idx);
            if vi == 0.0 {
                continue;
            }
            for j in 0..n {
                out.set(i, j, out.get(i, j) + inv * vi * vectors.get(j, idx));
            }
        }
    }
    Ok(out)
}

/// Symmetric square root of a positive semidefinite matrix. Eigenvalues in
/// the negative roundoff band are clamped to zero; anything more negative
/// is rejected.
fn sqrt_spd(a: &DenseMatrix) -> Result<DenseMatrix> {
    let (values, vectors) = eig_sym(a)?;
    let lambda_max = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if values.iter().any(|&v| v < -RANK_REL_CUTOFF * lambda_max.max(1.0)) {
        return Err(Error::contract(
            "matrix square root requires a positive semidefinite input",
        ));
    }
    let n = a.rows();
    let mut out = DenseMatrix::zeros(n, n);
    for (idx, &lam) in values.iter().enumerate() {
        let root = lam.max(0.0).sqrt();
        if root == 0.0 {
            continue;
        }
        for i in 0..n {
            let vi = vectors.get(i, idx);
            for j in 0..n {
                out.set(i, j, out.get(i, j) + root * vi * vectors.get(j, idx));
            }
        }
    }
    out.symmetrize();
    Ok(out)
}

fn check_oracle_inputs(a: &DenseMatrix, ensemble: &DiscreteSketchEnsemble) -> Result<()> {
    if a.rows() != a.cols() {
        return Err(Error::invalid("expected a square system matrix"));
    }
    if a.rows() > ORACLE_DIM_CAP {
        return Err(Error::invalid(format!(
            "enumeration oracles are capped at order {ORACLE_DIM_CAP}"
        )));
    }
    if ensemble.dim() != a.rows() {
        return Err(Error::invalid(
            "ensemble realizations do not match the matrix order",
        ));
    }
    Ok(())
}

/// `E[H_S] = Σ_i p_i S_i (S_iᵀ A S_i)† S_iᵀ`, assembled term by term.
pub fn expected_projection(
    a: &DenseMatrix,
    ensemble: &DiscreteSketchEnsemble,
) -> Result<DenseMatrix> {
    check_oracle_inputs(a, ensemble)?;
    let m = a.rows();
    let mut eh = DenseMatrix::zeros(m, m);
    for (s, &p) in ensemble.realizations().iter().zip(ensemble.probabilities()) {
        if p == 0.0 {
            continue;
        }
        let as_ = a.matmul(s);
        let mut sas = s.transpose().matmul(&as_);
        sas.symmetrize();
        let minv = pinv_sym(&sas)?;
        let term = s.matmul(&minv).matmul(&s.transpose());
        eh.add_assign(&term, p);
    }
    eh.symmetrize();
    Ok(eh)
}

/// Monte-Carlo estimate of `E[H_S]` for a sketch configuration, with the
/// largest per-entry standard error. Complements [`expected_projection`]
/// where full enumeration is infeasible.
pub fn expected_projection_mc(
    a: &DenseMatrix,
    config: &SketchConfig,
    draws: usize,
    seed: u64,
) -> Result<(DenseMatrix, f64)> {
    let m = a.rows();
    config.validate(m)?;
    if draws < 2 {
        return Err(Error::invalid("need at least two draws"));
    }
    let a_mat = Matrix::Dense(a.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mean = DenseMatrix::zeros(m, m);
    let mut sq = DenseMatrix::zeros(m, m);
    let zero = vec![0.0; m];
    for _ in 0..draws {
        let state = config.draw(m, &mut rng)?;
        let out = state.apply(&a_mat, &zero)?;
        let minv = pinv_sym(&out.sas)?;
        let s = state.materialize();
        let term = s.matmul(&minv).matmul(&s.transpose());
        mean.add_assign(&term, 1.0);
        for i in 0..m {
            for j in 0..m {
                let v = term.get(i, j);
                sq.set(i, j, sq.get(i, j) + v * v);
            }
        }
    }
    let n = draws as f64;
    mean.scale(1.0 / n);
    let mut max_se = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let var = (sq.get(i, j) / n - mean.get(i, j) * mean.get(i, j)).max(0.0);
            max_se = max_se.max((var / n).sqrt());
        }
    }
    Ok((mean, max_se))
}

fn rho_from_expected_projection(a: &DenseMatrix, eh: &DenseMatrix) -> Result<f64> {
    let root = sqrt_spd(a)?;
    let mut conj = root.matmul(eh).matmul(&root);
    conj.symmetrize();
    let (values, _) = eig_sym(&conj)?;
    let lambda_max = values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if lambda_max == 0.0 {
        return Err(Error::contract(
            "expected projection vanishes; the ensemble never acts on the system",
        ));
    }
    let cutoff = RANK_REL_CUTOFF * lambda_max;
    values
        .iter()
        .copied()
        .filter(|&v| v > cutoff)
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |best| best.min(v)))
        })
        .ok_or_else(|| Error::contract("no eigenvalue above the rank cutoff"))
}

/// Linear convergence rate `ρ = λ_min⁺(A^{1/2} E[H_S] A^{1/2})`.
pub fn rate_rho(a: &DenseMatrix, ensemble: &DiscreteSketchEnsemble) -> Result<f64> {
    let eh = expected_projection(a, ensemble)?;
    rho_from_expected_projection(a, &eh)
}

/// Closed form of `λ_min(E[H_S])` for unit-column sketches s_1..s_q drawn
/// with probabilities ∝ s_iᵀ A s_i: it equals
/// `λ_min(F Fᵀ) / Σ_j s_jᵀ A s_j` with F = [s_1 ... s_q].
pub fn lambda_min_eh_single_column(a: &DenseMatrix, columns: &[Vec<f64>]) -> Result<f64> {
    if columns.is_empty() {
        return Err(Error::invalid("need at least one column"));
    }
    let m = a.rows();
    let mut denom = 0.0;
    for s in columns {
        if s.len() != m {
            return Err(Error::invalid("column length must match the matrix order"));
        }
        let norm = crate::linalg::norm2(s);
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!(
                "columns must be unit vectors, got norm {norm}"
            )));
        }
        denom += crate::linalg::dot(s, &a.matvec(s));
    }
    if !(denom > 0.0) {
        return Err(Error::invalid("Σ s_iᵀ A s_i must be positive"));
    }
    let mut fft = DenseMatrix::zeros(m, m);
    for s in columns {
        for i in 0..m {
            if s[i] == 0.0 {
                continue;
            }
            for j in 0..m {
                fft.set(i, j, fft.get(i, j) + s[i] * s[j]);
            }
        }
    }
    fft.symmetrize();
    let (values, _) = eig_sym(&fft)?;
    Ok(values[0] / denom)
}

/// Iteration-count bounds for coordinate descent at residual precision ε:
/// with momentum `4 trace(A)/ε`, without `(trace(A)/λ_min(A)) ln(λ_max(A)/ε)`.
pub fn cd_complexities(a: &DenseMatrix, epsilon: f64) -> Result<(f64, f64)> {
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be > 0"));
    }
    let (values, _) = eig_sym(a)?;
    let lambda_min = values[0];
    let lambda_max = *values.last().expect("non-empty spectrum");
    if !(lambda_min > 0.0) {
        return Err(Error::contract("complexity bounds require a positive definite matrix"));
    }
    let trace = a.trace();
    let t_momentum = 4.0 * trace / epsilon;
    let t_plain = trace / lambda_min * (lambda_max / epsilon).ln();
    Ok((t_momentum, t_plain))
}

/// Scaled-precision interval where the sublinear momentum bound beats the
/// linear one: `[1/2 − 1/2 √(1−16/κ), 1/2 + 1/2 √(1−16/κ)]` for κ ≥ 16,
/// empty below.
pub fn superiority_region(kappa: f64) -> Result<Option<(f64, f64)>> {
    if !(kappa >= 1.0) {
        return Err(Error::invalid("condition number must be >= 1"));
    }
    if kappa < 16.0 {
        return Ok(None);
    }
    let half_width = 0.5 * (1.0 - 16.0 / kappa).sqrt();
    Ok(Some((0.5 - half_width, 0.5 + half_width)))
}

/// Residual bound after k momentum steps with constant η:
/// `init / (λ_min(E[H_S]) · k · η(1−η))`.
pub fn momentum_bound(
    eta: f64,
    k: usize,
    init_err_a_norm_sq: f64,
    lambda_min_eh: f64,
) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid("eta must lie in (0, 1)"));
    }
    if k == 0 {
        return Err(Error::invalid("bound needs k >= 1"));
    }
    if !(lambda_min_eh > 0.0) {
        return Err(Error::invalid("lambda_min(E[H_S]) must be positive"));
    }
    Ok(init_err_a_norm_sq / (lambda_min_eh * k as f64 * eta * (1.0 - eta)))
}

/// General-schedule form of [`momentum_bound`]:
/// `init / (λ_min(E[H_S]) · Σ_t η_t(1−η_t))` over the given η sequence.
pub fn momentum_bound_general(
    etas: &[f64],
    init_err_a_norm_sq: f64,
    lambda_min_eh: f64,
) -> Result<f64> {
    if !(lambda_min_eh > 0.0) {
        return Err(Error::invalid("lambda_min(E[H_S]) must be positive"));
    }
    let denom: f64 = etas.iter().map(|&e| e * (1.0 - e)).sum();
    if !(denom > 0.0) {
        return Err(Error::invalid("Σ η_t(1−η_t) must be positive"));
    }
    Ok(init_err_a_norm_sq / (lambda_min_eh * denom))
}

/// Exact acceleration parameters plus a flag for ensembles whose expected
/// projector is rank deficient on the range of A (μ then follows the
/// smallest-nonzero-eigenvalue convention).
#[derive(Debug, Clone, Copy)]
pub struct AccelEstimate {
    pub params: AccelParams,
    pub rank_deficient: bool,
}

/// Computes (μ, ν) for the ensemble by enumeration, in the system-matrix
/// norm: μ is the smallest eigenvalue of E[P] restricted to range(A) and ν
/// the largest generalized eigenvalue of (E[P E[P]† P], E[P]) there, with
/// `P_i = A^{1/2} S_i (S_iᵀ A S_i)† S_iᵀ A^{1/2}`.
pub fn accel_params_exact(
    a: &DenseMatrix,
    ensemble: &DiscreteSketchEnsemble,
) -> Result<AccelEstimate> {
    check_oracle_inputs(a, ensemble)?;
    let m = a.rows();
    let (a_values, a_vectors) = eig_sym(a)?;
    let a_max = a_values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if a_max == 0.0 {
        return Err(Error::contract("zero system matrix"));
    }
    let a_cut = RANK_REL_CUTOFF * a_max;
    if a_values.iter().any(|&v| v < -a_cut) {
        return Err(Error::contract("acceleration parameters require A ⪰ 0"));
    }
    let range: Vec<usize> = (0..m).filter(|&i| a_values[i] > a_cut).collect();
    let ra = range.len();
    if ra == 0 {
        return Err(Error::contract("system matrix has empty range"));
    }
    // Basis of range(A) as columns.
    let q = DenseMatrix::from_fn(m, ra, |i, j| a_vectors.get(i, range[j]));
    let root = sqrt_spd(a)?;

    // Restricted projectors Qᵀ P_i Q, kept for the second moment.
    let mut projectors = Vec::with_capacity(ensemble.len());
    let mut g = DenseMatrix::zeros(ra, ra);
    for (s, &p) in ensemble.realizations().iter().zip(ensemble.probabilities()) {
        let as_ = a.matmul(s);
        let mut sas = s.transpose().matmul(&as_);
        sas.symmetrize();
        let minv = pinv_sym(&sas)?;
        let b = q.transpose().matmul(&root.matmul(s));
        let mut proj = b.matmul(&minv).matmul(&b.transpose());
        proj.symmetrize();
        g.add_assign(&proj, p);
        projectors.push((proj, p));
    }
    g.symmetrize();

    let (g_values, g_vectors) = eig_sym(&g)?;
    let g_max = g_values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if g_max == 0.0 {
        return Err(Error::contract(
            "expected projector vanishes on the range of A",
        ));
    }
    let g_cut = RANK_REL_CUTOFF * g_max;
    let rank_deficient = g_values.iter().any(|&v| v <= g_cut);
    let mu = g_values
        .iter()
        .copied()
        .filter(|&v| v > g_cut)
        .fold(f64::INFINITY, f64::min);

    // G† and G^{−1/2} on the range of G, from the shared eigensystem.
    let mut g_pinv = DenseMatrix::zeros(ra, ra);
    let mut g_inv_root = DenseMatrix::zeros(ra, ra);
    for (idx, &lam) in g_values.iter().enumerate() {
        if lam <= g_cut {
            continue;
        }
        for i in 0..ra {
            let vi = g_vectors.get(i, idx);
            for j in 0..ra {
                let vj = g_vectors.get(j, idx);
                g_pinv.set(i, j, g_pinv.get(i, j) + vi * vj / lam);
                g_inv_root.set(i, j, g_inv_root.get(i, j) + vi * vj / lam.sqrt());
            }
        }
    }

    let mut second = DenseMatrix::zeros(ra, ra);
    for (proj, p) in &projectors {
        let term = proj.matmul(&g_pinv).matmul(proj);
        second.add_assign(&term, *p);
    }
    second.symmetrize();
    let mut pencil = g_inv_root.matmul(&second).matmul(&g_inv_root);
    pencil.symmetrize();
    let (pencil_values, _) = eig_sym(&pencil)?;
    let nu = *pencil_values.last().expect("non-empty spectrum");

    Ok(AccelEstimate {
        params: AccelParams::new(mu, nu)?,
        rank_deficient,
    })
}

/// Spectral scalars plus rate and acceleration quantities for one
/// (matrix, ensemble) pair.
#[derive(Debug, Clone)]
pub struct RateCertificate {
    pub rho: f64,
    pub lambda_min_eh: f64,
    pub trace_a: f64,
    pub lambda_min_a: f64,
    pub lambda_max_a: f64,
    pub kappa: f64,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
}

/// Assembles the full certificate. μ and ν are left empty when the
/// acceleration computation reports a defect instead of values.
pub fn certificate(a: &DenseMatrix, ensemble: &DiscreteSketchEnsemble) -> Result<RateCertificate> {
    check_oracle_inputs(a, ensemble)?;
    let (a_values, _) = eig_sym(a)?;
    let lambda_min_a = a_values[0];
    let lambda_max_a = *a_values.last().expect("non-empty spectrum");
    if !(lambda_min_a > 0.0) {
        return Err(Error::contract("certificates require a positive definite matrix"));
    }
    let eh = expected_projection(a, ensemble)?;
    let rho = rho_from_expected_projection(a, &eh)?;
    let (eh_values, _) = eig_sym(&eh)?;
    let lambda_min_eh = eh_values[0].max(0.0);
    let (mu, nu) = match accel_params_exact(a, ensemble) {
        Ok(est) => (Some(est.params.mu()), Some(est.params.nu())),
        Err(_) => (None, None),
    };
    Ok(RateCertificate {
        rho,
        lambda_min_eh,
        trace_a: a.trace(),
        lambda_min_a,
        lambda_max_a,
        kappa: lambda_max_a / lambda_min_a,
        mu,
        nu,
    })
}
