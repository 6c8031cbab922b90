//! Sketching transforms.
//!
//! A sketch is a random m×τ matrix S.  Per iteration the solver needs the
//! triple (SᵀA, SᵀAS, Sᵀr) and the ability to map a τ-vector δ back up to
//! S δ.  Five transforms are provided:
//!
//! * `Subsample`: τ distinct identity columns; applying it is pure slicing.
//! * `Gaussian`: i.i.d. standard normal entries.
//! * `Count`: every input row gets a uniform output bucket and a random
//!   sign; signed rows are summed per bucket.
//! * `SubCount`: subsample s rows, flip signs, sum contiguous groups of k,
//!   with τ = s/k.  The summing pattern is not shuffled.
//! * `Srht`: Sᵀ = (1/√(τm)) I_C H_m D with H_m the order-m Hadamard matrix,
//!   applied through the fast transform.  Requires m to be a power of two;
//!   see [`pad_to_power_of_two`] for general systems.
//!
//! Randomness is consumed from a caller-supplied generator in a fixed order
//! per kind (indices before signs; Gaussian entries in row-major order of
//! Sᵀ), so a fixed seed reproduces the exact realization sequence.

mod pad;

pub use pad::pad_to_power_of_two;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{fwht_in_place, hadamard_entry, DenseMatrix, Matrix};

/// The five supported transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SketchKind {
    Subsample,
    Gaussian,
    Count,
    SubCount,
    Srht,
}

impl SketchKind {
    pub const ALL: [SketchKind; 5] = [
        SketchKind::Subsample,
        SketchKind::Gaussian,
        SketchKind::Count,
        SketchKind::SubCount,
        SketchKind::Srht,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SketchKind::Subsample => "subsample",
            SketchKind::Gaussian => "gaussian",
            SketchKind::Count => "count",
            SketchKind::SubCount => "subcount",
            SketchKind::Srht => "srht",
        }
    }
}

impl std::fmt::Display for SketchKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SketchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "subsample" => Ok(SketchKind::Subsample),
            "gaussian" => Ok(SketchKind::Gaussian),
            "count" => Ok(SketchKind::Count),
            "subcount" => Ok(SketchKind::SubCount),
            "srht" => Ok(SketchKind::Srht),
            other => Err(Error::invalid(format!("unknown sketch kind '{other}'"))),
        }
    }
}

/// Sketch kind plus sketch size τ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SketchConfig {
    pub kind: SketchKind,
    pub sketch_size: usize,
}

impl SketchConfig {
    pub fn new(kind: SketchKind, sketch_size: usize) -> Self {
        Self { kind, sketch_size }
    }

    /// Checks the configuration against the system order m.
    pub fn validate(&self, m: usize) -> Result<()> {
        if m == 0 {
            return Err(Error::invalid("sketch: system order must be positive"));
        }
        if self.sketch_size == 0 || self.sketch_size > m {
            return Err(Error::invalid(format!(
                "sketch size {} must lie in [1, {}]",
                self.sketch_size, m
            )));
        }
        if self.kind == SketchKind::Srht && !m.is_power_of_two() {
            return Err(Error::invalid(format!(
                "srht requires a power-of-two order, got {m}; pad the system first"
            )));
        }
        Ok(())
    }

    /// Draws one fresh realization. Consumes the generator in a fixed,
    /// documented order.
    pub fn draw<R: Rng>(&self, m: usize, rng: &mut R) -> Result<SketchState> {
        self.validate(m)?;
        let tau = self.sketch_size;
        Ok(match self.kind {
            SketchKind::Subsample => SketchState::Subsample {
                m,
                selected: sample_sorted(m, tau, rng),
            },
            SketchKind::Gaussian => {
                let mut data = Vec::with_capacity(tau * m);
                for _ in 0..tau * m {
                    data.push(rng.sample::<f64, _>(rand_distr::StandardNormal));
                }
                SketchState::Gaussian {
                    st: DenseMatrix::new(tau, m, data).expect("gaussian block is well-formed"),
                }
            }
            SketchKind::Count => {
                let buckets: Vec<usize> = (0..m).map(|_| rng.random_range(0..tau)).collect();
                let signs = draw_signs(m, rng);
                SketchState::Count {
                    m,
                    tau,
                    buckets,
                    signs,
                }
            }
            SketchKind::SubCount => {
                let (s, k) = subcount_params(tau, m)?;
                let selected = sample_sorted(m, s, rng);
                let signs = draw_signs(s, rng);
                SketchState::SubCount {
                    m,
                    sum_size: k,
                    selected,
                    signs,
                }
            }
            SketchKind::Srht => {
                let signs = draw_signs(m, rng);
                let selected = sample_sorted(m, tau, rng);
                SketchState::Srht {
                    m,
                    signs,
                    selected,
                }
            }
        })
    }
}

/// SubCount parameters (s, k) for a requested sketch size: k = 10 when
/// 10τ ≤ m, otherwise k = ⌊m/τ⌋; s = kτ in both cases.
pub fn subcount_params(tau: usize, m: usize) -> Result<(usize, usize)> {
    if tau == 0 || tau > m {
        return Err(Error::invalid(format!(
            "subcount: sketch size {tau} must lie in [1, {m}]"
        )));
    }
    let k = if 10 * tau <= m { 10 } else { m / tau };
    Ok((k * tau, k))
}

/// Partial Fisher-Yates draw of `tau` distinct indices in [0, m), reported
/// in ascending order.
fn sample_sorted<R: Rng>(m: usize, tau: usize, rng: &mut R) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..m).collect();
    for t in 0..tau {
        let j = rng.random_range(t..m);
        pool.swap(t, j);
    }
    let mut out = pool;
    out.truncate(tau);
    out.sort_unstable();
    out
}

fn draw_signs<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n)
        .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
        .collect()
}

/// The per-iteration triple (SᵀA, SᵀAS, Sᵀr).
#[derive(Debug, Clone)]
pub struct SketchOutcome {
    /// SᵀA, τ×m. Subsampling preserves the storage format of A; every other
    /// kind produces a dense block.
    pub sa: Matrix,
    /// SᵀAS, τ×τ, symmetrized.
    pub sas: DenseMatrix,
    /// Sᵀr.
    pub rs: Vec<f64>,
}

/// One realized sketching matrix, stored implicitly.
#[derive(Debug, Clone)]
pub enum SketchState {
    Subsample {
        m: usize,
        /// Selected rows, ascending.
        selected: Vec<usize>,
    },
    Gaussian {
        /// Sᵀ, τ×m.
        st: DenseMatrix,
    },
    Count {
        m: usize,
        tau: usize,
        /// Output bucket of each input row.
        buckets: Vec<usize>,
        /// Sign of each input row.
        signs: Vec<f64>,
    },
    SubCount {
        m: usize,
        /// Rows kept by the subsampling step, ascending.
        selected: Vec<usize>,
        /// Sign per kept row.
        signs: Vec<f64>,
        /// Contiguous group length k; bucket of the j-th kept row is j/k.
        sum_size: usize,
    },
    Srht {
        m: usize,
        /// Diagonal of D.
        signs: Vec<f64>,
        /// Rows of H kept by I_C, ascending.
        selected: Vec<usize>,
    },
}

impl SketchState {
    pub fn dim(&self) -> usize {
        match self {
            SketchState::Subsample { m, .. }
            | SketchState::Count { m, .. }
            | SketchState::SubCount { m, .. }
            | SketchState::Srht { m, .. } => *m,
            SketchState::Gaussian { st } => st.cols(),
        }
    }

    pub fn sketch_size(&self) -> usize {
        match self {
            SketchState::Subsample { selected, .. } => selected.len(),
            SketchState::Gaussian { st } => st.rows(),
            SketchState::Count { tau, .. } => *tau,
            SketchState::SubCount {
                selected, sum_size, ..
            } => selected.len() / sum_size,
            SketchState::Srht { selected, .. } => selected.len(),
        }
    }

    fn srht_scale(&self) -> f64 {
        1.0 / ((self.sketch_size() * self.dim()) as f64).sqrt()
    }

    /// Computes (SᵀA, SᵀAS, Sᵀr) for a symmetric A of matching order.
    pub fn apply(&self, a: &Matrix, r: &[f64]) -> Result<SketchOutcome> {
        let m = self.dim();
        if a.rows() != m || a.cols() != m {
            return Err(Error::invalid(format!(
                "sketch drawn for order {m} applied to a {}x{} matrix",
                a.rows(),
                a.cols()
            )));
        }
        if r.len() != m {
            return Err(Error::invalid("sketch: residual length mismatch"));
        }
        let tau = self.sketch_size();
        match self {
            SketchState::Subsample { selected, .. } => {
                let sa = a.select_rows(selected)?;
                let mut sas = DenseMatrix::zeros(tau, tau);
                match &sa {
                    Matrix::Dense(d) => {
                        for t in 0..tau {
                            let row = d.row(t);
                            for (u, &c) in selected.iter().enumerate() {
                                sas.set(t, u, row[c]);
                            }
                        }
                    }
                    Matrix::Csr(s) => {
                        // Position of each original column inside the
                        // selection, or sentinel.
                        let mut pos = vec![usize::MAX; m];
                        for (u, &c) in selected.iter().enumerate() {
                            pos[c] = u;
                        }
                        for t in 0..tau {
                            let (cols, vals) = s.row(t);
                            for (&j, &v) in cols.iter().zip(vals) {
                                if pos[j] != usize::MAX {
                                    sas.set(t, pos[j], v);
                                }
                            }
                        }
                    }
                }
                sas.symmetrize();
                let rs = selected.iter().map(|&i| r[i]).collect();
                Ok(SketchOutcome { sa, sas, rs })
            }
            SketchState::Gaussian { st } => {
                let mut sa = DenseMatrix::zeros(tau, m);
                match a {
                    Matrix::Dense(ad) => {
                        for i in 0..m {
                            let arow = ad.row(i);
                            for t in 0..tau {
                                let g = st.get(t, i);
                                if g == 0.0 {
                                    continue;
                                }
                                let sarow = sa.row_mut(t);
                                for (j, &v) in arow.iter().enumerate() {
                                    sarow[j] += g * v;
                                }
                            }
                        }
                    }
                    Matrix::Csr(ac) => {
                        for i in 0..m {
                            let (cols, vals) = ac.row(i);
                            for t in 0..tau {
                                let g = st.get(t, i);
                                let sarow = sa.row_mut(t);
                                for (&j, &v) in cols.iter().zip(vals) {
                                    sarow[j] += g * v;
                                }
                            }
                        }
                    }
                }
                let mut sas = DenseMatrix::zeros(tau, tau);
                for t in 0..tau {
                    for u in 0..tau {
                        let mut acc = 0.0;
                        for j in 0..m {
                            acc += sa.get(t, j) * st.get(u, j);
                        }
                        sas.set(t, u, acc);
                    }
                }
                sas.symmetrize();
                let rs = st.matvec(r);
                Ok(SketchOutcome {
                    sa: Matrix::Dense(sa),
                    sas,
                    rs,
                })
            }
            SketchState::Count {
                buckets, signs, ..
            } => Ok(self.bucketed_apply(a, r, |i| Some((buckets[i], signs[i])))),
            SketchState::SubCount {
                selected,
                signs,
                sum_size,
                ..
            } => {
                let mut slot = vec![usize::MAX; m];
                for (j, &row) in selected.iter().enumerate() {
                    slot[row] = j;
                }
                Ok(self.bucketed_apply(a, r, |i| {
                    let j = slot[i];
                    (j != usize::MAX).then(|| (j / sum_size, signs[j]))
                }))
            }
            SketchState::Srht {
                signs, selected, ..
            } => {
                let scale = self.srht_scale();
                let mut sa = DenseMatrix::zeros(tau, m);
                let mut buf = vec![0.0; m];
                // Column j of SᵀA is (1/√(τm)) I_C H (D A e_j); by symmetry
                // of A it comes from row j, sign-flipped then transformed.
                for j in 0..m {
                    match a {
                        Matrix::Dense(ad) => {
                            for (i, &v) in ad.row(j).iter().enumerate() {
                                buf[i] = v * signs[i];
                            }
                        }
                        Matrix::Csr(ac) => {
                            buf.fill(0.0);
                            let (cols, vals) = ac.row(j);
                            for (&i, &v) in cols.iter().zip(vals) {
                                buf[i] = v * signs[i];
                            }
                        }
                    }
                    fwht_in_place(&mut buf).expect("padded order is a power of two");
                    for (t, &c) in selected.iter().enumerate() {
                        sa.set(t, j, scale * buf[c]);
                    }
                }
                let mut sas = DenseMatrix::zeros(tau, tau);
                for t in 0..tau {
                    for (i, v) in buf.iter_mut().enumerate() {
                        *v = sa.get(t, i) * signs[i];
                    }
                    fwht_in_place(&mut buf).expect("padded order is a power of two");
                    for (u, &c) in selected.iter().enumerate() {
                        sas.set(t, u, scale * buf[c]);
                    }
                }
                sas.symmetrize();
                for (i, v) in buf.iter_mut().enumerate() {
                    *v = r[i] * signs[i];
                }
                fwht_in_place(&mut buf).expect("padded order is a power of two");
                let rs = selected.iter().map(|&c| scale * buf[c]).collect();
                Ok(SketchOutcome {
                    sa: Matrix::Dense(sa),
                    sas,
                    rs,
                })
            }
        }
    }

    /// Shared Count/SubCount path: `assign(i)` yields the (bucket, sign) of
    /// input row i, or None when the row is dropped.
    fn bucketed_apply(
        &self,
        a: &Matrix,
        r: &[f64],
        assign: impl Fn(usize) -> Option<(usize, f64)>,
    ) -> SketchOutcome {
        let m = self.dim();
        let tau = self.sketch_size();
        let mut sa = DenseMatrix::zeros(tau, m);
        let mut rs = vec![0.0; tau];
        for i in 0..m {
            let Some((bucket, sign)) = assign(i) else {
                continue;
            };
            match a {
                Matrix::Dense(ad) => {
                    let arow = ad.row(i);
                    let sarow = sa.row_mut(bucket);
                    for (j, &v) in arow.iter().enumerate() {
                        sarow[j] += sign * v;
                    }
                }
                Matrix::Csr(ac) => {
                    let (cols, vals) = ac.row(i);
                    let sarow = sa.row_mut(bucket);
                    for (&j, &v) in cols.iter().zip(vals) {
                        sarow[j] += sign * v;
                    }
                }
            }
            rs[bucket] += sign * r[i];
        }
        let mut sas = DenseMatrix::zeros(tau, tau);
        for i in 0..m {
            if let Some((bucket, sign)) = assign(i) {
                for t in 0..tau {
                    sas.set(t, bucket, sas.get(t, bucket) + sign * sa.get(t, i));
                }
            }
        }
        sas.symmetrize();
        SketchOutcome {
            sa: Matrix::Dense(sa),
            sas,
            rs,
        }
    }

    /// S δ as a full m-vector.
    pub fn expand(&self, delta: &[f64]) -> Vec<f64> {
        debug_assert_eq!(delta.len(), self.sketch_size());
        let m = self.dim();
        let mut out = vec![0.0; m];
        match self {
            SketchState::Subsample { selected, .. } => {
                for (t, &i) in selected.iter().enumerate() {
                    out[i] = delta[t];
                }
            }
            SketchState::Gaussian { st } => {
                out = st.tr_matvec(delta);
            }
            SketchState::Count {
                buckets, signs, ..
            } => {
                for i in 0..m {
                    out[i] = signs[i] * delta[buckets[i]];
                }
            }
            SketchState::SubCount {
                selected,
                signs,
                sum_size,
                ..
            } => {
                for (j, &row) in selected.iter().enumerate() {
                    out[row] = signs[j] * delta[j / sum_size];
                }
            }
            SketchState::Srht {
                signs, selected, ..
            } => {
                let scale = self.srht_scale();
                for (t, &c) in selected.iter().enumerate() {
                    out[c] = delta[t];
                }
                fwht_in_place(&mut out).expect("padded order is a power of two");
                for (i, v) in out.iter_mut().enumerate() {
                    *v *= scale * signs[i];
                }
            }
        }
        out
    }

    /// w ← w − step · S δ. Subsampling touches only the selected entries.
    pub fn apply_update(&self, w: &mut [f64], delta: &[f64], step: f64) {
        debug_assert_eq!(w.len(), self.dim());
        if let SketchState::Subsample { selected, .. } = self {
            for (t, &i) in selected.iter().enumerate() {
                w[i] -= step * delta[t];
            }
            return;
        }
        let update = self.expand(delta);
        for (wi, ui) in w.iter_mut().zip(&update) {
            *wi -= step * ui;
        }
    }

    /// The explicit m×τ matrix this state represents. Intended for tests
    /// and small-scale verification, not the solve path.
    pub fn materialize(&self) -> DenseMatrix {
        let m = self.dim();
        let tau = self.sketch_size();
        let mut s = DenseMatrix::zeros(m, tau);
        match self {
            SketchState::Subsample { selected, .. } => {
                for (t, &i) in selected.iter().enumerate() {
                    s.set(i, t, 1.0);
                }
            }
            SketchState::Gaussian { st } => {
                for t in 0..tau {
                    for i in 0..m {
                        s.set(i, t, st.get(t, i));
                    }
                }
            }
            SketchState::Count {
                buckets, signs, ..
            } => {
                for i in 0..m {
                    s.set(i, buckets[i], signs[i]);
                }
            }
            SketchState::SubCount {
                selected,
                signs,
                sum_size,
                ..
            } => {
                for (j, &row) in selected.iter().enumerate() {
                    s.set(row, j / sum_size, signs[j]);
                }
            }
            SketchState::Srht {
                signs, selected, ..
            } => {
                let scale = self.srht_scale();
                for (t, &c) in selected.iter().enumerate() {
                    for i in 0..m {
                        s.set(i, t, scale * hadamard_entry(c, i) * signs[i]);
                    }
                }
            }
        }
        s
    }
}
