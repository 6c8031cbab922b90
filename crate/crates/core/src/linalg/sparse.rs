//! Compressed sparse row matrix.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// CSR matrix of 64-bit floats. Column indices are strictly increasing
/// within each row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(
        rows: usize,
        cols: usize,
        row_offsets: Vec<usize>,
        col_indices: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_offsets.len() != rows + 1 {
            return Err(Error::invalid("csr: row_offsets length must be rows + 1"));
        }
        if row_offsets[0] != 0 || *row_offsets.last().unwrap() != values.len() {
            return Err(Error::invalid("csr: row_offsets must start at 0 and end at nnz"));
        }
        if col_indices.len() != values.len() {
            return Err(Error::invalid("csr: col_indices and values length mismatch"));
        }
        if row_offsets.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("csr: row_offsets must be non-decreasing"));
        }
        for r in 0..rows {
            let cols_r = &col_indices[row_offsets[r]..row_offsets[r + 1]];
            if cols_r.iter().any(|&c| c >= cols) {
                return Err(Error::invalid("csr: column index out of range"));
            }
            if cols_r.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::invalid(
                    "csr: column indices must be strictly increasing within a row",
                ));
            }
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("csr: non-finite value"));
        }
        Ok(Self {
            rows,
            cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    /// Builds from dense, keeping entries with |v| > 0.
    pub fn from_dense(m: &DenseMatrix) -> Self {
        let mut row_offsets = Vec::with_capacity(m.rows() + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for i in 0..m.rows() {
            for (j, &v) in m.row(i).iter().enumerate() {
                if v != 0.0 {
                    col_indices.push(j);
                    values.push(v);
                }
            }
            row_offsets.push(values.len());
        }
        Self {
            rows: m.rows(),
            cols: m.cols(),
            row_offsets,
            col_indices,
            values,
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                out.set(i, j, v);
            }
        }
        out
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    /// Column indices and values of row `i`.
    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let span = self.row_offsets[i]..self.row_offsets[i + 1];
        (&self.col_indices[span.clone()], &self.values[span])
    }

    /// Entry lookup by binary search within the row.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(pos) => vals[pos],
            Err(_) => 0.0,
        }
    }

    /// y = M x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                let (cols, vals) = self.row(i);
                cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum()
            })
            .collect()
    }

    /// y = Mᵀ x
    pub fn tr_matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "tr_matvec dimension mismatch");
        let mut y = vec![0.0; self.cols];
        for i in 0..self.rows {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += xi * v;
            }
        }
        y
    }

    /// Writes row `i` densified into `buf` (which must be zeroed, length cols).
    /// Returns the touched column indices so the caller can re-zero cheaply.
    pub fn scatter_row<'a>(&'a self, i: usize, buf: &mut [f64]) -> &'a [usize] {
        let (cols, vals) = self.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            buf[j] = v;
        }
        cols
    }

    /// Submatrix of the listed rows, in the listed order. Only the selected
    /// rows' entries are copied.
    pub fn select_rows(&self, indices: &[usize]) -> Result<CsrMatrix> {
        let mut row_offsets = Vec::with_capacity(indices.len() + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for &i in indices {
            if i >= self.rows {
                return Err(Error::invalid(format!(
                    "row index {} out of range for {} rows",
                    i, self.rows
                )));
            }
            let (cols, vals) = self.row(i);
            col_indices.extend_from_slice(cols);
            values.extend_from_slice(vals);
            row_offsets.push(values.len());
        }
        Ok(CsrMatrix {
            rows: indices.len(),
            cols: self.cols,
            row_offsets,
            col_indices,
            values,
        })
    }

    pub fn transpose(&self) -> CsrMatrix {
        let mut counts = vec![0usize; self.cols];
        for &j in &self.col_indices {
            counts[j] += 1;
        }
        let mut row_offsets = vec![0usize; self.cols + 1];
        for j in 0..self.cols {
            row_offsets[j + 1] = row_offsets[j] + counts[j];
        }
        let mut cursor = row_offsets.clone();
        let mut col_indices = vec![0usize; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for i in 0..self.rows {
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                let pos = cursor[j];
                col_indices[pos] = i;
                values[pos] = v;
                cursor[j] += 1;
            }
        }
        CsrMatrix {
            rows: self.cols,
            cols: self.rows,
            row_offsets,
            col_indices,
            values,
        }
    }
}
