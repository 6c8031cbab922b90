//! Problem data: synthetic generators and a generic numeric CSV loader.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use skridge::{CsrMatrix, DenseMatrix, Matrix};

use crate::CliError;

/// Stream id separating data generation from solver randomness.
const DATA_STREAM: u64 = 0xDA7A;

const NOISE_STD: f64 = 0.01;

fn data_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(DATA_STREAM);
    rng
}

/// Targets y = X w̄ + noise for a standard normal w̄ and noise std 0.01.
fn targets(x: &Matrix, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..x.cols())
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect();
    x.matvec(&w)
        .into_iter()
        .map(|v| v + NOISE_STD * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Dense n×d data with i.i.d. standard normal entries.
pub fn generate_dense(n: usize, d: usize, seed: u64) -> (Matrix, Vec<f64>) {
    let mut rng = data_rng(seed);
    let x = Matrix::Dense(DenseMatrix::from_fn(n, d, |_, _| {
        rng.sample::<f64, _>(StandardNormal)
    }));
    let y = targets(&x, &mut rng);
    (x, y)
}

/// Sparse n×d data: each entry is nonzero with the given probability,
/// nonzeros i.i.d. standard normal, stored CSR.
pub fn generate_sparse(n: usize, d: usize, density: f64, seed: u64) -> (Matrix, Vec<f64>) {
    let mut rng = data_rng(seed);
    let mut row_offsets = Vec::with_capacity(n + 1);
    let mut col_indices = Vec::new();
    let mut values = Vec::new();
    row_offsets.push(0);
    for _ in 0..n {
        for j in 0..d {
            if rng.random::<f64>() < density {
                col_indices.push(j);
                values.push(rng.sample::<f64, _>(StandardNormal));
            }
        }
        row_offsets.push(values.len());
    }
    let x = Matrix::Csr(
        CsrMatrix::new(n, d, row_offsets, col_indices, values)
            .expect("generated structure is valid"),
    );
    let y = targets(&x, &mut rng);
    (x, y)
}

/// Loads a numeric CSV where the last column is the target. A header row is
/// skipped when its first row fails to parse as numbers.
pub fn load_csv(path: &Path) -> Result<(Matrix, Vec<f64>), CliError> {
    let content = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (idx, line) in content.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: std::result::Result<Vec<f64>, _> =
            cells.iter().map(|c| c.parse::<f64>()).collect();
        match parsed {
            Ok(values) => {
                match width {
                    None => width = Some(values.len()),
                    Some(w) if w != values.len() => {
                        return Err(CliError::Parse {
                            line: line_no,
                            message: format!("expected {w} columns, found {}", values.len()),
                        })
                    }
                    _ => {}
                }
                if values.iter().any(|v| !v.is_finite()) {
                    return Err(CliError::Parse {
                        line: line_no,
                        message: "non-finite value".into(),
                    });
                }
                rows.push(values);
            }
            Err(_) => {
                // Only the very first row may be non-numeric (a header).
                if rows.is_empty() && width.is_none() && idx == 0 {
                    continue;
                }
                let bad = cells
                    .iter()
                    .find(|c| c.parse::<f64>().is_err())
                    .copied()
                    .unwrap_or("");
                return Err(CliError::Parse {
                    line: line_no,
                    message: format!("could not parse '{bad}' as a number"),
                });
            }
        }
    }
    if rows.is_empty() {
        return Err(CliError::Parse {
            line: 1,
            message: "no data rows".into(),
        });
    }
    let width = width.expect("rows imply width");
    if width < 2 {
        return Err(CliError::Parse {
            line: 1,
            message: "need at least one feature column and the target column".into(),
        });
    }
    let n = rows.len();
    let d = width - 1;
    let mut data = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for row in rows {
        data.extend_from_slice(&row[..d]);
        y.push(row[d]);
    }
    let x = DenseMatrix::new(n, d, data)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok((Matrix::Dense(x), y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_temp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn dense_generation_is_deterministic() {
        let (x1, y1) = generate_dense(6, 3, 42);
        let (x2, y2) = generate_dense(6, 3, 42);
        assert_eq!(x1.to_dense().data(), x2.to_dense().data());
        assert_eq!(y1, y2);
        let (x3, _) = generate_dense(6, 3, 43);
        assert_ne!(x1.to_dense().data(), x3.to_dense().data());
    }

    #[test]
    fn full_density_sparse_fills_every_entry() {
        let (x, y) = generate_sparse(5, 4, 1.0, 7);
        match &x {
            Matrix::Csr(m) => assert_eq!(m.nnz(), 20),
            _ => unreachable!(),
        }
        assert_eq!(y.len(), 5);
        assert!(y.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn sparse_density_is_roughly_respected() {
        let (x, _) = generate_sparse(200, 50, 0.25, 3);
        match &x {
            Matrix::Csr(m) => {
                let expected = 0.25 * 200.0 * 50.0;
                assert!((m.nnz() as f64 - expected).abs() < 0.05 * expected);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn csv_basic_and_header() {
        let f = write_temp("1,2,3\n4,5,6\n");
        let (x, y) = load_csv(f.path()).unwrap();
        assert_eq!(x.to_dense().data(), &[1.0, 2.0, 4.0, 5.0]);
        assert_eq!(y, vec![3.0, 6.0]);

        let f = write_temp("a,b,t\n1,2,3\n");
        let (x, y) = load_csv(f.path()).unwrap();
        assert_eq!(x.to_dense().data(), &[1.0, 2.0]);
        assert_eq!(y, vec![3.0]);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let f = write_temp("");
        assert!(matches!(load_csv(f.path()), Err(CliError::Parse { .. })));

        let f = write_temp("1,2,3\n4,5\n");
        match load_csv(f.path()) {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }

        let f = write_temp("1,2,3\n4,x,6\n");
        match load_csv(f.path()) {
            Err(CliError::Parse { line, message }) => {
                assert_eq!(line, 2);
                assert!(message.contains('x'));
            }
            other => panic!("{other:?}"),
        }
    }
}
