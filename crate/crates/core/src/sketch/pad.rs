//! Zero-padding to a power-of-two order for the Hadamard sketch.

use crate::linalg::{CsrMatrix, DenseMatrix, Matrix};
use crate::problem::RidgeProblem;

/// Pads the system to order m' = 2^⌈log₂ m⌉ and returns it together with
/// the original order.
///
/// Off-block padding entries are zero; the padded diagonal entries are set
/// to one so the padded matrix stays nonsingular. With the padded right-hand
/// side entries at zero, the padded solution is exactly the original
/// solution followed by zeros, so restricting to the first m coordinates
/// recovers the original system's solution.
pub fn pad_to_power_of_two(problem: &RidgeProblem) -> (RidgeProblem, usize) {
    let m = problem.dim();
    let target = m.next_power_of_two();
    if target == m {
        return (problem.clone(), m);
    }
    let padded_a = match problem.a() {
        Matrix::Dense(a) => {
            let mut out = DenseMatrix::zeros(target, target);
            for i in 0..m {
                out.row_mut(i)[..m].copy_from_slice(a.row(i));
            }
            for i in m..target {
                out.set(i, i, 1.0);
            }
            Matrix::Dense(out)
        }
        Matrix::Csr(a) => {
            let mut row_offsets = Vec::with_capacity(target + 1);
            let mut col_indices = Vec::with_capacity(a.nnz() + (target - m));
            let mut values = Vec::with_capacity(a.nnz() + (target - m));
            row_offsets.push(0);
            for i in 0..m {
                let (cols, vals) = a.row(i);
                col_indices.extend_from_slice(cols);
                values.extend_from_slice(vals);
                row_offsets.push(values.len());
            }
            for i in m..target {
                col_indices.push(i);
                values.push(1.0);
                row_offsets.push(values.len());
            }
            Matrix::Csr(
                CsrMatrix::new(target, target, row_offsets, col_indices, values)
                    .expect("padding preserves CSR validity"),
            )
        }
    };
    let mut padded_b = problem.b().to_vec();
    padded_b.resize(target, 0.0);
    (problem.with_replaced_system(padded_a, padded_b), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem;

    fn toy_problem(m: usize, sparse: bool) -> RidgeProblem {
        let mut a = DenseMatrix::from_fn(m, m, |i, j| if i == j { 2.0 } else { 0.1 });
        a.symmetrize();
        let b: Vec<f64> = (0..m).map(|i| 1.0 + i as f64).collect();
        let a = if sparse {
            Matrix::Csr(CsrMatrix::from_dense(&a))
        } else {
            Matrix::Dense(a)
        };
        problem::RidgeProblem::from_system(a, b).unwrap()
    }

    #[test]
    fn power_of_two_is_a_no_op() {
        let p = toy_problem(4, false);
        let (padded, orig) = pad_to_power_of_two(&p);
        assert_eq!(orig, 4);
        assert_eq!(padded.dim(), 4);
        assert_eq!(padded.b(), p.b());
    }

    #[test]
    fn pads_to_next_power() {
        let p = toy_problem(5, false);
        let (padded, orig) = pad_to_power_of_two(&p);
        assert_eq!(orig, 5);
        assert_eq!(padded.dim(), 8);
        for i in 5..8 {
            assert_eq!(padded.b()[i], 0.0);
            assert_eq!(padded.a().get(i, i), 1.0);
            for j in 0..5 {
                assert_eq!(padded.a().get(i, j), 0.0);
                assert_eq!(padded.a().get(j, i), 0.0);
            }
        }
    }

    #[test]
    fn worst_case_doubles_the_order() {
        for q in [2usize, 3, 4] {
            let m = (1 << q) + 1;
            let p = toy_problem(m, true);
            let (padded, _) = pad_to_power_of_two(&p);
            assert_eq!(padded.dim(), 1 << (q + 1));
        }
    }

    #[test]
    fn padded_solution_restricts_to_original() {
        let p = toy_problem(6, false);
        let (padded, orig) = pad_to_power_of_two(&p);
        let full = crate::solvers::solve_direct(&padded).unwrap();
        let restricted = crate::solvers::solve_direct(&p).unwrap();
        for i in 0..orig {
            assert!((full[i] - restricted[i]).abs() < 1e-10);
        }
        for &v in &full[orig..] {
            assert!(v.abs() < 1e-12);
        }
    }
}
