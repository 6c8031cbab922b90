//! Fast Walsh-Hadamard transform.

use crate::error::{Error, Result};

/// In-place Walsh-Hadamard transform of a length 2^q slice, unnormalized:
/// the input is replaced by `H v` for the order-2^q Hadamard matrix built by
/// doubling. Cost O(m log m) via the usual butterfly.
pub fn fwht_in_place(v: &mut [f64]) -> Result<()> {
    let n = v.len();
    if n == 0 || !n.is_power_of_two() {
        return Err(Error::invalid(format!(
            "fwht: length {} is not a power of two",
            n
        )));
    }
    let mut h = 1;
    while h < n {
        let mut block = 0;
        while block < n {
            for i in block..block + h {
                let a = v[i];
                let b = v[i + h];
                v[i] = a + b;
                v[i + h] = a - b;
            }
            block += 2 * h;
        }
        h *= 2;
    }
    Ok(())
}

/// Out-of-place variant of [`fwht_in_place`].
pub fn fwht(v: &[f64]) -> Result<Vec<f64>> {
    let mut out = v.to_vec();
    fwht_in_place(&mut out)?;
    Ok(out)
}

/// Entry (i, j) of the order-m Hadamard matrix: (-1)^popcount(i & j).
/// Matches the doubling construction used by the transform.
#[inline]
pub fn hadamard_entry(i: usize, j: usize) -> f64 {
    if (i & j).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}
