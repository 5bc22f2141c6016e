use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Error, Result};

/// Largest matrix dimension accepted by [`permanent`].
pub const MAX_PERMANENT_DIM: usize = 24;

/// Matrix permanent by Ryser's formula, visiting column subsets in Gray-code
/// order so each step updates the row sums with a single column: O(2^n · n).
pub fn permanent(m: &ComplexMatrix) -> Result<Complex64> {
    let n = check_square(m)?;
    if n > MAX_PERMANENT_DIM {
        return Err(Error::ResourceLimit(format!(
            "permanent of a {n}x{n} matrix exceeds the {MAX_PERMANENT_DIM}x{MAX_PERMANENT_DIM} limit"
        )));
    }
    Ok(ryser_gray(m, n))
}

fn ryser_gray(m: &ComplexMatrix, n: usize) -> Complex64 {
    match n {
        1 => return m[(0, 0)],
        2 => return m[(0, 0)] * m[(1, 1)] + m[(0, 1)] * m[(1, 0)],
        _ => {}
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut row_sums = vec![zero; n];
    let mut total = zero;
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let bit = k.trailing_zeros() as usize;
        gray ^= 1 << bit;
        if gray & (1 << bit) != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += m[(i, bit)];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= m[(i, bit)];
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// Permanent by direct expansion over all n! permutations.
///
/// Exponentially slower than [`permanent`]; kept as an independent reference
/// for small matrices (n ≤ 10).
pub fn permanent_by_expansion(m: &ComplexMatrix) -> Result<Complex64> {
    let n = check_square(m)?;
    if n > 10 {
        return Err(Error::ResourceLimit(format!("expansion permanent limited to n <= 10, got {n}")));
    }
    let mut used = vec![false; n];
    Ok(expand(m, 0, &mut used))
}

fn expand(m: &ComplexMatrix, row: usize, used: &mut [bool]) -> Complex64 {
    let n = used.len();
    if row == n {
        return Complex64::new(1.0, 0.0);
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for col in 0..n {
        if !used[col] {
            used[col] = true;
            acc += m[(row, col)] * expand(m, row + 1, used);
            used[col] = false;
        }
    }
    acc
}

fn check_square(m: &ComplexMatrix) -> Result<usize> {
    if !m.is_square() {
        return Err(Error::dims("square matrix", format!("{}x{}", m.rows(), m.cols())));
    }
    Ok(m.rows())
}
