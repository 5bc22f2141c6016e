use super::{hermitian_eig, ComplexMatrix};
use crate::error::{Error, Result};

/// Unitary factor of the polar decomposition `M = U P`, i.e. the unitary
/// closest to `M` in Frobenius norm: `U = M (M†M)^{-1/2}`.
pub fn unitarize(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::dims("square matrix", format!("{}x{}", m.rows(), m.cols())));
    }
    let n = m.rows();
    let gram = ComplexMatrix::from_fn(n, n, |i, j| (0..n).map(|k| m[(k, i)].conj() * m[(k, j)]).sum());
    // exact Hermitian symmetry
    let gram = ComplexMatrix::from_fn(n, n, |i, j| if i <= j { gram[(i, j)] } else { gram[(j, i)].conj() });
    let eig = hermitian_eig(&gram)?;
    let largest = eig.eigenvalues.last().copied().unwrap_or(0.0);
    let smallest = eig.eigenvalues[0];
    if largest <= 0.0 || smallest <= 1e-24 * largest.max(1.0) || smallest <= largest * 1e-16 {
        return Err(Error::Singular);
    }
    let inv_sqrt = eig.apply_fn(|l| 1.0 / l.sqrt());
    let mut u = m.matmul(&inv_sqrt)?;
    // Newton–Schulz polish for the last few ulps
    for _ in 0..2 {
        let defect = u.unitarity_defect();
        if defect <= 1e-14 {
            break;
        }
        u = newton_polish(&u)?;
    }
    Ok(u)
}

/// Newton–Schulz step `U (3I − U†U) / 2`, valid when `U` is already close to unitary.
fn newton_polish(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = u.rows();
    let g = u.adjoint().matmul(u)?;
    let corr = ComplexMatrix::from_fn(n, n, |i, j| {
        let id = if i == j { 3.0 } else { 0.0 };
        (-g[(i, j)] + id) * 0.5
    });
    u.matmul(&corr)
}
