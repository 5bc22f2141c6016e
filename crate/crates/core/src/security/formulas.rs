use crate::error::{Error, Result};

/// Holevo quantity for Haar-random keys in the large-grid limit,
/// `m − log2(m + 1)`: the encrypted all-zero string is uniformly mixed over
/// the `m + 1` symmetric states.
pub fn holevo_poincare_limit(m: u32) -> f64 {
    f64::from(m) - f64::from(m + 1).log2()
}

/// Entropy of the encrypted all-zero string for linear keys at large `m`,
/// `½ log2(π e m / 2)`.
pub fn hidden_bits_linear_asymptotic(m: f64) -> f64 {
    0.5 * (std::f64::consts::PI * std::f64::consts::E * m / 2.0).log2()
}

/// Hidden information when each photon carries an `a`-level system instead of
/// polarization: `m log2(a/m) + m / ln 2`.
pub fn qudit_hidden_info(a: u32, m: u32) -> Result<f64> {
    if m == 0 || a < m {
        return Err(Error::OutOfRange(format!("qudit formula requires a >= m >= 1, got a={a}, m={m}")));
    }
    let (a, m) = (f64::from(a), f64::from(m));
    Ok(m * (a / m).log2() + m / std::f64::consts::LN_2)
}
