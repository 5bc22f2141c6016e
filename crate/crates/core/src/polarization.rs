//! Polarization qubits, SU(2) encryption keys and the encrypt/measure maps.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;

const NORM_TOL: f64 = 1e-12;

/// Jones vector in the `{|H⟩, |V⟩}` basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarization {
    pub h: Complex64,
    pub v: Complex64,
}

impl Polarization {
    pub fn new(h: Complex64, v: Complex64) -> Result<Self> {
        let norm = h.norm_sqr() + v.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::OutOfRange(format!("Jones vector norm² {norm} != 1")));
        }
        Ok(Self { h, v })
    }

    pub fn horizontal() -> Self {
        Self { h: 1.0.into(), v: 0.0.into() }
    }

    pub fn vertical() -> Self {
        Self { h: 0.0.into(), v: 1.0.into() }
    }

    pub fn diagonal() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { h: s.into(), v: s.into() }
    }

    pub fn antidiagonal() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { h: s.into(), v: (-s).into() }
    }

    /// `|H⟩` for bit 0, `|V⟩` for bit 1.
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            Self::horizontal()
        } else {
            Self::vertical()
        }
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.h.conj() * other.h + self.v.conj() * other.v
    }

    /// Equality up to a global phase.
    pub fn same_ray(&self, other: &Self, tol: f64) -> bool {
        (self.inner(other).norm() - 1.0).abs() <= tol
    }
}

/// 2×2 special unitary acting on one polarization qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Su2(pub [[Complex64; 2]; 2]);

impl Su2 {
    pub fn apply(&self, p: &Polarization) -> Polarization {
        let m = &self.0;
        Polarization { h: m[0][0] * p.h + m[0][1] * p.v, v: m[1][0] * p.h + m[1][1] * p.v }
    }

    pub fn adjoint(&self) -> Su2 {
        let m = &self.0;
        Su2([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    pub fn determinant(&self) -> Complex64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(2, 2, |i, j| self.0[i][j])
    }
}

/// Index of a linear key inside its ensemble: rotation by `kπ/d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearTag {
    pub k: u32,
    pub d: u32,
}

/// Euler angles `(α, β, γ)` of the rotation `R_z(α) R_y(β) R_z(γ)`.
///
/// Linear keys are carried with their `(k, d)` tag so ensembles of linear
/// rotations stay distinguishable from general Poincaré-sphere keys.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarizationKey {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub linear: Option<LinearTag>,
}

impl PolarizationKey {
    pub fn identity() -> Self {
        Self { alpha: 0.0, beta: 0.0, gamma: 0.0, linear: None }
    }

    pub fn euler(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let in_turn = |x: f64| (0.0..2.0 * PI).contains(&x);
        if !in_turn(alpha) || !in_turn(gamma) || !(0.0..=PI).contains(&beta) {
            return Err(Error::OutOfRange(format!(
                "Euler angles ({alpha}, {beta}, {gamma}) outside [0,2π)×[0,π]×[0,2π)"
            )));
        }
        Ok(Self { alpha, beta, gamma, linear: None })
    }

    /// Real rotation by `kπ/d` in the H–V plane (`|H⟩ → cos θ|H⟩ + sin θ|V⟩`).
    pub fn linear(k: u32, d: u32) -> Result<Self> {
        if d == 0 || k >= d {
            return Err(Error::OutOfRange(format!("linear key requires 0 <= k < d, got k={k}, d={d}")));
        }
        let theta = k as f64 * PI / d as f64;
        // θ ≤ π/2: R_y(2θ). θ > π/2: R_z(π)R_y(2(π−θ))R_z(π) = R(θ) exactly.
        let (alpha, beta, gamma) = if 2 * k <= d { (0.0, 2.0 * theta, 0.0) } else { (PI, 2.0 * (PI - theta), PI) };
        Ok(Self { alpha, beta, gamma, linear: Some(LinearTag { k, d }) })
    }

    /// Key from grid indices `k_i ∈ [0, d_i)`: `α = 2πk1/d1`, `γ = 2πk3/d3`,
    /// `β = 2 asin √ξ` with `ξ = k2/(d2−1)` (and `ξ = 0` when `d2 = 1`).
    pub fn from_grid(k: [u32; 3], d: [u32; 3]) -> Result<Self> {
        if d.contains(&0) || k.iter().zip(&d).any(|(a, b)| a >= b) {
            return Err(Error::OutOfRange(format!("grid key requires 0 <= k_i < d_i, got {k:?} / {d:?}")));
        }
        let xi = if d[1] == 1 { 0.0 } else { k[1] as f64 / (d[1] - 1) as f64 };
        let alpha = 2.0 * PI * k[0] as f64 / d[0] as f64;
        let gamma = 2.0 * PI * k[2] as f64 / d[2] as f64;
        let beta = 2.0 * xi.sqrt().asin();
        Self::euler(alpha, beta.min(PI), gamma)
    }

    pub fn rotation(&self) -> Su2 {
        let (sa, sb) = ((self.alpha + self.gamma) / 2.0, (self.alpha - self.gamma) / 2.0);
        let c = (self.beta / 2.0).cos();
        let s = (self.beta / 2.0).sin();
        let e = |phi: f64| Complex64::from_polar(1.0, phi);
        Su2([[e(-sa) * c, -e(-sb) * s], [e(sb) * s, e(sa) * c]])
    }

    pub fn rotation_matrix(&self) -> ComplexMatrix {
        self.rotation().to_matrix()
    }
}

impl fmt::Display for PolarizationKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.linear {
            Some(LinearTag { k, d }) => write!(f, "linear:{k}/{d}"),
            None => write!(f, "euler:{},{},{}", self.alpha, self.beta, self.gamma),
        }
    }
}

impl FromStr for PolarizationKey {
    type Err = Error;

    /// Parses `linear:k/d` or `euler:α,β,γ` (the [`Display`](fmt::Display) forms).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("key \"{s}\": expected linear:k/d or euler:a,b,c"));
        let (kind, rest) = s.trim().split_once(':').ok_or_else(bad)?;
        match kind {
            "linear" => {
                let (k, d) = rest.split_once('/').ok_or_else(bad)?;
                Self::linear(k.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?)
            }
            "euler" => {
                let angles =
                    rest.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
                let [a, b, c] = angles[..] else { return Err(bad()) };
                Self::euler(a, b, c)
            }
            _ => Err(bad()),
        }
    }
}

/// Uniformly samples grid indices and returns the corresponding key.
pub fn sample_haar_key<R: Rng + ?Sized>(rng: &mut R, d1: u32, d2: u32, d3: u32) -> Result<PolarizationKey> {
    if d1 == 0 || d2 == 0 || d3 == 0 {
        return Err(Error::OutOfRange("grid sizes must be >= 1".into()));
    }
    let k = [rng.random_range(0..d1), rng.random_range(0..d2), rng.random_range(0..d3)];
    PolarizationKey::from_grid(k, [d1, d2, d3])
}

pub fn linear_key(k: u32, d: u32) -> Result<PolarizationKey> {
    PolarizationKey::linear(k, d)
}

/// Alice's logical bit-string; bit 0 is sent as `|H⟩`, bit 1 as `|V⟩`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaintextString(Vec<u8>);

impl PlaintextString {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::Encoding("plaintext must have at least one bit".into()));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Encoding("plaintext bits must be 0 or 1".into()));
        }
        Ok(Self(bits))
    }

    pub fn zeros(m: usize) -> Self {
        Self(vec![0; m.max(1)])
    }

    /// The `m`-bit string of `value`, most significant bit first.
    pub fn from_index(value: usize, m: usize) -> Self {
        Self((0..m).map(|j| ((value >> (m - 1 - j)) & 1) as u8).collect())
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn hamming_distance(&self, other: &Self) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl FromStr for PlaintextString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse(format!("invalid bit '{other}' in \"{s}\""))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Self::new(bits)
    }
}

impl fmt::Display for PlaintextString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// `R(key)|H⟩` where the bit is 0, `R(key)|V⟩` where it is 1.
pub fn encrypt(plaintext: &PlaintextString, key: &PolarizationKey) -> Vec<Polarization> {
    let r = key.rotation();
    plaintext.bits().iter().map(|&b| r.apply(&Polarization::from_bit(b))).collect()
}

/// Probability of outcome 0, `|⟨H|R(key)†|state⟩|²`.
pub fn projection_probability(state: &Polarization, key: &PolarizationKey) -> f64 {
    key.rotation().adjoint().apply(state).h.norm_sqr().clamp(0.0, 1.0)
}

/// Projective measurement in the `{R|H⟩, R|V⟩}` basis.
pub fn measure_in_key_basis<R: Rng + ?Sized>(state: &Polarization, key: &PolarizationKey, rng: &mut R) -> u8 {
    let p0 = projection_probability(state, key);
    if rng.random::<f64>() < p0 {
        0
    } else {
        1
    }
}

/// Alice's decryption: measures every qubit in her key basis.
pub fn decrypt<R: Rng + ?Sized>(states: &[Polarization], key: &PolarizationKey, rng: &mut R) -> PlaintextString {
    PlaintextString(states.iter().map(|s| measure_in_key_basis(s, key, rng)).collect())
}
