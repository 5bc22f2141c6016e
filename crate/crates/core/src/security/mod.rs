//! What Bob can learn: encrypted-state density matrices, Holevo quantities,
//! trace distances between plaintexts and the random-basis attack.

mod attack;
mod formulas;

pub use attack::{
    attack_asymptote, attack_mutual_information, attack_success, attack_success_limit, simulate_attack, AttackEstimate,
};
pub use formulas::{hidden_bits_linear_asymptotic, holevo_poincare_limit, qudit_hidden_info};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exec;
use crate::numerics::{hermitian_eig, ComplexMatrix, EIG_TOLERANCE};
use crate::polarization::{PlaintextString, Polarization, PolarizationKey};

/// Largest qubit count for explicit density matrices (dimension 256).
pub const MAX_QUBITS: usize = 8;

const KEYS_PER_CHUNK: usize = 2048;

/// Unit-trace, positive semidefinite operator on `m` polarization qubits.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Checks Hermiticity and unit trace (both to 1e-10).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.rows();
        if !matrix.is_square() || !dim.is_power_of_two() {
            return Err(Error::dims("2^m x 2^m matrix", format!("{}x{}", matrix.rows(), matrix.cols())));
        }
        let defect = matrix.hermitian_defect();
        if defect > EIG_TOLERANCE {
            return Err(Error::NotHermitian(defect));
        }
        let tr = matrix.trace();
        if (tr - 1.0).norm() > EIG_TOLERANCE {
            return Err(Error::OutOfRange(format!("density matrix trace {tr} != 1")));
        }
        Ok(Self { qubits: dim.trailing_zeros() as usize, matrix })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eig(&self.matrix)?.eigenvalues)
    }

    /// Von Neumann entropy in bits. Eigenvalues in `[−1e-10, 0)` count as 0.
    pub fn entropy(&self) -> Result<f64> {
        entropy_of_spectrum(&self.eigenvalues()?)
    }

    /// Weights `⟨a_V|ρ|a_V⟩` on the normalized symmetric states with `a`
    /// qubits in `|V⟩`, for `a = 0..=m`.
    pub fn symmetric_sector_weights(&self) -> Vec<f64> {
        let m = self.qubits;
        let mut weights = vec![0.0; m + 1];
        let dim = self.dim();
        for i in 0..dim {
            for j in 0..dim {
                let (wi, wj) = (i.count_ones(), j.count_ones());
                if wi == wj {
                    weights[wi as usize] += self.matrix[(i, j)].re;
                }
            }
        }
        for (a, w) in weights.iter_mut().enumerate() {
            *w /= binomial(m as u32, a as u32);
        }
        weights
    }

    /// Largest `|ρ_ij|` between basis states of different Hamming weight.
    pub fn cross_sector_coherence(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                if i.count_ones() != j.count_ones() {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }
}

pub(crate) fn entropy_of_spectrum(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &l in eigenvalues {
        if l < -EIG_TOLERANCE {
            return Err(Error::OutOfRange(format!("negative eigenvalue {l} in density matrix")));
        }
        if l > 0.0 {
            s -= l * l.log2();
        }
    }
    Ok(s)
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

/// The discrete set of keys Alice draws from uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KeyEnsemble {
    /// Real rotations by `kπ/d`, `k = 0..d`.
    Linear { d: u32 },
    /// Euler grid `α = 2πk1/d1`, `β = 2 asin √(k2/(d2−1))`, `γ = 2πk3/d3`.
    Poincare { d1: u32, d2: u32, d3: u32 },
}

impl KeyEnsemble {
    pub fn linear(d: u32) -> Result<Self> {
        if d == 0 {
            return Err(Error::OutOfRange("ensemble size d must be >= 1".into()));
        }
        Ok(Self::Linear { d })
    }

    pub fn poincare(d1: u32, d2: u32, d3: u32) -> Result<Self> {
        if d1 == 0 || d2 == 0 || d3 == 0 {
            return Err(Error::OutOfRange("ensemble sizes must be >= 1".into()));
        }
        Ok(Self::Poincare { d1, d2, d3 })
    }

    pub fn len(&self) -> usize {
        match *self {
            Self::Linear { d } => d as usize,
            Self::Poincare { d1, d2, d3 } => d1 as usize * d2 as usize * d3 as usize,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The `index`-th key, `index < len()`.
    pub fn key(&self, index: usize) -> PolarizationKey {
        match *self {
            Self::Linear { d } => PolarizationKey::linear(index as u32, d),
            Self::Poincare { d1, d2, d3 } => {
                let k3 = index % d3 as usize;
                let k2 = (index / d3 as usize) % d2 as usize;
                let k1 = index / (d2 as usize * d3 as usize);
                PolarizationKey::from_grid([k1 as u32, k2 as u32, k3 as u32], [d1, d2, d3])
            }
        }
        .expect("index within ensemble")
    }
}

impl fmt::Display for KeyEnsemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Linear { d } => write!(f, "linear:{d}"),
            Self::Poincare { d1, d2, d3 } => write!(f, "poincare:{d1},{d2},{d3}"),
        }
    }
}

impl FromStr for KeyEnsemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("ensemble \"{s}\": expected linear:D or poincare:D1,D2,D3"));
        let (kind, args) = s.trim().split_once(':').ok_or_else(bad)?;
        let nums = args.split(',').map(|t| t.trim().parse::<u32>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
        match (kind, nums.as_slice()) {
            ("linear", [d]) => Self::linear(*d),
            ("poincare", [d1, d2, d3]) => Self::poincare(*d1, *d2, *d3),
            _ => Err(bad()),
        }
    }
}

impl Serialize for KeyEnsemble {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// `ρ_x`: uniform mixture over the ensemble of `⊗_j R|P_{x,j}⟩⟨P_{x,j}|R†`.
pub fn encrypted_density(x: &PlaintextString, ensemble: &KeyEnsemble) -> Result<DensityMatrix> {
    let m = x.len();
    if m > MAX_QUBITS {
        return Err(Error::ResourceLimit(format!("{m} qubits exceeds the limit of {MAX_QUBITS}")));
    }
    let dim = 1usize << m;
    let total = ensemble.len();
    let chunks = total.div_ceil(KEYS_PER_CHUNK);
    let partials = exec::map_indexed(chunks, |c| {
        let mut acc = vec![Complex64::new(0.0, 0.0); dim * dim];
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        for index in c * KEYS_PER_CHUNK..((c + 1) * KEYS_PER_CHUNK).min(total) {
            let r = ensemble.key(index).rotation();
            let h = r.apply(&Polarization::horizontal());
            let vv = r.apply(&Polarization::vertical());
            product_state(x, &h, &vv, &mut v);
            for i in 0..dim {
                let vi = v[i];
                if vi == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let row = &mut acc[i * dim..(i + 1) * dim];
                for j in i..dim {
                    row[j] += vi * v[j].conj();
                }
            }
        }
        acc
    });
    let mut sum = vec![Complex64::new(0.0, 0.0); dim * dim];
    for p in partials {
        for (s, z) in sum.iter_mut().zip(p) {
            *s += z;
        }
    }
    let norm = 1.0 / total as f64;
    let matrix =
        ComplexMatrix::from_fn(
            dim,
            dim,
            |i, j| {
                if i <= j {
                    sum[i * dim + j] * norm
                } else {
                    sum[j * dim + i].conj() * norm
                }
            },
        );
    DensityMatrix::new(matrix)
}

/// Amplitudes of `⊗_j s_j` with `s_j = h` for bit 0 and `v` for bit 1;
/// qubit 1 is the most significant index bit.
fn product_state(x: &PlaintextString, h: &Polarization, v: &Polarization, out: &mut [Complex64]) {
    let m = x.len();
    for (idx, amp) in out.iter_mut().enumerate() {
        let mut a = Complex64::new(1.0, 0.0);
        for (j, &bit) in x.bits().iter().enumerate() {
            let s = if bit == 0 { h } else { v };
            a *= if (idx >> (m - 1 - j)) & 1 == 0 { s.h } else { s.v };
        }
        *amp = a;
    }
}

/// Holevo quantity in the reduced form `χ = m − S(ρ_0)`, which assumes
/// `S(ρ) = m` and `S(ρ_x) = S(ρ_0)` for every plaintext.
pub fn holevo(m: usize, ensemble: &KeyEnsemble) -> Result<f64> {
    let rho0 = encrypted_density(&PlaintextString::zeros(m), ensemble)?;
    Ok(m as f64 - rho0.entropy()?)
}

/// Holevo quantity from its definition: `S(ρ) − 2^{-m} Σ_x S(ρ_x)`.
///
/// Agrees with [`holevo`] for linear ensembles. For the Poincaré grid the
/// entropies `S(ρ_x)` differ between plaintexts and this value is lower.
pub fn holevo_explicit(m: usize, ensemble: &KeyEnsemble) -> Result<f64> {
    let count = 1usize << m;
    let mut avg: Option<ComplexMatrix> = None;
    let mut mean_entropy = 0.0;
    for x in 0..count {
        let rho = encrypted_density(&PlaintextString::from_index(x, m), ensemble)?;
        mean_entropy += rho.entropy()? / count as f64;
        let scaled = rho.matrix().scale((1.0 / count as f64).into());
        avg = Some(match avg {
            None => scaled,
            Some(a) => a.add(&scaled)?,
        });
    }
    let rho = DensityMatrix::new(avg.expect("at least one plaintext"))?;
    Ok(rho.entropy()? - mean_entropy)
}

/// `½ Σ |λ_i(ρ − σ)|`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::dims(rho.dim(), sigma.dim()));
    }
    let diff = rho.matrix().sub(sigma.matrix())?;
    let eig = hermitian_eig(&diff)?;
    Ok((0.5 * eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>()).clamp(0.0, 1.0))
}

/// Trace distance between `ρ_{0…0}` and `ρ_x` with the last `h` bits set,
/// for each Hamming distance `h = 1..=m`.
pub fn hamming_trace_distances(m: usize, ensemble: &KeyEnsemble) -> Result<Vec<(usize, f64)>> {
    let zero = encrypted_density(&PlaintextString::zeros(m), ensemble)?;
    (1..=m)
        .map(|h| {
            let x = PlaintextString::from_index((1usize << h) - 1, m);
            Ok((h, trace_distance(&zero, &encrypted_density(&x, ensemble)?)?))
        })
        .collect()
}

#[cfg(test)]
mod tests;
