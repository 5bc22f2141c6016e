//! Multi-photon quantum walks on a path unitary.
//!
//! Convention: `U[(j, i)]` is the amplitude from input mode `i` to output
//! mode `j` (columns are inputs).

mod distribution;
mod protocol;

pub use distribution::{bhattacharyya_fidelity, Distribution};
pub use protocol::{
    decode_output, encrypted_marginals, protocol_distribution, run_protocol, EncryptedMarginals, NoiseModel,
    ProtocolRun,
};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec;
use crate::numerics::{permanent, ComplexMatrix};
use crate::polarization::PlaintextString;

/// Unitarity tolerance for path unitaries.
pub const UNITARY_TOL: f64 = 1e-8;

/// Largest walker number accepted by [`output_distribution`].
pub const MAX_WALKERS: u32 = 6;

/// Photon counts per spatial mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation(Vec<u32>);

impl Occupation {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Encoding("occupation needs at least one mode".into()));
        }
        Ok(Self(counts))
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn photons(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_collision_free(&self) -> bool {
        self.0.iter().all(|&c| c <= 1)
    }

    /// Mode indices with each mode repeated by its photon count.
    pub fn mode_list(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(i, &c)| std::iter::repeat_n(i, c as usize)).collect()
    }

    pub fn factorial_product(&self) -> f64 {
        self.0.iter().map(|&c| (1..=c).map(f64::from).product::<f64>()).product()
    }

    /// Walker occupation of a plaintext: one walker wherever the bit is 0.
    pub fn walkers_of(plaintext: &PlaintextString) -> Self {
        Self(plaintext.bits().iter().map(|&b| u32::from(b == 0)).collect())
    }

    /// Dummy occupation of a plaintext: one dummy wherever the bit is 1.
    pub fn dummies_of(plaintext: &PlaintextString) -> Self {
        Self(plaintext.bits().iter().map(|&b| u32::from(b == 1)).collect())
    }

    /// All occupations of `m` modes by `n` photons.
    pub fn enumerate(m: usize, n: u32) -> Vec<Occupation> {
        fn rec(m: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Occupation>) {
            if prefix.len() + 1 == m {
                prefix.push(left);
                out.push(Occupation(prefix.clone()));
                prefix.pop();
                return;
            }
            for c in (0..=left).rev() {
                prefix.push(c);
                rec(m, left - c, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(m.max(1), n, &mut Vec::with_capacity(m), &mut out);
        out
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for Occupation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        let counts = inner
            .split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|e| Error::Parse(format!("occupation \"{s}\": {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(counts)
    }
}

/// Dual-rail encoding: walker → bit 0 (`|H⟩`), empty mode → bit 1 (`|V⟩` dummy).
pub fn encode_input(occupation: &Occupation) -> Result<PlaintextString> {
    if let Some((mode, &c)) = occupation.counts().iter().enumerate().find(|(_, &c)| c > 1) {
        return Err(Error::Encoding(format!(
            "mode {} holds {c} photons; the polarization encoding carries one photon per input mode",
            mode + 1
        )));
    }
    PlaintextString::new(occupation.counts().iter().map(|&c| u8::from(c == 0)).collect())
}

/// Exact output distribution of indistinguishable photons,
/// `P(S→T) = |Per(U_{T,S})|² / (Π s_i! Π t_j!)`.
pub fn output_distribution(u: &ComplexMatrix, input: &Occupation) -> Result<Distribution<Occupation>> {
    check_walk(u, input)?;
    if input.photons() > MAX_WALKERS {
        return Err(Error::ResourceLimit(format!("{} walkers exceeds the limit of {MAX_WALKERS}", input.photons())));
    }
    Ok(multiphoton_distribution(u, input, |m| permanent(m).map(|p| p.norm_sqr()), true))
}

/// Output distribution of fully distinguishable photons,
/// `P(S→T) = Per(|U_{T,S}|²) / Π t_j!`.
pub fn distinguishable_distribution(u: &ComplexMatrix, input: &Occupation) -> Result<Distribution<Occupation>> {
    check_walk(u, input)?;
    if input.photons() > MAX_WALKERS {
        return Err(Error::ResourceLimit(format!("{} walkers exceeds the limit of {MAX_WALKERS}", input.photons())));
    }
    Ok(multiphoton_distribution(u, input, |m| permanent(&m.abs_squared()).map(|p| p.re), false))
}

fn check_walk(u: &ComplexMatrix, input: &Occupation) -> Result<()> {
    if !u.is_square() {
        return Err(Error::dims("square unitary", format!("{}x{}", u.rows(), u.cols())));
    }
    if input.modes() != u.rows() {
        return Err(Error::dims(format!("{} modes", u.rows()), format!("{} modes", input.modes())));
    }
    u.ensure_unitary(UNITARY_TOL)
}

pub(crate) fn multiphoton_distribution(
    u: &ComplexMatrix,
    input: &Occupation,
    weight: impl Fn(&ComplexMatrix) -> Result<f64> + Sync,
    divide_input_factorials: bool,
) -> Distribution<Occupation> {
    let m = u.rows();
    let n = input.photons();
    if n == 0 {
        return Distribution::from_entries([(Occupation(vec![0; m]), 1.0)]);
    }
    let cols = input.mode_list();
    let s_fact = if divide_input_factorials { input.factorial_product() } else { 1.0 };
    let outcomes = Occupation::enumerate(m, n);
    let probs = exec::map_indexed(outcomes.len(), |k| {
        let out = &outcomes[k];
        let sub = u.select(&out.mode_list(), &cols);
        // permanent dimension is bounded by the walker-count checks above
        let w = weight(&sub).expect("square submatrix");
        w / (s_fact * out.factorial_product())
    });
    Distribution::from_entries(outcomes.into_iter().zip(probs))
}

#[cfg(test)]
mod tests;
