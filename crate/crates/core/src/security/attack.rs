//! Bob's random-basis attack: he measures every photon in `{H, V}` and
//! guesses that the outcome is the plaintext.

use std::f64::consts::PI;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::polarization::{encrypt, measure_in_key_basis, PlaintextString, PolarizationKey};
use crate::rng::RandomSource;

const TRIALS_PER_BATCH: u64 = 65_536;
const MAX_HISTOGRAM_QUBITS: usize = 16;

/// Exact success probability `(1/d) Σ_j cos^{2m}(jπ/d)`.
pub fn attack_success(m: u32, d: u32) -> Result<f64> {
    if m == 0 || d == 0 {
        return Err(Error::OutOfRange(format!("attack requires m, d >= 1, got m={m}, d={d}")));
    }
    let sum: f64 = (0..d)
        .map(|j| {
            let c = (f64::from(j) * PI / f64::from(d)).cos();
            (c * c).powf(f64::from(m))
        })
        .sum();
    Ok(sum / f64::from(d))
}

/// `d → ∞` limit of [`attack_success`]: the mean of `cos^{2m}` over a
/// half-turn, `C(2m, m) / 4^m`.
pub fn attack_success_limit(m: u32) -> f64 {
    (1..=m).map(|k| (2.0 * f64::from(k) - 1.0) / (2.0 * f64::from(k))).product()
}

/// Large-`m` approximation `1/√(πm)`.
pub fn attack_asymptote(m: f64) -> Result<f64> {
    if m <= 0.0 || !m.is_finite() {
        return Err(Error::OutOfRange(format!("asymptote requires m > 0, got {m}")));
    }
    Ok(1.0 / (PI * m).sqrt())
}

/// Exact mutual information between a uniform plaintext and Bob's outcome.
///
/// The outcome is `x ⊕ e` with an error pattern `e` independent of `x`, so
/// `I = m − H(e)`.
pub fn attack_mutual_information(m: u32, d: u32) -> Result<f64> {
    if m == 0 || d == 0 || m as usize > MAX_HISTOGRAM_QUBITS {
        return Err(Error::OutOfRange(format!("mutual information needs 1 <= m <= {MAX_HISTOGRAM_QUBITS}, d >= 1")));
    }
    // P(e) depends only on the weight w of e.
    let mut h = 0.0;
    for w in 0..=m {
        let p: f64 = (0..d)
            .map(|k| {
                let t = f64::from(k) * PI / f64::from(d);
                let (c2, s2) = (t.cos().powi(2), t.sin().powi(2));
                c2.powi((m - w) as i32) * s2.powi(w as i32)
            })
            .sum::<f64>()
            / f64::from(d);
        if p > 0.0 {
            h -= super::binomial(m, w) * p * p.log2();
        }
    }
    Ok(f64::from(m) - h)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttackEstimate {
    pub m: usize,
    pub d: u32,
    pub trials: u64,
    pub successes: u64,
    pub p: f64,
    /// Binomial standard error `√(p(1−p)/trials)` of the estimate.
    pub stderr: f64,
    /// Counts of each error pattern `outcome ⊕ plaintext` (empty for m > 16).
    #[serde(skip)]
    pub error_patterns: Vec<u64>,
}

impl AttackEstimate {
    /// Plug-in estimate `m − H(ê)` of the mutual information per trial.
    pub fn mutual_information(&self) -> Option<f64> {
        if self.error_patterns.is_empty() {
            return None;
        }
        let n = self.trials as f64;
        let h: f64 = self
            .error_patterns
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.log2()
            })
            .sum();
        Some(self.m as f64 - h)
    }
}

/// Monte Carlo of the attack: draw a linear key, encrypt, measure every
/// qubit in `{H, V}`, count exact matches with the plaintext.
pub fn simulate_attack(
    d: u32,
    plaintext: &PlaintextString,
    trials: u64,
    source: &RandomSource,
) -> Result<AttackEstimate> {
    if d == 0 || trials == 0 {
        return Err(Error::OutOfRange("attack simulation needs d >= 1 and trials >= 1".into()));
    }
    let m = plaintext.len();
    let keys: Vec<PolarizationKey> = (0..d).map(|k| PolarizationKey::linear(k, d)).collect::<Result<_>>()?;
    let bob = PolarizationKey::identity();
    let patterns = if m <= MAX_HISTOGRAM_QUBITS { 1usize << m } else { 0 };
    let target = plaintext.bits();

    let batches = exec::map_batches(trials, TRIALS_PER_BATCH, |b, len| {
        let mut rng = source.stream(b);
        let mut hist = vec![0u64; patterns];
        let mut successes = 0u64;
        for _ in 0..len {
            let key = &keys[rng.random_range(0..d) as usize];
            let mut pattern = 0usize;
            let mut ok = true;
            for (state, &bit) in encrypt(plaintext, key).iter().zip(target) {
                let flipped = measure_in_key_basis(state, &bob, &mut rng) != bit;
                ok &= !flipped;
                pattern = (pattern << 1) | usize::from(flipped);
            }
            successes += u64::from(ok);
            if patterns > 0 {
                hist[pattern] += 1;
            }
        }
        (successes, hist)
    });

    let mut successes = 0;
    let mut error_patterns = vec![0u64; patterns];
    for (s, hist) in batches {
        successes += s;
        for (acc, c) in error_patterns.iter_mut().zip(hist) {
            *acc += c;
        }
    }
    let p = successes as f64 / trials as f64;
    Ok(AttackEstimate { m, d, trials, successes, p, stderr: (p * (1.0 - p) / trials as f64).sqrt(), error_patterns })
}
