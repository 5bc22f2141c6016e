//! End-to-end encrypted walk: encrypt, evolve, decrypt, sample.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_walk, distinguishable_distribution, multiphoton_distribution, Distribution, Occupation};
use crate::error::{Error, Result};
use crate::exec;
use crate::numerics::{permanent, ComplexMatrix};
use crate::polarization::{PlaintextString, PolarizationKey};
use crate::rng::RandomSource;

const SHOTS_PER_BATCH: u64 = 16_384;

/// Largest mode count for the polarization-resolved calculation.
pub const MAX_PROTOCOL_MODES: usize = 10;

/// Phenomenological source imperfections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Two-photon interference visibility; 1 = perfectly indistinguishable.
    pub hom_visibility: f64,
    /// Per-shot probability of a spurious, uniformly random outcome.
    pub higher_order_rate: f64,
}

impl NoiseModel {
    pub fn new(hom_visibility: f64, higher_order_rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&hom_visibility) || !(0.0..=1.0).contains(&higher_order_rate) {
            return Err(Error::OutOfRange(format!(
                "noise parameters must lie in [0,1], got V={hom_visibility}, rate={higher_order_rate}"
            )));
        }
        Ok(Self { hom_visibility, higher_order_rate })
    }
}

/// Decrypted photon statistics of one protocol round.
#[derive(Debug, Clone)]
pub struct EncryptedMarginals {
    /// Photons found in Alice's `|H⟩` channel after decryption, per output mode.
    pub walker: Distribution<Occupation>,
    /// Photons found in the `|V⟩` channel.
    pub dummy: Distribution<Occupation>,
}

/// Exact output statistics of the encrypted protocol.
///
/// Works on `2m` modes (path ⊗ polarization): Alice's key acts as `I ⊗ R`, the
/// chip as `U ⊗ I`, and decryption as `I ⊗ R†`. All `m` photons (walkers and
/// dummies) are propagated together by permanents of the composed `2m × 2m`
/// matrix, and the result is marginalized onto the two polarization channels.
pub fn encrypted_marginals(
    u: &ComplexMatrix,
    plaintext: &PlaintextString,
    key: &PolarizationKey,
) -> Result<EncryptedMarginals> {
    let m = u.rows();
    check_walk(u, &Occupation::walkers_of(plaintext))?;
    if m > MAX_PROTOCOL_MODES {
        return Err(Error::ResourceLimit(format!(
            "protocol simulation limited to {MAX_PROTOCOL_MODES} modes, got {m}"
        )));
    }
    let rot = key.rotation().to_matrix();
    let path = ComplexMatrix::identity(m);
    let chip = u.kron(&ComplexMatrix::identity(2));
    let encrypt = path.kron(&rot);
    let decrypt = path.kron(&rot.adjoint());
    let total = decrypt.matmul(&chip)?.matmul(&encrypt)?;

    let mut input = vec![0u32; 2 * m];
    for (j, &bit) in plaintext.bits().iter().enumerate() {
        input[2 * j + bit as usize] += 1;
    }
    let input = Occupation(input);
    let joint = multiphoton_distribution(&total, &input, |s| permanent(s).map(|p| p.norm_sqr()), true);
    let split =
        |channel: usize| joint.map_keys(|occ| Occupation((0..m).map(|j| occ.counts()[2 * j + channel]).collect()));
    Ok(EncryptedMarginals { walker: split(0), dummy: split(1) })
}

/// Exact walker-occupation distribution Alice records for this key.
pub fn protocol_distribution(
    u: &ComplexMatrix,
    plaintext: &PlaintextString,
    key: &PolarizationKey,
) -> Result<Distribution<Occupation>> {
    Ok(encrypted_marginals(u, plaintext, key)?.walker)
}

/// Logical bit-string of a collision-free walker occupation
/// (walker → 0, empty → 1); `None` for collision outcomes.
pub fn decode_output(walkers: &Occupation) -> Option<PlaintextString> {
    if !walkers.is_collision_free() {
        return None;
    }
    PlaintextString::new(walkers.counts().iter().map(|&c| u8::from(c == 0)).collect()).ok()
}

/// Tallies of a sampled protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolRun {
    pub shots: u64,
    /// Walker occupations, including collision outcomes.
    pub occupations: BTreeMap<Occupation, u64>,
    /// Collision-free outcomes as logical bit-strings.
    pub logical: BTreeMap<PlaintextString, u64>,
    /// Shots with more than one walker in some output mode.
    pub collisions: u64,
}

impl ProtocolRun {
    pub fn empirical(&self) -> Distribution<Occupation> {
        Distribution::from_counts(&self.occupations)
    }

    /// Post-selected distribution over collision-free logical outcomes.
    pub fn logical_distribution(&self) -> Distribution<PlaintextString> {
        Distribution::from_counts(&self.logical)
    }
}

/// Samples `shots` rounds of the encrypted walk.
///
/// Each shot draws the walker occupation and, independently, the dummy
/// occupation from the decrypted marginals; only the walkers are recorded.
/// With a noise model, the walker law is `V·P_ind + (1−V)·P_dist` and each
/// shot is replaced by a uniformly random occupation with probability
/// `higher_order_rate`.
pub fn run_protocol(
    u: &ComplexMatrix,
    plaintext: &PlaintextString,
    key: &PolarizationKey,
    shots: u64,
    source: &RandomSource,
    noise: Option<&NoiseModel>,
) -> Result<ProtocolRun> {
    if plaintext.len() != u.rows() {
        return Err(Error::dims(format!("{}-bit plaintext", u.rows()), format!("{} bits", plaintext.len())));
    }
    if shots == 0 {
        return Err(Error::OutOfRange("shots must be >= 1".into()));
    }
    let marginals = encrypted_marginals(u, plaintext, key)?;
    let walkers_in = Occupation::walkers_of(plaintext);
    let walker_law = match noise {
        Some(nm) if nm.hom_visibility < 1.0 => {
            let dist = distinguishable_distribution(u, &walkers_in)?;
            marginals.walker.mix(&dist, nm.hom_visibility)
        }
        _ => marginals.walker.clone(),
    };
    let spurious_rate = noise.map_or(0.0, |nm| nm.higher_order_rate);

    let outcomes = Occupation::enumerate(u.rows(), walkers_in.photons());
    let walker_cdf = Cdf::new(outcomes.iter().map(|o| walker_law.get(o)));
    let dummy_cdf = Cdf::new(marginals.dummy.iter().map(|(_, p)| p));

    let batches = exec::map_batches(shots, SHOTS_PER_BATCH, |b, len| {
        let mut rng = source.stream(b);
        let mut tally = vec![0u64; outcomes.len()];
        for _ in 0..len {
            let k = if spurious_rate > 0.0 && rng.random::<f64>() < spurious_rate {
                rng.random_range(0..outcomes.len())
            } else {
                walker_cdf.sample(&mut rng)
            };
            let _dummy = dummy_cdf.sample(&mut rng);
            tally[k] += 1;
        }
        tally
    });

    let mut counts = vec![0u64; outcomes.len()];
    for tally in batches {
        for (c, t) in counts.iter_mut().zip(tally) {
            *c += t;
        }
    }
    let mut run = ProtocolRun { shots, occupations: BTreeMap::new(), logical: BTreeMap::new(), collisions: 0 };
    for (occ, &c) in outcomes.iter().zip(&counts) {
        if c == 0 {
            continue;
        }
        run.occupations.insert(occ.clone(), c);
        match decode_output(occ) {
            Some(bits) => *run.logical.entry(bits).or_insert(0) += c,
            None => run.collisions += c,
        }
    }
    Ok(run)
}

struct Cdf(Vec<f64>);

impl Cdf {
    fn new(probs: impl Iterator<Item = f64>) -> Self {
        let mut acc = 0.0;
        Cdf(probs
            .map(|p| {
                acc += p.max(0.0);
                acc
            })
            .collect())
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.0.last().unwrap_or(&0.0);
        let u = rng.random::<f64>() * total;
        self.0.partition_point(|&c| c <= u).min(self.0.len().saturating_sub(1))
    }
}
