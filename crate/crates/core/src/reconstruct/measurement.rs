use rand_distr::{Distribution as _, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::rng::RandomSource;

/// Distinguishable coincidences below this are treated as "no data".
const MIN_COINCIDENCE: f64 = 1e-14;

/// One HOM visibility: photons in inputs `(i, i′)`, coincidence at outputs `(j, j′)`.
/// Indices are zero-based with `i < i′`, `j < j′`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VisibilityRecord {
    pub inputs: [usize; 2],
    pub outputs: [usize; 2],
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSet {
    pub m: usize,
    /// `intensities[j][i]`: probability of output `j` for a photon injected at `i`.
    pub intensities: Vec<Vec<f64>>,
    pub visibilities: Vec<VisibilityRecord>,
    /// Expected detections per setting, when the data carries count noise.
    pub counts_scale: Option<f64>,
}

/// Count noise and photon distinguishability for [`synthesize_measurements`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisNoise {
    pub counts_scale: f64,
    /// Interference contrast of the source, 1 for perfectly indistinguishable photons.
    pub indistinguishability: f64,
}

impl SynthesisNoise {
    pub fn poissonian(counts_scale: f64) -> Self {
        Self { counts_scale, indistinguishability: 1.0 }
    }
}

impl MeasurementSet {
    pub fn validate(&self) -> Result<()> {
        let m = self.m;
        if m == 0 {
            return Err(Error::OutOfRange("measurement set has no modes".into()));
        }
        if self.intensities.len() != m || self.intensities.iter().any(|row| row.len() != m) {
            return Err(Error::dims(format!("{m}x{m} intensities"), "ragged intensity table"));
        }
        if self.intensities.iter().flatten().any(|x| !(0.0..=1.0 + 1e-9).contains(x)) {
            return Err(Error::OutOfRange("intensities must lie in [0, 1]".into()));
        }
        for rec in &self.visibilities {
            let [i, i2] = rec.inputs;
            let [j, j2] = rec.outputs;
            if i >= i2 || j >= j2 || i2 >= m || j2 >= m {
                return Err(Error::OutOfRange(format!("bad visibility indices {:?}->{:?}", rec.inputs, rec.outputs)));
            }
            if !(-1.0 - 1e-9..=1.0 + 1e-9).contains(&rec.value) {
                return Err(Error::OutOfRange(format!("visibility {} outside [-1, 1]", rec.value)));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("measurement set serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let set: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        set.validate()?;
        Ok(set)
    }
}

/// Two-photon coincidence rates `(C_dist, C_ind)` for inputs `(i, i′)` and
/// outputs `(j, j′)`: the permanent of the absolute-squared submatrix and the
/// squared modulus of the permanent of the submatrix.
pub fn coincidence_rates(u: &ComplexMatrix, inputs: [usize; 2], outputs: [usize; 2]) -> (f64, f64) {
    let [i, i2] = inputs;
    let [j, j2] = outputs;
    let (a, b, c, d) = (u[(j, i)], u[(j, i2)], u[(j2, i)], u[(j2, i2)]);
    let dist = a.norm_sqr() * d.norm_sqr() + b.norm_sqr() * c.norm_sqr();
    let ind = (a * d + b * c).norm_sqr();
    (dist, ind)
}

/// `V = (C_max − C_min)/C_max`, or `None` when the pair never coincides.
pub fn visibility(u: &ComplexMatrix, inputs: [usize; 2], outputs: [usize; 2]) -> Option<f64> {
    let (dist, ind) = coincidence_rates(u, inputs, outputs);
    (dist > MIN_COINCIDENCE).then(|| (dist - ind) / dist)
}

/// Generates intensities and all-pairs visibilities for `u`.
///
/// Without noise the values are exact. With noise, each setting draws
/// Poissonian counts with mean `counts_scale × rate`; intensities are
/// normalized per input and visibilities use the noisy `C_max`, `C_min`.
pub fn synthesize_measurements(
    u: &ComplexMatrix,
    noise: Option<&SynthesisNoise>,
    source: &RandomSource,
) -> Result<MeasurementSet> {
    u.ensure_unitary(crate::walk::UNITARY_TOL)?;
    let m = u.rows();
    if let Some(n) = noise {
        if !(n.counts_scale > 0.0 && n.counts_scale.is_finite()) {
            return Err(Error::OutOfRange("counts_scale must be positive".into()));
        }
        if !(0.0..=1.0).contains(&n.indistinguishability) {
            return Err(Error::OutOfRange("indistinguishability must lie in [0, 1]".into()));
        }
    }
    let mut rng = source.derive(0x6d65_6173).stream(0);
    let draw = |mean: f64, rng: &mut rand_chacha::ChaCha8Rng| -> f64 {
        if mean <= 0.0 {
            0.0
        } else {
            Poisson::new(mean).map(|p| p.sample(rng)).unwrap_or(mean)
        }
    };

    let mut intensities = vec![vec![0.0; m]; m];
    for i in 0..m {
        match noise {
            None => (0..m).for_each(|j| intensities[j][i] = u[(j, i)].norm_sqr()),
            Some(n) => {
                let counts: Vec<f64> = (0..m).map(|j| draw(n.counts_scale * u[(j, i)].norm_sqr(), &mut rng)).collect();
                let total: f64 = counts.iter().sum();
                for j in 0..m {
                    intensities[j][i] = if total > 0.0 { counts[j] / total } else { 0.0 };
                }
            }
        }
    }

    let mut visibilities = Vec::new();
    for i in 0..m {
        for i2 in i + 1..m {
            for j in 0..m {
                for j2 in j + 1..m {
                    let (inputs, outputs) = ([i, i2], [j, j2]);
                    let (dist, ind) = coincidence_rates(u, inputs, outputs);
                    let value = match noise {
                        None => (dist > MIN_COINCIDENCE).then(|| (dist - ind) / dist),
                        Some(n) => {
                            let eta = n.indistinguishability;
                            let c_min = eta * ind + (1.0 - eta) * dist;
                            let c_max = draw(n.counts_scale * dist, &mut rng);
                            let c_min = draw(n.counts_scale * c_min, &mut rng);
                            (c_max > 0.0).then(|| ((c_max - c_min) / c_max).clamp(-1.0, 1.0))
                        }
                    };
                    if let Some(value) = value {
                        visibilities.push(VisibilityRecord { inputs, outputs, value });
                    }
                }
            }
        }
    }
    Ok(MeasurementSet { m, intensities, visibilities, counts_scale: noise.map(|n| n.counts_scale) })
}
