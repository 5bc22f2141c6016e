//! Device characterization from single-photon intensities and two-photon
//! Hong–Ou–Mandel visibilities.
//!
//! Observables are invariant under `U → D1 U D2` for diagonal phase matrices
//! and under complex conjugation `U → U*`, so a reconstruction is compared
//! with the truth modulo both.

mod gauge;
mod lm;
mod measurement;

pub use gauge::{gauge_fix, GaugeFixedUnitary};
pub use measurement::{
    coincidence_rates, synthesize_measurements, visibility, MeasurementSet, SynthesisNoise, VisibilityRecord,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::numerics::{unitarize, ComplexMatrix};
use crate::rng::RandomSource;
use lm::{levenberg_marquardt, LmOptions};

/// Largest device size accepted by [`reconstruct_unitary`].
pub const MAX_RECONSTRUCT_MODES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionSettings {
    pub restarts: usize,
    pub seed: u64,
    /// RMS visibility residual above which the reconstruction is reported as failed.
    pub failure_threshold: f64,
    pub max_iterations: usize,
}

impl Default for ReconstructionSettings {
    fn default() -> Self {
        Self { restarts: 16, seed: 0x5eed, failure_threshold: 0.05, max_iterations: 200 }
    }
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub unitary: GaugeFixedUnitary,
    /// RMS of `V_pred − V_meas` over all visibility records, for the final unitary.
    pub visibility_rms: f64,
    /// RMS of `|U_ji|² − I_ji` over all intensities, for the final unitary.
    pub intensity_rms: f64,
    /// Best phase-only cost among the restarts, before polishing.
    pub phase_stage_cost: f64,
    pub restarts: usize,
    pub converged: bool,
}

impl Reconstruction {
    /// Turns a failed reconstruction into [`Error::ReconstructionFailed`].
    pub fn ensure_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::ReconstructionFailed { residual: self.visibility_rms })
        }
    }
}

/// Entry-wise comparison of a reconstruction with a ground-truth unitary.
#[derive(Debug, Clone, Serialize)]
pub struct TruthComparison {
    pub amplitude_errors: Vec<Vec<f64>>,
    pub phase_errors: Vec<Vec<f64>>,
    pub max_amplitude_error: f64,
    pub max_phase_error: f64,
    /// Whether the reconstruction matched the complex-conjugate branch.
    pub conjugate_branch: bool,
}

/// Recovers a gauge-fixed unitary from a measurement set.
///
/// Amplitudes start at `√intensity`; the `(m−1)²` free phases are fitted to
/// the visibilities from `restarts` random starting points. The best start is
/// then polished jointly over amplitudes and phases (with unitarity as a soft
/// constraint) and projected onto the unitary group.
pub fn reconstruct_unitary(meas: &MeasurementSet, settings: &ReconstructionSettings) -> Result<Reconstruction> {
    meas.validate()?;
    let m = meas.m;
    if m > MAX_RECONSTRUCT_MODES {
        return Err(Error::ResourceLimit(format!("reconstruction limited to {MAX_RECONSTRUCT_MODES} modes")));
    }
    if settings.restarts == 0 {
        return Err(Error::OutOfRange("at least one restart is required".into()));
    }
    let amplitudes: Vec<f64> = (0..m * m).map(|k| meas.intensities[k / m][k % m].max(0.0).sqrt()).collect();
    let free = (m - 1) * (m - 1);
    let source = RandomSource::new(settings.seed).derive(0x7265_636f);

    let phase_opts = LmOptions { max_iterations: settings.max_iterations, ..LmOptions::default() };
    let starts = exec::map_indexed(settings.restarts, |r| {
        let mut rng = source.stream(r as u64);
        let init: Vec<f64> = (0..free).map(|_| rng.random_range(-PI..PI)).collect();
        let residuals = |p: &[f64], out: &mut Vec<f64>| {
            let model = model_matrix(m, &amplitudes, p);
            visibility_residuals(&model, meas, out);
        };
        levenberg_marquardt(init, residuals, &phase_opts)
    });
    // first minimum wins ties, keeping the choice independent of scheduling
    let (best_phases, phase_cost) = starts
        .into_iter()
        .fold(None, |best: Option<(Vec<f64>, f64)>, cand| match best {
            Some(b) if b.1 <= cand.1 => Some(b),
            _ => Some(cand),
        })
        .expect("restarts >= 1");

    // joint polish: amplitudes ++ phases
    let mut joint = amplitudes.clone();
    joint.extend(&best_phases);
    let unitarity_weight = 1.0;
    let joint_residuals = |p: &[f64], out: &mut Vec<f64>| {
        let (amp, ph) = p.split_at(m * m);
        let model = model_matrix(m, amp, ph);
        visibility_residuals(&model, meas, out);
        for j in 0..m {
            for i in 0..m {
                out.push(amp[j * m + i] * amp[j * m + i] - meas.intensities[j][i]);
            }
        }
        unitarity_residuals(&model, unitarity_weight, out);
    };
    let (polished, _) = levenberg_marquardt(
        joint,
        joint_residuals,
        &LmOptions { max_iterations: settings.max_iterations, ..LmOptions::default() },
    );
    let (amp, ph) = polished.split_at(m * m);
    let projected = unitarize(&model_matrix(m, amp, ph))?;
    let unitary = gauge_fix(&projected);

    let mut vres = Vec::new();
    visibility_residuals(unitary.matrix(), meas, &mut vres);
    let visibility_rms = rms(&vres);
    let ires: Vec<f64> =
        (0..m * m).map(|k| unitary.matrix()[(k / m, k % m)].norm_sqr() - meas.intensities[k / m][k % m]).collect();
    Ok(Reconstruction {
        unitary,
        visibility_rms,
        intensity_rms: rms(&ires),
        phase_stage_cost: phase_cost,
        restarts: settings.restarts,
        converged: visibility_rms <= settings.failure_threshold,
    })
}

/// Compares against `gauge_fix(truth)` and `gauge_fix(truth*)` and keeps the
/// closer branch. Phase errors of entries with modulus below 1e-6 are 0.
pub fn compare_to_truth(reconstructed: &ComplexMatrix, truth: &ComplexMatrix) -> Result<TruthComparison> {
    if reconstructed.rows() != truth.rows() || !truth.is_square() {
        return Err(Error::dims(truth.rows(), reconstructed.rows()));
    }
    let rec = gauge_fix(reconstructed);
    let direct = compare_fixed(rec.matrix(), gauge_fix(truth).matrix(), false);
    let mirrored = compare_fixed(rec.matrix(), gauge_fix(&truth.conj()).matrix(), true);
    Ok(if mirrored.max_phase_error < direct.max_phase_error { mirrored } else { direct })
}

fn compare_fixed(rec: &ComplexMatrix, truth: &ComplexMatrix, conjugate_branch: bool) -> TruthComparison {
    let m = truth.rows();
    let mut amplitude_errors = vec![vec![0.0; m]; m];
    let mut phase_errors = vec![vec![0.0; m]; m];
    for j in 0..m {
        for i in 0..m {
            let (a, b) = (rec[(j, i)], truth[(j, i)]);
            amplitude_errors[j][i] = (a.norm() - b.norm()).abs();
            if a.norm() > 1e-6 && b.norm() > 1e-6 {
                phase_errors[j][i] = (a * b.conj()).arg().abs();
            }
        }
    }
    let max = |v: &Vec<Vec<f64>>| v.iter().flatten().copied().fold(0.0, f64::max);
    TruthComparison {
        max_amplitude_error: max(&amplitude_errors),
        max_phase_error: max(&phase_errors),
        amplitude_errors,
        phase_errors,
        conjugate_branch,
    }
}

/// `M_ji = a_ji e^{iθ_ji}` with zero phases on the first row and column.
fn model_matrix(m: usize, amplitudes: &[f64], phases: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(m, m, |j, i| {
        let theta = if j == 0 || i == 0 { 0.0 } else { phases[(j - 1) * (m - 1) + (i - 1)] };
        Complex64::from_polar(amplitudes[j * m + i], theta)
    })
}

fn visibility_residuals(model: &ComplexMatrix, meas: &MeasurementSet, out: &mut Vec<f64>) {
    for rec in &meas.visibilities {
        let pred = visibility(model, rec.inputs, rec.outputs).unwrap_or(rec.value);
        out.push(pred - rec.value);
    }
}

fn unitarity_residuals(model: &ComplexMatrix, weight: f64, out: &mut Vec<f64>) {
    let m = model.rows();
    for a in 0..m {
        for b in a..m {
            let mut s: Complex64 = (0..m).map(|k| model[(k, a)].conj() * model[(k, b)]).sum();
            if a == b {
                s -= 1.0;
                out.push(weight * s.re);
            } else {
                out.push(weight * s.re);
                out.push(weight * s.im);
            }
        }
    }
}

fn rms(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}
