use std::fs;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use qhe_core::device::DeviceFile;
use qhe_core::reconstruct::{
    compare_to_truth, gauge_fix, reconstruct_unitary, synthesize_measurements, MeasurementSet, ReconstructionSettings,
    SynthesisNoise, TruthComparison,
};
use qhe_core::rng::RandomSource;
use serde::Serialize;

use crate::common::{load_device, CliError, CliResult, DeviceInfo, Output};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum NoiseKind {
    None,
    Poisson,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// Ground-truth device; measurements are synthesized from it unless --measurements is given.
    #[arg(long, required_unless_present = "measurements")]
    device: Option<String>,
    /// Reconstruct from a measurement-set JSON file instead of synthesizing.
    #[arg(long)]
    measurements: Option<PathBuf>,
    /// Count noise on synthesized data; --counts implies poisson.
    #[arg(long, value_enum)]
    noise: Option<NoiseKind>,
    /// Expected detections per setting.
    #[arg(long)]
    counts: Option<f64>,
    /// Two-photon interference contrast of the simulated source.
    #[arg(long, default_value_t = 1.0)]
    indistinguishability: f64,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    /// RMS visibility residual above which the fit is reported as failed.
    #[arg(long, default_value_t = 0.05)]
    threshold: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the synthesized measurement set to this file.
    #[arg(long)]
    save_measurements: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Serialize)]
struct ReconstructConfig {
    device: Option<DeviceInfo>,
    measurements: Option<String>,
    noise: NoiseKind,
    counts: Option<f64>,
    indistinguishability: f64,
    restarts: usize,
    threshold: f64,
    seed: u64,
}

#[derive(Debug, Serialize)]
struct ReconstructReport {
    command: &'static str,
    config: ReconstructConfig,
    converged: bool,
    visibility_rms: f64,
    intensity_rms: f64,
    phase_stage_cost: f64,
    visibility_records: usize,
    /// Gauge-fixed reconstruction (first row and column real non-negative).
    reconstructed: DeviceFile,
    gauge_fixed_truth: Option<DeviceFile>,
    comparison: Option<TruthComparison>,
}

pub fn run(args: &ReconstructArgs) -> CliResult<()> {
    let noise_kind = match (args.noise, args.counts) {
        (Some(NoiseKind::None), Some(_)) => {
            return Err(CliError::Usage("--counts conflicts with --noise none".into()));
        }
        (Some(NoiseKind::Poisson), None) => {
            return Err(CliError::Usage("--noise poisson requires --counts".into()));
        }
        (Some(kind), _) => kind,
        (None, Some(_)) => NoiseKind::Poisson,
        (None, None) => NoiseKind::None,
    };
    let device = args.device.as_deref().map(load_device).transpose()?;
    let source = RandomSource::new(args.seed);

    let meas = match (&args.measurements, &device) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            MeasurementSet::from_json(&text)?
        }
        (None, Some(d)) => {
            let noise = match noise_kind {
                NoiseKind::None => None,
                NoiseKind::Poisson => Some(SynthesisNoise {
                    counts_scale: args.counts.expect("checked above"),
                    indistinguishability: args.indistinguishability,
                }),
            };
            synthesize_measurements(&d.unitary, noise.as_ref(), &source.derive(0x6461_7461))?
        }
        (None, None) => unreachable!("clap requires --device or --measurements"),
    };
    if let Some(path) = &args.save_measurements {
        fs::write(path, meas.to_json()).map_err(|source| CliError::Io { path: path.clone(), source })?;
    }

    let settings = ReconstructionSettings {
        restarts: args.restarts,
        seed: args.seed,
        failure_threshold: args.threshold,
        ..ReconstructionSettings::default()
    };
    let rec = reconstruct_unitary(&meas, &settings)?;
    let (truth, comparison) = match &device {
        Some(d) if d.unitary.rows() == meas.m => (
            Some(DeviceFile::from_matrix(gauge_fix(&d.unitary).matrix())),
            Some(compare_to_truth(rec.unitary.matrix(), &d.unitary)?),
        ),
        _ => (None, None),
    };

    let report = ReconstructReport {
        command: "reconstruct",
        config: ReconstructConfig {
            device: device.as_ref().map(DeviceInfo::of),
            measurements: args.measurements.as_ref().map(|p| p.display().to_string()),
            noise: noise_kind,
            counts: args.counts,
            indistinguishability: args.indistinguishability,
            restarts: args.restarts,
            threshold: args.threshold,
            seed: args.seed,
        },
        converged: rec.converged,
        visibility_rms: rec.visibility_rms,
        intensity_rms: rec.intensity_rms,
        phase_stage_cost: rec.phase_stage_cost,
        visibility_records: meas.visibilities.len(),
        reconstructed: DeviceFile::from_matrix(rec.unitary.matrix()),
        gauge_fixed_truth: truth,
        comparison,
    };
    args.out.emit(&report, || {
        let mut csv = String::from("row,col,re,im,amplitude_error,phase_error\n");
        for (j, row) in report.reconstructed.unitary.iter().enumerate() {
            for (i, [re, im]) in row.iter().enumerate() {
                let (a, p) = report.comparison.as_ref().map_or((String::new(), String::new()), |c| {
                    (c.amplitude_errors[j][i].to_string(), c.phase_errors[j][i].to_string())
                });
                csv.push_str(&format!("{j},{i},{re},{im},{a},{p}\n"));
            }
        }
        csv
    })?;
    if rec.converged {
        Ok(())
    } else {
        Err(CliError::ReconstructionFailed(rec.visibility_rms))
    }
}
