use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use qhe_core::device::{Device, DeviceFile};
use qhe_core::polarization::{sample_haar_key, PolarizationKey};
use qhe_core::rng::RandomSource;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] qhe_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("reconstruction failed (RMS visibility residual {0:.3e}); report written")]
    ReconstructionFailed(f64),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Core(qhe_core::Error::Parse(_)) => 2,
            CliError::ReconstructionFailed(_) => 3,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Shared `--output` / `--csv` handling.
#[derive(Debug, Args)]
pub struct Output {
    /// Write the report to this file instead of stdout.
    #[arg(long, short = 'o', global = true)]
    pub output: Option<PathBuf>,
    /// Emit a flat CSV table instead of JSON.
    #[arg(long, global = true)]
    pub csv: bool,
}

impl Output {
    pub fn emit<T: Serialize>(&self, report: &T, csv: impl FnOnce() -> String) -> CliResult<()> {
        let text = if self.csv {
            csv()
        } else {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        };
        match &self.output {
            Some(path) => fs::write(path, text).map_err(|source| CliError::Io { path: path.clone(), source }),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

/// Built-in name (`u1`, `u2`, `identityN`) or path to a device JSON file.
pub fn load_device(spec: &str) -> CliResult<Device> {
    if let Ok(device) = Device::builtin(spec) {
        return Ok(device);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "unknown device \"{spec}\" (expected u1, u2, identityN or a device JSON file)"
        )));
    }
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
    let file = DeviceFile::from_json(&text)?;
    Ok(Device::from_file(spec, &file)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct DeviceInfo {
    pub name: String,
    pub m: usize,
    pub projection_distance: f64,
}

impl DeviceInfo {
    pub fn of(device: &Device) -> Self {
        Self { name: device.name.clone(), m: device.unitary.rows(), projection_distance: device.projection_distance }
    }
}

/// Resolved key: the textual spec plus the Euler angles actually used.
#[derive(Debug, Clone, Serialize)]
pub struct KeyInfo {
    pub spec: String,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Parses `linear:k/d`, `euler:a,b,c` or `haar:d1,d2,d3` (sampled from `source`).
pub fn parse_key(spec: &str, source: &RandomSource) -> CliResult<(PolarizationKey, KeyInfo)> {
    let key = match spec.trim().strip_prefix("haar:") {
        Some(rest) => {
            let bad = || CliError::Usage(format!("bad key \"{spec}\" (expected haar:d1,d2,d3)"));
            let v = parse_list::<u32>(rest).map_err(|_| bad())?;
            let [d1, d2, d3] = v[..] else { return Err(bad()) };
            let mut rng = source.derive(0x006b_6579).stream(0);
            sample_haar_key(&mut rng, d1, d2, d3)?
        }
        None => spec.parse::<PolarizationKey>()?,
    };
    let info = KeyInfo { spec: spec.to_string(), alpha: key.alpha, beta: key.beta, gamma: key.gamma };
    Ok((key, info))
}

pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, T::Err> {
    s.split(',').map(|x| x.trim().parse()).collect()
}
