use clap::Args;
use qhe_core::polarization::PlaintextString;
use qhe_core::security::{
    encrypted_density, hamming_trace_distances, hidden_bits_linear_asymptotic, holevo, holevo_explicit,
    holevo_poincare_limit, qudit_hidden_info, KeyEnsemble, MAX_QUBITS,
};
use serde::Serialize;

use crate::common::{CliError, CliResult, Output};

/// Largest m for which the 2^m-plaintext explicit Holevo form is evaluated.
const EXPLICIT_MAX_M: usize = 5;

#[derive(Debug, Args)]
pub struct SecurityArgs {
    #[arg(long, default_value_t = 4)]
    m: usize,
    /// Key ensemble (repeatable): linear:D or poincare:D1,D2,D3.
    #[arg(long = "ensemble", default_values = ["linear:180", "poincare:64,64,64"])]
    ensembles: Vec<KeyEnsemble>,
    /// Levels per photon for the qudit hidden-information formula (a ≥ m).
    #[arg(long)]
    qudit_levels: Option<u32>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Serialize)]
struct SecurityConfig {
    m: usize,
    ensembles: Vec<KeyEnsemble>,
    qudit_levels: Option<u32>,
}

#[derive(Debug, Serialize)]
struct HammingRow {
    hamming: usize,
    trace_distance: f64,
}

#[derive(Debug, Serialize)]
struct EnsembleReport {
    ensemble: KeyEnsemble,
    keys: usize,
    /// `m − S(ρ_0)`.
    holevo_bits: f64,
    /// `S(ρ) − mean_x S(ρ_x)`; null above m = 5.
    holevo_explicit_bits: Option<f64>,
    /// `S(ρ_0)`: bits hidden from Bob for the all-zero plaintext.
    hidden_bits: f64,
    rho0_eigenvalues: Vec<f64>,
    /// Weight of `ρ_0` in each Hamming-weight sector, k = 0..m.
    rho0_sector_weights: Vec<f64>,
    rho0_cross_sector_coherence: f64,
    trace_distances: Vec<HammingRow>,
}

#[derive(Debug, Serialize)]
struct Formulas {
    /// `m − log2(m + 1)`.
    holevo_poincare_limit_bits: f64,
    /// `log2(m + 1)`.
    hidden_bits_poincare_limit: f64,
    /// `½ log2(π e m / 2)`.
    hidden_bits_linear_asymptotic: f64,
    /// `m log2(a/m) + m/ln 2`, when `--qudit-levels` is given.
    qudit_hidden_bits: Option<f64>,
    /// Linear ensemble with d = 12, reported alongside the large-d value.
    holevo_linear_12_bits: f64,
}

#[derive(Debug, Serialize)]
struct SecurityReport {
    command: &'static str,
    config: SecurityConfig,
    ensembles: Vec<EnsembleReport>,
    formulas: Formulas,
}

pub fn run(args: &SecurityArgs) -> CliResult<()> {
    let m = args.m;
    if m == 0 || m > MAX_QUBITS {
        return Err(CliError::Usage(format!("--m must lie in 1..={MAX_QUBITS}")));
    }
    let mut ensembles = Vec::with_capacity(args.ensembles.len());
    for &ensemble in &args.ensembles {
        let rho0 = encrypted_density(&PlaintextString::zeros(m), &ensemble)?;
        let hidden = rho0.entropy()?;
        let explicit = if m <= EXPLICIT_MAX_M { Some(holevo_explicit(m, &ensemble)?) } else { None };
        ensembles.push(EnsembleReport {
            ensemble,
            keys: ensemble.len(),
            holevo_bits: m as f64 - hidden,
            holevo_explicit_bits: explicit,
            hidden_bits: hidden,
            rho0_eigenvalues: rho0.eigenvalues()?,
            rho0_sector_weights: rho0.symmetric_sector_weights(),
            rho0_cross_sector_coherence: rho0.cross_sector_coherence(),
            trace_distances: hamming_trace_distances(m, &ensemble)?
                .into_iter()
                .map(|(hamming, trace_distance)| HammingRow { hamming, trace_distance })
                .collect(),
        });
    }
    let mu = m as u32;
    let formulas = Formulas {
        holevo_poincare_limit_bits: holevo_poincare_limit(mu),
        hidden_bits_poincare_limit: f64::from(mu + 1).log2(),
        hidden_bits_linear_asymptotic: hidden_bits_linear_asymptotic(m as f64),
        qudit_hidden_bits: args.qudit_levels.map(|a| qudit_hidden_info(a, mu)).transpose()?,
        holevo_linear_12_bits: holevo(m, &KeyEnsemble::linear(12)?)?,
    };
    let report = SecurityReport {
        command: "security",
        config: SecurityConfig { m, ensembles: args.ensembles.clone(), qudit_levels: args.qudit_levels },
        ensembles,
        formulas,
    };
    args.out.emit(&report, || {
        let mut csv = String::from("ensemble,holevo_bits,hamming,trace_distance\n");
        for e in &report.ensembles {
            for row in &e.trace_distances {
                csv.push_str(&format!("{},{},{},{}\n", e.ensemble, e.holevo_bits, row.hamming, row.trace_distance));
            }
        }
        csv
    })
}
