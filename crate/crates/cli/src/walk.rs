use clap::Args;
use qhe_core::polarization::PlaintextString;
use qhe_core::rng::RandomSource;
use qhe_core::walk::{
    bhattacharyya_fidelity, decode_output, distinguishable_distribution, encrypted_marginals, run_protocol,
    Distribution, NoiseModel, Occupation,
};
use serde::Serialize;

use crate::common::{load_device, parse_key, CliError, CliResult, DeviceInfo, KeyInfo, Output};

#[derive(Debug, Args)]
pub struct WalkArgs {
    /// Built-in device (u1, u2, identityN) or device JSON file.
    #[arg(long)]
    device: String,
    /// Plaintext bit-string; 0 marks a walker, 1 a dummy photon.
    #[arg(long)]
    input: String,
    /// Polarization key: linear:k/d, euler:a,b,c or haar:d1,d2,d3.
    #[arg(long, default_value = "linear:0/1")]
    key: String,
    #[arg(long, default_value_t = 100_000)]
    shots: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// HOM visibility of the source (enables the noise model).
    #[arg(long)]
    visibility: Option<f64>,
    /// Probability per shot of a spurious uniformly random outcome.
    #[arg(long)]
    higher_order_rate: Option<f64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Serialize)]
struct WalkConfig {
    device: DeviceInfo,
    input: String,
    walkers: String,
    key: KeyInfo,
    shots: u64,
    seed: u64,
    noise: Option<NoiseModel>,
}

#[derive(Debug, Serialize)]
struct OutcomeRow {
    outcome: String,
    logical: Option<String>,
    p_exact: f64,
    count: u64,
    p_empirical: f64,
}

#[derive(Debug, Serialize)]
struct LogicalRow {
    logical: String,
    p_exact: f64,
    count: u64,
    p_empirical: f64,
}

#[derive(Debug, Serialize)]
struct WalkReport {
    command: &'static str,
    config: WalkConfig,
    outcomes: Vec<OutcomeRow>,
    logical: Vec<LogicalRow>,
    collisions: u64,
    collision_probability_exact: f64,
    /// Bhattacharyya fidelity of the empirical occupation histogram against the exact law.
    fidelity: f64,
    /// Same, over post-selected collision-free logical outcomes.
    logical_fidelity: f64,
    dummy_photons_discarded: u32,
}

pub fn run(args: &WalkArgs) -> CliResult<()> {
    let device = load_device(&args.device)?;
    let u = &device.unitary;
    let plaintext: PlaintextString = args.input.parse()?;
    if plaintext.len() != u.rows() {
        return Err(CliError::Usage(format!(
            "--input has {} bits but device {} has {} modes",
            plaintext.len(),
            device.name,
            u.rows()
        )));
    }
    let source = RandomSource::new(args.seed);
    let (key, key_info) = parse_key(&args.key, &source)?;
    let noise = match (args.visibility, args.higher_order_rate) {
        (None, None) => None,
        (v, r) => Some(NoiseModel::new(v.unwrap_or(1.0), r.unwrap_or(0.0))?),
    };

    let walkers = Occupation::walkers_of(&plaintext);
    let marginals = encrypted_marginals(u, &plaintext, &key)?;
    let exact = match &noise {
        Some(nm) if nm.hom_visibility < 1.0 => {
            marginals.walker.mix(&distinguishable_distribution(u, &walkers)?, nm.hom_visibility)
        }
        _ => marginals.walker.clone(),
    };
    let run = run_protocol(u, &plaintext, &key, args.shots, &source.derive(0x77616c6b), noise.as_ref())?;
    let empirical = run.empirical();

    let outcomes: Vec<OutcomeRow> = Occupation::enumerate(u.rows(), walkers.photons())
        .into_iter()
        .map(|occ| {
            let count = run.occupations.get(&occ).copied().unwrap_or(0);
            OutcomeRow {
                outcome: occ.to_string(),
                logical: decode_output(&occ).map(|p| p.to_string()),
                p_exact: exact.get(&occ),
                count,
                p_empirical: count as f64 / run.shots as f64,
            }
        })
        .collect();

    let logical_exact = exact.conditioned(|occ| occ.is_collision_free()).map_keys(|occ| decode_output(occ).unwrap());
    let logical_empirical = run.logical_distribution();
    let logical = logical_exact
        .iter()
        .map(|(bits, p)| {
            let count = run.logical.get(bits).copied().unwrap_or(0);
            LogicalRow { logical: bits.to_string(), p_exact: p, count, p_empirical: logical_empirical.get(bits) }
        })
        .filter(|row| row.p_exact > 0.0 || row.count > 0)
        .collect();
    let collision_probability_exact = exact.iter().filter(|(o, _)| !o.is_collision_free()).map(|(_, p)| p).sum();

    let report = WalkReport {
        command: "walk",
        config: WalkConfig {
            device: DeviceInfo::of(&device),
            input: plaintext.to_string(),
            walkers: walkers.to_string(),
            key: key_info,
            shots: args.shots,
            seed: args.seed,
            noise,
        },
        outcomes,
        logical,
        collisions: run.collisions,
        collision_probability_exact,
        fidelity: bhattacharyya_fidelity(&exact, &empirical),
        logical_fidelity: logical_fidelity(&logical_exact, &logical_empirical),
        dummy_photons_discarded: plaintext.bits().iter().map(|&b| u32::from(b)).sum(),
    };
    args.out.emit(&report, || {
        let mut csv = String::from("outcome,logical,p_exact,count,p_empirical\n");
        for r in &report.outcomes {
            csv.push_str(&format!(
                "\"{}\",{},{},{},{}\n",
                r.outcome,
                r.logical.as_deref().unwrap_or(""),
                r.p_exact,
                r.count,
                r.p_empirical
            ));
        }
        csv
    })
}

fn logical_fidelity(exact: &Distribution<PlaintextString>, empirical: &Distribution<PlaintextString>) -> f64 {
    if empirical.is_empty() {
        0.0
    } else {
        bhattacharyya_fidelity(exact, empirical)
    }
}
