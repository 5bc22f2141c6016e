use clap::Args;
use qhe_core::polarization::PlaintextString;
use qhe_core::rng::RandomSource;
use qhe_core::security::{
    attack_asymptote, attack_mutual_information, attack_success, attack_success_limit, simulate_attack,
};
use serde::Serialize;

use crate::common::{parse_list, CliError, CliResult, Output};

#[derive(Debug, Args)]
pub struct AttackArgs {
    /// Number of qubits (modes).
    #[arg(long)]
    m: u32,
    /// Comma-separated key-grid sizes.
    #[arg(long, default_value = "2,3,4,6,12")]
    d: String,
    /// Monte Carlo trials per d; 0 skips the simulation.
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Plaintext attacked by Bob (defaults to all zeros).
    #[arg(long)]
    input: Option<String>,
    /// Only evaluate the large-d, large-m asymptote 1/√(πm).
    #[arg(long)]
    asymptote_only: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Serialize)]
struct AttackConfig {
    m: u32,
    d: Vec<u32>,
    trials: u64,
    seed: u64,
    input: String,
}

#[derive(Debug, Serialize)]
struct Empirical {
    trials: u64,
    successes: u64,
    p: f64,
    stderr: f64,
    /// `(p_empirical − p_exact) / stderr`, absent when the standard error vanishes.
    z_score: Option<f64>,
    mutual_information_bits: Option<f64>,
}

#[derive(Debug, Serialize)]
struct AttackRow {
    d: u32,
    p_exact: f64,
    /// Exact `I(X; Bob)`; omitted for m beyond the histogram limit.
    mutual_information_bits: Option<f64>,
    empirical: Option<Empirical>,
}

#[derive(Debug, Serialize)]
struct AttackReport {
    command: &'static str,
    config: AttackConfig,
    rows: Vec<AttackRow>,
    /// `lim_{d→∞} p = C(2m, m)/4^m`.
    p_limit: f64,
    p_asymptote: f64,
    monotone_non_increasing: bool,
}

#[derive(Debug, Serialize)]
struct AsymptoteReport {
    command: &'static str,
    config: AsymptoteConfig,
    p_asymptote: f64,
}

#[derive(Debug, Serialize)]
struct AsymptoteConfig {
    m: u32,
    asymptote_only: bool,
}

pub fn run(args: &AttackArgs) -> CliResult<()> {
    if args.m == 0 {
        return Err(CliError::Usage("--m must be at least 1".into()));
    }
    let p_asymptote = attack_asymptote(args.m as f64)?;
    if args.asymptote_only {
        let report = AsymptoteReport {
            command: "attack",
            config: AsymptoteConfig { m: args.m, asymptote_only: true },
            p_asymptote,
        };
        return args.out.emit(&report, || format!("m,p_asymptote\n{},{}\n", args.m, p_asymptote));
    }

    let ds: Vec<u32> = parse_list(&args.d).map_err(|_| CliError::Usage(format!("bad --d list \"{}\"", args.d)))?;
    if ds.contains(&0) {
        return Err(CliError::Usage("--d values must be at least 1".into()));
    }
    let plaintext = match &args.input {
        Some(s) => s.parse::<PlaintextString>()?,
        None => PlaintextString::zeros(args.m as usize),
    };
    if plaintext.len() != args.m as usize {
        return Err(CliError::Usage(format!("--input has {} bits, expected {}", plaintext.len(), args.m)));
    }
    let source = RandomSource::new(args.seed);

    let mut rows = Vec::with_capacity(ds.len());
    for &d in &ds {
        let p_exact = attack_success(args.m, d)?;
        let empirical = if args.trials > 0 {
            let est = simulate_attack(d, &plaintext, args.trials, &source.derive(u64::from(d)))?;
            Some(Empirical {
                trials: est.trials,
                successes: est.successes,
                p: est.p,
                stderr: est.stderr,
                z_score: (est.stderr > 0.0).then(|| (est.p - p_exact) / est.stderr),
                mutual_information_bits: est.mutual_information(),
            })
        } else {
            None
        };
        rows.push(AttackRow {
            d,
            p_exact,
            mutual_information_bits: attack_mutual_information(args.m, d).ok(),
            empirical,
        });
    }
    let mut sorted: Vec<(u32, f64)> = rows.iter().map(|r| (r.d, r.p_exact)).collect();
    sorted.sort_by_key(|&(d, _)| d);
    let monotone_non_increasing = sorted.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);

    let report = AttackReport {
        command: "attack",
        config: AttackConfig { m: args.m, d: ds, trials: args.trials, seed: args.seed, input: plaintext.to_string() },
        rows,
        p_limit: attack_success_limit(args.m),
        p_asymptote,
        monotone_non_increasing,
    };
    args.out.emit(&report, || {
        let mut csv = String::from("d,p_exact,p_empirical,stderr\n");
        for r in &report.rows {
            let (p, se) = r
                .empirical
                .as_ref()
                .map_or((String::new(), String::new()), |e| (e.p.to_string(), e.stderr.to_string()));
            csv.push_str(&format!("{},{},{},{}\n", r.d, r.p_exact, p, se));
        }
        csv
    })
}
