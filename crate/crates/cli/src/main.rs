//! `qhe`: reproducible command-line runs of the encrypted quantum walk toolkit.

mod attack;
mod common;
mod devices;
mod reconstruct;
mod security;
mod walk;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use common::CliError;

#[derive(Debug, Parser)]
#[command(name = "qhe", version, about = "Homomorphic-encrypted quantum walk simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the encrypted walk protocol and compare samples with the exact law.
    Walk(walk::WalkArgs),
    /// Success probability of the measure-in-H/V attack.
    Attack(attack::AttackArgs),
    /// Holevo quantity, hidden-bit formulas and trace distances.
    Security(security::SecurityArgs),
    /// Synthesize HOM data for a device and reconstruct its unitary.
    Reconstruct(reconstruct::ReconstructArgs),
    /// List or dump the built-in devices.
    Devices(devices::DevicesArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        return fail(e);
    }
    let result = match cli.command {
        Command::Walk(args) => walk::run(&args),
        Command::Attack(args) => attack::run(&args),
        Command::Security(args) => security::run(&args),
        Command::Reconstruct(args) => reconstruct::run(&args),
        Command::Devices(args) => devices::run(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("qhe: {e}");
    ExitCode::from(e.exit_code())
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("QHE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("QHE_THREADS must be a positive integer, got \"{raw}\"")))?;
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| CliError::Usage(e.to_string()))
}
