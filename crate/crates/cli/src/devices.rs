use clap::{Args, Subcommand};
use qhe_core::device::{DeviceFile, BUILTIN_NAMES};
use serde::Serialize;

use crate::common::{load_device, CliResult, DeviceInfo, Output};

#[derive(Debug, Args)]
pub struct DevicesArgs {
    #[command(subcommand)]
    action: Option<DevicesAction>,
    #[command(flatten)]
    out: Output,
}

#[derive(Debug, Subcommand)]
enum DevicesAction {
    /// List built-in devices with their projection distances (default).
    List,
    /// Print a device file (re-unitarized unless --given).
    Dump {
        name: String,
        /// Dump the matrix as stored, before re-unitarization.
        #[arg(long)]
        given: bool,
    },
}

#[derive(Debug, Serialize)]
struct DeviceList {
    command: &'static str,
    devices: Vec<DeviceInfo>,
    /// `identityN` is available for N = 1..=16.
    identity_range: [usize; 2],
}

pub fn run(args: &DevicesArgs) -> CliResult<()> {
    match args.action.as_ref().unwrap_or(&DevicesAction::List) {
        DevicesAction::List => {
            let devices = BUILTIN_NAMES
                .iter()
                .map(|name| load_device(name).map(|d| DeviceInfo::of(&d)))
                .collect::<CliResult<Vec<_>>>()?;
            let report = DeviceList { command: "devices", devices, identity_range: [1, 16] };
            args.out.emit(&report, || {
                let mut csv = String::from("name,m,projection_distance\n");
                for d in &report.devices {
                    csv.push_str(&format!("{},{},{}\n", d.name, d.m, d.projection_distance));
                }
                csv
            })
        }
        DevicesAction::Dump { name, given } => {
            let device = load_device(name)?;
            let file = DeviceFile::from_matrix(if *given { &device.given } else { &device.unitary });
            args.out.emit(&file, || {
                let mut csv = String::from("row,col,re,im\n");
                for (j, row) in file.unitary.iter().enumerate() {
                    for (i, [re, im]) in row.iter().enumerate() {
                        csv.push_str(&format!("{j},{i},{re},{im}\n"));
                    }
                }
                csv
            })
        }
    }
}
