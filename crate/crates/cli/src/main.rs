//! `fadecap`: capacity per unit energy of peak-constrained fading channels.

mod commands;
mod format;
mod model;
mod sweep;
mod verify;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Invalid combination of otherwise well-formed flags.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(
    name = "fadecap",
    version,
    about = "Capacity per unit energy of peak-constrained Rayleigh fading channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Capacity per unit energy, I(P) and the fourthegy bound at one peak power.
    Capacity(commands::CapacityArgs),
    /// Bounds on capacity per unit time for an average power and peak-to-average ratio.
    Bounds(commands::BoundsArgs),
    /// Evaluate a parameter grid and write CSV.
    Sweep(sweep::SweepArgs),
    /// Run numerical verification suites.
    Verify(verify::VerifyArgs),
}

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() || err.downcast_ref::<std::io::Error>().is_some()
    {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<fadecap::Error>() {
        Some(
            fadecap::Error::InvalidParameter(_)
            | fadecap::Error::Table(_)
            | fadecap::Error::OutOfDomain { .. }
            | fadecap::Error::Unsupported(_)
            | fadecap::Error::PeakViolation { .. },
        ) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Capacity(args) => commands::capacity(&args).map(|_| true),
        Command::Bounds(args) => commands::bounds(&args).map(|_| true),
        Command::Sweep(args) => sweep::run(&args).map(|_| true),
        Command::Verify(args) => verify::run(&args),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_VERIFY_FAILED),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
