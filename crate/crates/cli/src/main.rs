//! Command-line front end for fiber-loop detector modeling: simulation,
//! reconstruction, Fisher analysis, calibration, and source transforms, tied
//! together by file-based interchange.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

#[derive(Parser)]
#[command(
    name = "fiberloop",
    version,
    about = "Multi-channel fiber-loop photon counter toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw detection events and write a histogram CSV.
    Simulate(CommonArgs),
    /// Reconstruct photon statistics from a histogram CSV by
    /// maximum-likelihood EM.
    Reconstruct(ReconstructArgs),
    /// Fisher information report, with an optional equivalent-efficiency
    /// sweep.
    Fisher(FisherArgs),
    /// Estimate channel efficiencies from a Poissonian calibration run.
    Calibrate(CalibrateArgs),
    /// Equivalent ideal-detector efficiency of a (detector, source) pair.
    EquivEff(CommonArgs),
    /// Photon statistics of an intensity law.
    Transform(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment manifest (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master random seed (overrides the manifest).
    #[arg(long)]
    seed: Option<u64>,
    /// Photon-number cutoff (overrides the manifest).
    #[arg(long)]
    cutoff: Option<usize>,
    /// Pulse count (overrides the manifest).
    #[arg(long)]
    pulses: Option<u64>,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReconstructArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Input histogram CSV.
    #[arg(long)]
    histogram: PathBuf,
    /// Optional likelihood-trace CSV path.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct FisherArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Detector-efficiency sweep grid as start:stop:count.
    #[arg(long)]
    sweep: Option<String>,
    /// Output path of the sweep CSV (requires --sweep).
    #[arg(long)]
    sweep_out: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Input calibration histogram CSV.
    #[arg(long)]
    histogram: PathBuf,
    /// Mean photons per pulse of the Poissonian calibration source.
    #[arg(long)]
    mu: f64,
}

/// Error categories map one-to-one onto exit codes so scripts can
/// distinguish schema problems from numerics.
#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Domain(fiberloop_core::Error),
    #[error("{0}")]
    Numeric(fiberloop_core::Error),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Domain(_) => "domain",
            CliError::Numeric(_) => "numeric",
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Domain(_) => 4,
            CliError::Numeric(_) => 5,
        }
    }
}

impl From<fiberloop_core::Error> for CliError {
    fn from(err: fiberloop_core::Error) -> Self {
        use fiberloop_core::Error::*;
        match err {
            IllConditioned { .. } | RootNotBracketed { .. } => CliError::Numeric(err),
            Parse(_) => CliError::Config(err.to_string()),
            _ => CliError::Domain(err),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate(args),
        Command::Reconstruct(args) => commands::reconstruct(args),
        Command::Fisher(args) => commands::fisher(args),
        Command::Calibrate(args) => commands::calibrate(args),
        Command::EquivEff(args) => commands::equiv_eff(args),
        Command::Transform(args) => commands::transform(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}: {}", err.kind(), config::one_line(&err.to_string()));
            ExitCode::from(err.code())
        }
    }
}
