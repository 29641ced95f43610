//! `qdcascade`: simulate cascade photon pairs, analyze coincidence streams,
//! reconstruct two-photon states, and collect the results.

mod analyze;
mod config;
mod error;
mod output;
mod report;
mod simulate;
mod tomo;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "qdcascade", version, about = "Polarization-entangled photon pairs from a quantum-dot cascade")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate three-channel click streams for a list of analyzer settings.
    Simulate(simulate::SimulateArgs),
    /// Histogram and normalize streams; report visibilities, fidelity, CHSH
    /// and tomography counts where the settings allow.
    Analyze(analyze::AnalyzeArgs),
    /// Maximum-likelihood state reconstruction from 36-setting counts.
    Tomo(tomo::TomoArgs),
    /// Merge the summaries of earlier runs into one report.
    Report(report::ReportArgs),
}

fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Simulate(a) => simulate::run(a),
        Command::Analyze(a) => analyze::run(a),
        Command::Tomo(a) => tomo::run(a),
        Command::Report(a) => report::run(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => e.exit(),
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("{}", error::CliError::new("usage", first).line());
            return ExitCode::from(2);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::FAILURE
        }
    }
}
