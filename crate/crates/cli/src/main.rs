//! `capcalc`: command-line front end for the capacity library.
//!
//! Exit status: 0 on success, 1 when a verification fails, 2 on usage or
//! input errors.

mod args;
mod commands;
mod config;
mod output;
mod suite;

use std::process::ExitCode;

use clap::Parser;
use thiserror::Error;

use args::Cli;
use config::{Config, ConfigError};

/// Anything that stops a command from producing its output.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Capacity(#[from] capcalc_core::capacity::CapacityError),
    #[error(transparent)]
    Class(#[from] capcalc_core::classes::ClassError),
    #[error(transparent)]
    Search(#[from] capcalc_core::search::SearchError),
    #[error(transparent)]
    Ech(#[from] capcalc_core::ech::EchError),
    #[error(transparent)]
    Weight(#[from] capcalc_core::weights::WeightError),
    #[error(transparent)]
    ContinuedFraction(#[from] capcalc_core::cfrac::CfError),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs as usize)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot configure {jobs} worker threads: {e}")))?;
    }
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    let report = commands::dispatch(&cli.command, &cfg)?;
    print!("{}", output::render(&report, cli.format));
    Ok(report.ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
