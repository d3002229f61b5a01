//! Config-driven command-line front end.
//!
//! Each command reads one TOML [`RunConfig`], writes into `--out`, and
//! returns an exit code: 0 on success, 1 when an estimation fails or a
//! validation property does not hold, 2 for usage and input errors. Every
//! file written carries a comment header with the crate version and the
//! SHA-256 of the config, so identical configs and inputs give
//! byte-identical outputs.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{cmd_irf, cmd_narrative, cmd_shocks, cmd_simulate, cmd_validate, CommandError};
pub use config::{DataPaths, IrfSection, LoadedConfig, MonthlySection, RunConfig, ShockSection, ValidateSection};
pub use svg::irf_svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "elecshock", version, about = "Election shocks from prediction markets and their impulse responses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
    /// Seed override for simulation and validation.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the shock series and write diagnostics.
    Shocks(CommonArgs),
    /// Estimate impulse responses and plot them.
    Irf(CommonArgs),
    /// Narrative-window shocks around listed events.
    Narrative(CommonArgs),
    /// Write a synthetic data set and a config that runs on it.
    Simulate(CommonArgs),
    /// Run the oracle and Monte Carlo property suite.
    Validate(CommonArgs),
}

/// Runs a parsed command and returns its exit code.
pub fn run(cli: Cli) -> i32 {
    let (name, result) = match &cli.command {
        Command::Shocks(a) => ("shocks", cmd_shocks(a)),
        Command::Irf(a) => ("irf", cmd_irf(a)),
        Command::Narrative(a) => ("narrative", cmd_narrative(a)),
        Command::Simulate(a) => ("simulate", cmd_simulate(a)),
        Command::Validate(a) => ("validate", cmd_validate(a)),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("elecshock {name}: {e}");
            e.exit_code()
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
