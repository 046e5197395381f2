//! `dembed`: runs the discrete schemes and diagnostics from the command line.
//!
//! Exit codes: 0 success, 1 self-test failure, 2 configuration error,
//! 3 numerical failure.

mod commands;
mod config;
mod registry;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Selftest(Vec<String>),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Selftest(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Selftest(names) => write!(f, "self-test failed: {}", names.join(", ")),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dembed", version, about = "Discrete-calculus schemes, convergence studies and diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON file with RunConfig keys; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    run: RunConfig,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate an ODE with one scheme and write the trajectory as CSV.
    Integrate(Common),
    /// Measure sup-norm errors over a sequence of step counts.
    Converge(Common),
    /// Compare differential and integral embeddings at orders 1 to 3.
    Cohere(Common),
    /// March the discrete Euler-Lagrange equation and report its energy.
    Variational(Common),
    /// Run the invariant suite and print a pass/fail table.
    Selftest(Common),
}

fn resolve(common: Common) -> Result<RunConfig, CliError> {
    let base = match &common.config {
        Some(path) => RunConfig::from_json_file(path)?,
        None => RunConfig::default(),
    };
    Ok(base.overlay(common.run))
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

type Action = fn(&RunConfig) -> Result<String, CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, action): (Common, Action) = match cli.command {
        Command::Integrate(c) => (c, commands::integrate),
        Command::Converge(c) => (c, commands::converge),
        Command::Cohere(c) => (c, commands::cohere),
        Command::Variational(c) => (c, commands::variational),
        Command::Selftest(c) => {
            let cfg = resolve(c)?;
            let (report, status) = commands::selftest(&cfg);
            emit(&cfg, &report)?;
            return status;
        }
    };
    let cfg = resolve(common)?;
    let text = action(&cfg)?;
    emit(&cfg, &text)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dembed: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
