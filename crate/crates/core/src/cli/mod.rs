//! Command-line front end: configuration, subcommand dispatch and report
//! serialization.

mod commands;
mod config;
mod io;

pub use commands::{dispatch, Outcome};
pub use config::{
    AuditBlock, DataBlock, GridBlock, KernelBlock, LawBlock, MmsBlock, NondimensionalBlock, RawConfig, RotationBlock,
    RunConfig, StudyKind, SweepBlock, TimeBlock,
};
pub use io::{snapshot_csv, write_json, ErrorRecord, CSV_HEADER};

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

/// Process exit status for a failed command.
pub const EXIT_ERROR: i32 = 1;
/// Process exit status when the kernel verification finds violations.
pub const EXIT_VIOLATIONS: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Solver(#[from] crate::solver::SolverError),
    #[error(transparent)]
    Audit(#[from] crate::auditor::AuditError),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io(_) => "io",
            CliError::Solver(_) => "solver",
            CliError::Audit(_) => "audit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Integrate the configured problem and write snapshot CSVs and a manifest.
    Simulate,
    /// Integrate the configured problem and audit the estimates on it.
    Audit,
    /// Sample the constitutive kernel inequalities.
    VerifyKernel,
    /// Repeat the audit over a range of rotation speeds.
    Sweep,
    /// Run a manufactured-solution convergence study.
    Mms,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Audit => "audit",
            Command::VerifyKernel => "verify-kernel",
            Command::Sweep => "sweep",
            Command::Mms => "mms",
        }
    }
}

#[derive(Debug, Clone, Parser)]
#[command(name = "forchheimer", version, about = "Rotating generalized Forchheimer flow: solver and estimate audits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration; `verify-kernel` and `mms` fall back to defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, created when missing.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Overrides the configuration seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of kernel samples for `verify-kernel`.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Comma-separated estimate ids for `audit` and `sweep`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub estimates: Option<Vec<String>>,
    /// Suppress the summary printed on success.
    #[arg(long, global = true)]
    pub quiet: bool,
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli) {
        Ok(outcome) => {
            if !cli.quiet {
                println!("{}", outcome.summary);
            }
            outcome.exit_code
        }
        Err(e) => {
            let record = ErrorRecord::new(cli.command.name(), &e);
            let text = serde_json::to_string_pretty(&record).expect("error records serialize");
            eprintln!("{text}");
            if std::fs::create_dir_all(&cli.out).is_ok() {
                let _ = std::fs::write(cli.out.join("error.json"), text + "\n");
            }
            EXIT_ERROR
        }
    }
}
