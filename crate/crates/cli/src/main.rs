//! `pseudoboson`: runs the library's numerical checks and tables from the shell.
//!
//! Exit status is 0 when every check passes, 1 when a check fails (the report
//! is still written and lists the failures), and 2 for invalid input.

mod commands;
mod config;
mod parse;
mod report;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] pseudoboson::Error),
    #[error("i/o error: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "pseudoboson", version, about = "Numerical checks for deformed Hermite families and pseudo-boson operators")]
pub struct Cli {
    /// Plain `key = value` file of flags for the subcommand; explicit flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Cmd,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Seed for random test matrices.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Report path (written atomically); stdout when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Override the default tolerance of the primary check.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Complex Hermite polynomials: evaluation and orthonormality.
    Hermite(commands::HermiteArgs),
    /// Representation blocks T^L(g) and their group laws.
    Rep(commands::RepArgs),
    /// Deformed families: construction routes, norms and biorthogonality.
    Deformed(commands::DeformedArgs),
    /// Norm bound sandwich and growth of norm products.
    Bounds(commands::BoundsArgs),
    /// Asymptotic estimates of the norm diagonal against exact sums.
    Asympt(commands::AsymptArgs),
    /// Truncated ladder, Cuntz and pseudo-boson operator identities.
    Fock(commands::FockArgs),
    /// Displacement algebra, bi-coherent states, kernel and resolution of identity.
    Displace(commands::DisplaceArgs),
    /// Weight operators and linear quantization.
    Quantize(commands::QuantizeArgs),
    /// The numbered acceptance battery.
    Suite(commands::SuiteArgs),
}

fn parse_cli() -> Result<Cli, ExitCode> {
    let mut cmd = Cli::command().mut_subcommands(|s| s.args_override_self(true));
    cmd.build();
    let args = match config::expand(std::env::args_os().collect(), &cmd) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return Err(ExitCode::from(2));
        }
    };
    let matches = cmd.try_get_matches_from(args).map_err(|e| {
        let _ = e.print();
        ExitCode::from(if e.use_stderr() { 2 } else { 0 })
    })?;
    Cli::from_arg_matches(&matches).map_err(|e| {
        let _ = e.print();
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    let cli = match parse_cli() {
        Ok(c) => c,
        Err(code) => return code,
    };
    let (report, common) = match commands::run(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = report.render(common.format).and_then(|bytes| report::emit(&bytes, common.out.as_deref()));
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        eprintln!("failed checks: {}", report.failures.join(", "));
        ExitCode::from(1)
    }
}
