//! Command-line front end: prices to exceedances, exceedances to posterior
//! draws and plot data.

pub mod args;
pub mod commands;

use std::process::ExitCode;

pub use args::{Cli, Command, Order, RunConfig};
pub use commands::{cmd_fit, cmd_pipeline, cmd_simulate, cmd_summarize, prepare, Prepared};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] bevcp::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    /// 2 for bad input, 3 for numerical failure.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Core(e) if e.is_numerical() => ExitCode::from(3),
            _ => ExitCode::from(2),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Runs a parsed command line.
pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Pipeline(a) => cmd_pipeline(&a.resolve()?).map(|_| ()),
        Command::Fit(a) => cmd_fit(&a.resolve()?).map(|_| ()),
        Command::Simulate(a) => cmd_simulate(&a.spec, &a.out).map(|_| ()),
        Command::Summarize(a) => cmd_summarize(&a).map(|_| ()),
    }
}
