mod args;
mod commands;
mod settings;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;
use settings::Verbosity;

/// Why a command did not complete.
#[derive(Debug)]
pub enum Failure {
    /// Bad input or configuration. Exit 1.
    Invalid(anyhow::Error),
    /// Something broke while doing valid work. Exit 2.
    Runtime(anyhow::Error),
}

impl Failure {
    pub fn invalid(e: impl Into<anyhow::Error>) -> Self {
        Failure::Invalid(e.into())
    }

    pub fn runtime(e: impl Into<anyhow::Error>) -> Self {
        Failure::Runtime(e.into())
    }
}

/// Outcome of a command that produced its output.
#[derive(Debug, Default)]
pub struct Completed {
    pub warnings: Vec<String>,
}

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_RUNTIME: u8 = 2;
pub const EXIT_WARNINGS: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::from(EXIT_OK),
                _ => ExitCode::from(EXIT_INVALID),
            };
        }
    };
    let config = match settings::load_configs(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: config: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let verbosity = config.verbosity;
    match commands::dispatch(cli.command, &config) {
        Ok(done) => {
            if done.warnings.is_empty() {
                return ExitCode::from(EXIT_OK);
            }
            if verbosity > Verbosity::Quiet {
                for w in &done.warnings {
                    eprintln!("warning: {w}");
                }
            }
            ExitCode::from(EXIT_WARNINGS)
        }
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INVALID)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
