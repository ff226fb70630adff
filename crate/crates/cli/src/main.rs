//! `hillgap`: spectral gaps of Hill–Schrödinger operators from the command line.
//!
//! Every run writes its result (CSV or JSON) and a manifest echoing the
//! configuration. With `--output-dir` both land in files named after the
//! subcommand; without it the result goes to stdout and the manifest to stderr.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure,
//! 4 invariant violation (interlacing).

mod commands;
mod run;

use std::process::ExitCode;

use clap::Parser;

use crate::run::{Cli, Failure};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure:#}");
            ExitCode::from(match failure {
                Failure::Config(_) => 2,
                Failure::Numeric(_) => 3,
                Failure::Invariant(_) => 4,
            })
        }
    }
}
