//! Command-line front end for discrete FDR procedures.

mod args;
mod commands;
mod error;
mod input;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};
use error::{CliError, CliResult};

/// Sizes the global thread pool from `DISCRETEFDR_THREADS` (0 = automatic).
fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("DISCRETEFDR_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().map_err(|_| {
        CliError::usage(format!(
            "DISCRETEFDR_THREADS must be a count, got '{value}'"
        ))
    })?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::usage(e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    match &cli.command {
        Command::Analyze(a) => commands::analyze(a),
        Command::Plotdata(a) => commands::plotdata(a),
        Command::Bench(a) => commands::bench(a),
        Command::Validate(a) => commands::validate(a),
        Command::Simulate(a) => commands::simulate(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
