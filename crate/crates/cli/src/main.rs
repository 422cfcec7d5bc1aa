//! `casimir`: command-line front end to `casimir-core`.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;

use casimir_core::Error;
use config::Cli;

/// Exit status for each failure class.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::InvalidParameter(_) | Error::Domain(_) | Error::OutsideLambda { .. } => 1,
        Error::Uncertifiable(_) => 2,
        Error::CrossRouteDisagreement { .. } => 3,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let run = match cli.resolve() {
        Ok(run) => run,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let artifact = match commands::execute(&cli.command, &run) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Err(e) = output::emit(&run, &artifact) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(artifact.status)
}
