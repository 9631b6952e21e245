mod args;
mod commands;
mod config;
mod verify;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Exit status beyond clap's own parse errors.
#[derive(Debug)]
pub enum Failure {
    /// Bad configuration: exit 2.
    Usage(String),
    /// The computation ran and failed, or could not finish: exit 1.
    Failed(String),
}

impl From<semijacobi::Error> for Failure {
    fn from(e: semijacobi::Error) -> Self {
        use semijacobi::Error as E;
        match e {
            E::Domain(_) | E::InvalidInput(_) | E::Grid(_) | E::IndexOutOfRange { .. } => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Failed(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Failed(format!("i/o: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Table(a) => commands::table(&cli, a),
        Command::Verify(a) => verify::run(&cli, a),
        Command::Asymptotics(a) => commands::asymptotics(&cli, a),
        Command::Riccati(a) => commands::riccati(&cli, a),
        Command::Iterate(a) => commands::iterate(&cli, a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Failed(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
