mod args;
mod commands;
mod output;

use args::{Cli, Command};
use clap::Parser;
use commands::Outcome;
use resolab::Error;
use std::process::ExitCode;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Domain(_) | Error::InvalidPotential(_) | Error::Inapplicable(_) => 2,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().expect("thread pool configured once");
    }
    let result = match &cli.command {
        Command::Scatter(a) => commands::scatter(a),
        Command::Resonances(a) => commands::resonances(a),
        Command::Verify(a) => commands::verify(a),
        Command::Reconstruct(a) => commands::reconstruct(a),
        Command::Uniqueness(a) => commands::uniqueness(a),
    };
    let out = match result {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &out.text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            print!("{}", out.text);
            Ok(())
        }
    };
    if let Err(msg) = written {
        eprintln!("error: cannot write output: {msg}");
        return ExitCode::from(2);
    }
    match out.outcome {
        Outcome::Pass => ExitCode::SUCCESS,
        Outcome::Fail => ExitCode::from(1),
    }
}
