//! `gamelab` command-line front end. Reports are compact JSON on stdout;
//! CSV when a tabular command is given `--format csv`.

mod args;
mod commands;

use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use commands::{CliError, Context, Output};

const EXIT_DOMAIN: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_VERIFY: u8 = 3;
const EXIT_USAGE: u8 = 64;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(&cli) {
        Ok(Output::Text(t)) => {
            emit(&t);
            ExitCode::SUCCESS
        }
        Ok(Output::Report { report, failed }) => {
            let mut line = serde_json::to_string(&report).expect("report is plain data");
            line.push('\n');
            emit(&line);
            if failed {
                ExitCode::from(EXIT_VERIFY)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            let (code, msg) = match e {
                CliError::Domain(m) => (EXIT_DOMAIN, m),
                CliError::Resource(m) => (EXIT_RESOURCE, m),
                CliError::Usage(m) => (EXIT_USAGE, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

/// Writes to stdout; a closed pipe is not an error worth a panic.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    if cli.jobs == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let ctx = Context {
        jobs: cli.jobs,
        cache: cli.cache.as_deref(),
        memo_cap: commands::memo_cap_from_env()?,
        started: Instant::now(),
    };
    match &cli.command {
        Command::Solve(a) => commands::solve(&ctx, a, false),
        Command::Grundy(a) => commands::solve(&ctx, a, true),
        Command::Ppos(a) => commands::ppos(&ctx, a),
        Command::Heatmap(a) => commands::heatmap(&ctx, a),
        Command::Period(a) => commands::period(&ctx, a),
        Command::Cram(a) => commands::cram(&ctx, a),
        Command::Verify(a) => commands::verify(&ctx, a),
    }
}
