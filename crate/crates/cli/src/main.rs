//! `gramops`: command-line front end.
//!
//! Exit codes: 0 success, 1 failed verification, 2 usage or input error,
//! 3 capacity exceeded, 4 solver did not converge.

mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(threads) = cli.global.threads {
        if threads == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .expect("global thread pool is configured once");
    }
    match commands::run(&cli) {
        Ok(outcome) => {
            let report = output::envelope(&outcome.command, outcome.result);
            let text = output::render(&report, cli.global.format);
            let written = match &cli.global.output {
                Some(path) => std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display())),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(outcome.exit)
        }
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
