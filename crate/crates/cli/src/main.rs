mod args;
mod commands;
mod output;

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;

use args::Cli;
use commands::{dispatch, CliError};

/// Exit codes: 0 success, 1 usage, 2 invalid input, 3 consistency failure.
fn run(argv: impl IntoIterator<Item = OsString>) -> u8 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match dispatch(&cli) {
        Ok(outcome) => outcome,
        Err(e) => return report_error(&e),
    };
    let text = outcome.report.render(cli.format);
    if let Err(e) = output::write(&text, cli.output.as_deref()) {
        return report_error(&CliError::Input(format!("cannot write output: {e}")));
    }
    match outcome.failure {
        Some(msg) => report_error(&CliError::Consistency(msg)),
        None => 0,
    }
}

fn report_error(e: &CliError) -> u8 {
    eprintln!("quiver-dt: {e}");
    e.exit_code()
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
