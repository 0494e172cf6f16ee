mod args;
mod commands;
mod error;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::validation(e.to_string().trim().to_string());
            eprintln!("{}", err.to_json_line());
            return ExitCode::from(err.exit_code());
        }
    };
    let result = match &cli.command {
        Command::Sample(a) => commands::sample(a),
        Command::LimitSample(a) => commands::limit_sample(a),
        Command::FitDist(a) => commands::fit_dist(a),
        Command::FitTimes(a) => commands::fit_times(a),
        Command::Compose(a) => commands::compose(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_json_line());
            ExitCode::from(err.exit_code())
        }
    }
}
