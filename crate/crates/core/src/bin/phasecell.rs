use std::process::ExitCode;

use clap::Parser;
use phasecell::cli::{run, Cli, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli.command, cli.settings) {
        Ok(outcome) => {
            for report in &outcome.reports {
                println!("{report}");
            }
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
            ExitCode::from(outcome.exit_code())
        }
        Err(err) => {
            eprintln!("phasecell: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
