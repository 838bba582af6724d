use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use ptpolar_cli::args::Cli;
use ptpolar_cli::{exit_code, run};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(report.text.as_bytes()).is_err() {
                return ExitCode::FAILURE;
            }
            ExitCode::from(report.status)
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
