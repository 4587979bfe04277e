use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let args = wtc::cli::Cli::parse();
    match wtc::cli::run(&args, &mut std::io::stdout()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
