use std::io;
use std::process::ExitCode;

use clap::Parser;
use jbender_service::cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli, &mut io::stdout().lock(), &mut io::stderr());
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
