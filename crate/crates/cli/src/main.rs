use std::process::ExitCode;

use clap::Parser;

use qrc_cli::args::Cli;
use qrc_cli::commands::run;

fn main() -> ExitCode {
    // Raw args (after the binary name) are recorded in output manifests.
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    match run(cli, &argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            error.exit_code()
        }
    }
}
