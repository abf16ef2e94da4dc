use std::process::ExitCode;

use clap::Parser;
use spindiff_cli::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = spindiff_cli::run(&cli);
    ExitCode::from(code as u8)
}
