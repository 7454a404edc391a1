use std::process::ExitCode;

use clap::Parser;
use seqfab_cli::args::Cli;
use seqfab_cli::commands::run;

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}
