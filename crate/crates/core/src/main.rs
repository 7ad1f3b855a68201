use std::process::ExitCode;

use clap::Parser;
use lscheck::cli::{run, Cli};

fn main() -> ExitCode {
    run(Cli::parse())
}
