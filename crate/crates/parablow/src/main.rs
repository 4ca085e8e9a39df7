use std::process::ExitCode;

use clap::Parser;
use parablow::cli::{run, Cli};

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}
