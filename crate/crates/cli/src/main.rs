use std::process::ExitCode;

use clap::Parser;
use tracing_subscriber::EnvFilter;

use pk_forge_cli::commands::{run, Cli, CliError};

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if !matches!(e, CliError::Failed) {
                eprintln!("pkf: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
