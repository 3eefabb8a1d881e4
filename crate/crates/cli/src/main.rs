//! `zscale`: batch front end for the scaling toolkit.

mod commands;
mod config;
mod error;
mod systems;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Command, Format, RunConfig};
use error::CliError;

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "ZSCALE_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "zscale", version, about = "Integrated diffraction intensity Z(k) near k = 0: producers, scans and fits")]
#[command(after_help = systems::help_text())]
struct Cli {
    #[command(subcommand)]
    command: TopCommand,
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; defaults to a file in $ZSCALE_OUT_DIR, else stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write the run's configuration as JSON, for `repro`.
    #[arg(long, global = true)]
    save_config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum TopCommand {
    #[command(flatten)]
    Run(Command),
    /// Replay a stored run configuration.
    Repro {
        /// JSON file written by --save-config.
        config: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = match cli.command {
        TopCommand::Run(command) => RunConfig { command, format: cli.format, out: cli.out },
        TopCommand::Repro { config } => {
            let text = std::fs::read_to_string(&config).map_err(|e| CliError::Io { path: config.clone(), source: e })?;
            let mut stored: RunConfig = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", config.display())))?;
            if cli.out.is_some() {
                stored.out = cli.out;
            }
            stored
        }
    };
    if let Some(path) = &cli.save_config {
        let json = serde_json::to_string_pretty(&config).expect("config serialises");
        std::fs::write(path, json + "\n").map_err(|e| CliError::Io { path: path.clone(), source: e })?;
    }
    commands::execute(&config)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
