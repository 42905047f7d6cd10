use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod config;

use config::{DimensionlessBlock, Overrides, RawConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<braggswap::Error> for CliError {
    fn from(e: braggswap::Error) -> Self {
        match e {
            braggswap::Error::Io(s) => CliError::Io(s),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Cavity entanglement swapping through atomic Bragg momenta.
#[derive(Parser, Debug)]
#[command(name = "braggswap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Single atom–cavity pair: populations against time and the final pair state.
    Entangle(Common),
    /// Two pairs, beam splitters and detectors: click report and heralded states.
    Protocol(Common),
    /// Closed-form amplitudes against the momentum-ladder oracle.
    OracleCompare(Common),
    /// Oracle comparison and protocol over the `sweep` block of the config.
    Sweep(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON configuration file; built-in defaults when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    shots: Option<u64>,
    /// Output directory.
    #[arg(long, alias = "output_dir")]
    out: Option<PathBuf>,
    #[arg(long = "time-scale", alias = "time_scale")]
    time_scale: Option<f64>,
    #[arg(long)]
    l0: Option<u32>,
    #[arg(long = "detection-efficiency", alias = "detection_efficiency")]
    detection_efficiency: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<config::Config, CliError> {
        let raw = match &self.config {
            Some(path) => RawConfig::load(path)?,
            None => RawConfig {
                dimensionless: Some(DimensionlessBlock { g: 1.0, delta: 100.0 }),
                ..Default::default()
            },
        };
        raw.resolve(&Overrides {
            seed: self.seed,
            shots: self.shots,
            out: self.out.clone(),
            time_scale: self.time_scale,
            l0: self.l0,
            detection_efficiency: self.detection_efficiency,
        })
    }
}

fn run(cli: Cli) -> Result<Vec<String>, CliError> {
    match cli.command {
        Command::Entangle(c) => commands::entangle(&c.load()?),
        Command::Protocol(c) => commands::protocol(&c.load()?),
        Command::OracleCompare(c) => commands::oracle_compare_cmd(&c.load()?),
        Command::Sweep(c) => commands::sweep(&c.load()?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            for f in failures {
                eprintln!("assertion failed: {f}");
            }
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
