mod commands;
mod config;
mod error;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Format, RunConfig};
use error::CliError;

/// Double-slit pilot-field simulator: dispersing Gaussian channels, guided
/// trajectory ensembles, and screen statistics under beam attenuation.
#[derive(Parser)]
#[command(name = "sweeper", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (flat `key = value` lines); defaults when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Artifact format; overrides `output.format`.
    #[arg(long, value_name = "csv|json")]
    format: Option<String>,
    /// Ensemble seed; overrides `ensemble.seed`.
    #[arg(long, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads for screen-grid evaluation (output is identical for
    /// any value).
    #[arg(long, value_name = "N", default_value_t = 1)]
    threads: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate trajectory ensembles; write per-attenuation tables plus
    /// ordering and bunching summaries.
    Trajectories(Common),
    /// Evaluate screen profiles: linear, zoomed, and log panels per
    /// attenuation, plus the initial distribution.
    Screen(Common),
    /// Tabulate duality, visibility, and bunching metrics across a list of
    /// attenuations.
    Sweep(Common),
    /// Run the self-consistency checks and write a machine-readable report.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Diagnostic: drop the sine cross term from the guiding current.
    #[arg(long, hide = true)]
    zero_sin_term: bool,
}

fn load_config(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(out) = &common.out {
        cfg.out_dir = out.clone();
    }
    if let Some(format) = &common.format {
        cfg.format = match format.as_str() {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => {
                return Err(CliError::Config(format!("--format: expected csv | json, got `{other}`")))
            }
        };
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if common.threads == 0 {
        return Err(CliError::Config("--threads: expected at least 1".into()));
    }
    Ok(cfg)
}

fn run() -> Result<(), CliError> {
    match Cli::parse().command {
        Command::Trajectories(common) => {
            let cfg = load_config(&common)?;
            commands::trajectories::run(&cfg)
        }
        Command::Screen(common) => {
            let cfg = load_config(&common)?;
            commands::screen::run(&cfg, common.threads)
        }
        Command::Sweep(common) => {
            let cfg = load_config(&common)?;
            commands::sweep::run(&cfg, common.threads)
        }
        Command::Verify(args) => {
            let cfg = load_config(&args.common)?;
            commands::verify::run(&cfg, args.zero_sin_term)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("sweeper: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
