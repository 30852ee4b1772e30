use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use reusecast::commands;
use reusecast::config::RunConfig;

/// Learn forward reuse distance from a cache trace and benchmark a
/// prediction-driven pseudo-OPT policy against LRU, LFU, 2Q, ARC, and OPT.
#[derive(Parser)]
#[command(name = "reusecast", version)]
struct Cli {
    /// Path to a key = value run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Override the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Trace summary: length, unique blocks, delta compression.
    Stats,
    /// Reuse-distance time series for pattern plots.
    Patterns,
    /// Build the scaled training dataset from the trace.
    Prepare,
    /// Train the forward-reuse-distance model on a prepared dataset.
    Train,
    /// Sweep the configured policies across cache sizes.
    Simulate,
    /// Summarize per-policy average miss ratios against OPT and LRU.
    Compare,
}

fn run(cli: Cli) -> reusecast::Result<()> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    config.apply_overrides(cli.seed, cli.out.clone());
    match cli.command {
        Command::Stats => {
            commands::cmd_stats(&config)?;
        }
        Command::Patterns => {
            commands::cmd_patterns(&config)?;
        }
        Command::Prepare => {
            commands::cmd_prepare(&config)?;
        }
        Command::Train => {
            commands::cmd_train(&config)?;
        }
        Command::Simulate => {
            commands::cmd_simulate(&config)?;
        }
        Command::Compare => {
            commands::cmd_compare(&config)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("reusecast: {e}");
            ExitCode::from(2)
        }
    }
}
