//! `schmidt`: play Schmidt games, scan badness, follow flow trajectories.
//!
//! Exit status: 0 when every check passed, 1 on a referee violation or a
//! failed verification, 2 on bad input or an internal error.

mod artifact;
mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;

use config::{Mode, Overrides, RawConfig, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "schmidt", version, about = "Schmidt games and badly approximable affine forms")]
struct Cli {
    /// Mode to run; overrides `mode` in the config file.
    mode: Option<Mode>,
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Float precision in bits.
    #[arg(long)]
    precision: Option<u32>,
    /// Validate and re-run a transcript instead of running a mode.
    #[arg(long, conflicts_with_all = ["config", "mode"])]
    replay: Option<PathBuf>,
}

fn main_inner(cli: Cli) -> Result<bool> {
    if let Some(path) = &cli.replay {
        return run::replay(path);
    }
    let raw = match &cli.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            RawConfig::parse(&text)?
        }
        None if cli.mode == Some(Mode::Demo) => RawConfig::default(),
        None => anyhow::bail!("--config is required (only `demo` runs without one)"),
    };
    let o = Overrides { mode: cli.mode, out: cli.out, seed: cli.seed, precision: cli.precision };
    let cfg = RunConfig::from_raw(&raw, &o)?;
    run::run(&cfg)
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
