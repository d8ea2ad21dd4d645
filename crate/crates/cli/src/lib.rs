//! Command-line driver: configuration, subcommands and output files.

pub mod commands;
pub mod config;
pub mod manifest;
pub mod svg;
pub mod table;

use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use crate::commands::{execute, CliError, Command};
use crate::config::{Overrides, RunConfig};
use crate::manifest::{sha256_hex, Manifest};

#[derive(Debug, Parser)]
#[command(name = "twotier", version, about = "Uplink throughput of a CDMA macrocell with an embedded data access point")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
    /// TOML configuration, or a manifest.json from an earlier run.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    #[arg(long, global = true)]
    pub zeta: Option<f64>,
    /// Total number of users.
    #[arg(long = "n", global = true)]
    pub users: Option<u32>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Sub {
    /// Monte Carlo samples and empirical CDFs of r and tau_u.
    Simulate,
    /// Analytic CDFs and per-n lognormal fits.
    Analyze,
    /// Mean throughputs over a zeta grid, both paths.
    SweepZeta,
    /// Balance point for each user count.
    SweepN,
    /// Balance point under uniform and hotspot layouts.
    Hotspot,
    /// CDF overlays, simulation against analysis.
    Report,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Command {
        match s {
            Sub::Simulate => Command::Simulate,
            Sub::Analyze => Command::Analyze,
            Sub::SweepZeta => Command::SweepZeta,
            Sub::SweepN => Command::SweepN,
            Sub::Hotspot => Command::Hotspot,
            Sub::Report => Command::Report,
        }
    }
}

pub fn load_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let overrides = Overrides {
        seed: cli.seed,
        trials: cli.trials,
        zeta: cli.zeta,
        users: cli.users,
        out: cli.out.clone(),
    };
    Ok(match &cli.config {
        Some(path) => RunConfig::from_file(path, &overrides)?,
        None => RunConfig::parse("", &overrides)?,
    })
}

/// Runs one subcommand end to end and writes its files and manifest.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let started = Instant::now();
    let started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    let cfg = load_config(cli)?;
    let command = Command::from(cli.command);
    let files = execute(command, &cfg)?;

    std::fs::create_dir_all(&cfg.out_dir)?;
    let mut outputs = vec![];
    for (name, contents) in &files {
        std::fs::write(cfg.out_dir.join(name), contents)?;
        outputs.push((name.clone(), sha256_hex(contents.as_bytes())));
    }
    Manifest {
        command: command.name(),
        config: &cfg,
        started_unix,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        outputs,
    }
    .write(&cfg.out_dir)?;
    for (name, _) in &files {
        println!("wrote {}", cfg.out_dir.join(name).display());
    }
    Ok(())
}
