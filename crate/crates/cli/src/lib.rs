//! Command-line front end for swprofile: closed-form constants, direct
//! eigenvalue solves and reproducible verification runs driven by JSON
//! configuration files.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use error::CliError;

/// Environment variable holding the worker-thread count.
pub const WORKERS_ENV: &str = "SWPROFILE_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "swprofile", version, about = "Neumann eigenvalue asymptotics of small geodesic balls")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of dimension constants with identity checks.
    Constants {
        /// Dimensions, e.g. "2-12" or "2,3,5".
        #[arg(long, default_value = "2-12")]
        dims: String,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
        /// Also write the table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// μ₂ of the Euclidean unit ball.
    Mu2Ball {
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        json: bool,
    },
    /// Direct eigenvalue solve from a config file.
    Solve {
        #[arg(long)]
        config: PathBuf,
    },
    /// Constant term of μ₂ on small geodesic balls.
    VerifyBall {
        #[arg(long)]
        config: PathBuf,
    },
    /// Constant term of μ₂ on small geodesic ellipsoids.
    VerifyEllipsoid {
        #[arg(long)]
        config: PathBuf,
    },
    /// Local profile slope of a space form.
    SwProfile {
        #[arg(long)]
        config: PathBuf,
    },
    /// Ordering of geodesic-ball eigenvalues for two curvatures.
    Compare {
        #[arg(long)]
        config: PathBuf,
    },
}

/// Sizes the global worker pool from [`WORKERS_ENV`] when it is set.
pub fn configure_workers() -> Result<(), CliError> {
    let Ok(value) = std::env::var(WORKERS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Config(format!("{WORKERS_ENV} must be a positive integer, got '{value}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot start {n} workers: {e}")))
}

pub fn run(cli: Cli) -> Result<i32, CliError> {
    configure_workers()?;
    match cli.command {
        Command::Constants { dims, json, out } => {
            commands::cmd_constants(&commands::parse_dims(&dims)?, json, out.as_deref())
        }
        Command::Mu2Ball { dim, json } => commands::cmd_mu2_ball(dim, json),
        Command::Solve { config } => commands::cmd_config("solve", &config),
        Command::VerifyBall { config } => commands::cmd_config("verify-ball", &config),
        Command::VerifyEllipsoid { config } => commands::cmd_config("verify-ellipsoid", &config),
        Command::SwProfile { config } => commands::cmd_config("sw-profile", &config),
        Command::Compare { config } => commands::cmd_config("compare", &config),
    }
}
