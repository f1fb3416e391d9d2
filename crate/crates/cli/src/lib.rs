//! Command-line experiments over the `fracfield` library.

pub mod bundle;
pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{Context, Overrides, SolverKind};
use config::ExperimentConfig;
use error::CliResult;
use fracfield::propagation::Model;

#[derive(Debug, Parser)]
#[command(name = "fracfield", version, about = "Fractional Fourier optics workbench")]
pub struct Cli {
    /// Flat TOML experiment configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Fractional order; measurements become order-only.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub order: Option<f64>,
    /// Propagation distance in meters.
    #[arg(long, global = true)]
    pub distance: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Propagate the object with one model and write the detected intensity.
    Propagate {
        /// frft, sft, tf or reference.
        #[arg(long)]
        model: Option<Model>,
    },
    /// Score the fast propagators against the quadrature reference over a distance sweep.
    Compare,
    /// Recover an object from one simulated magnitude measurement.
    Retrieve {
        #[arg(long, value_enum)]
        solver: Option<SolverKind>,
        /// Record PSNR traces; without a value the configured object is the truth.
        #[arg(long, num_args = 0..=1)]
        truth: Option<Option<PathBuf>>,
    },
    /// Shift and flip sensitivity of FrFT magnitudes.
    Ambiguity,
    /// Wigner–Ville, fractional Wigner–Ville and rotated-line maps of a 1D signal.
    Wvd {
        /// 1D `.npy` signal; a windowed chirp when absent.
        #[arg(long)]
        signal: Option<PathBuf>,
        #[arg(long, allow_negative_numbers = true)]
        alpha: Option<f64>,
    },
    /// Write a measurement and its operator description for external solvers.
    ExportForward,
    /// Write the procedural test scene as PGM.
    Scene {
        #[arg(long, default_value_t = 256)]
        n: usize,
    },
}

pub fn run(cli: Cli) -> CliResult<String> {
    let cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    let ov = Overrides {
        seed: cli.seed,
        out: cli.out.clone(),
        order: cli.order,
        distance: cli.distance,
    };
    let ctx = Context::new(cfg, &ov)?;
    match cli.command {
        Command::Propagate { model } => commands::propagate(&ctx, model),
        Command::Compare => commands::compare(&ctx),
        Command::Retrieve { solver, truth } => commands::retrieve(&ctx, solver, truth),
        Command::Ambiguity => commands::ambiguity(&ctx),
        Command::Wvd { signal, alpha } => commands::wvd(&ctx, signal, alpha),
        Command::ExportForward => commands::export_forward(&ctx),
        Command::Scene { n } => commands::scene(&ctx, n),
    }
}
