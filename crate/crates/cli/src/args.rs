use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(
    name = "photon-reader",
    version,
    about = "Photon-efficiency limits of optical memory reading",
    long_about = "Capacity and photon-information-efficiency curves, Monte Carlo read \
                  simulations, error-exponent pixel budgets and analytic block-size budgets \
                  for coherent-state and single-photon readers.\n\n\
                  Set PHOTON_READER_THREADS to cap the worker threads (0 = all cores)."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Capacity and bits per photon against photons per pixel, per scheme.
    PieCurve,
    /// Bits per photon against bits per pixel, per scheme.
    Tradeoff,
    /// Monte Carlo word-error estimate for a Green Machine or W-state read.
    Simulate,
    /// Random-coding pixel budgets over the (n_s, PIE) plane.
    Exponent,
    /// Smallest analytic block size per scheme and transmissivity.
    Budget,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::PieCurve => "pie-curve",
            Command::Tradeoff => "tradeoff",
            Command::Simulate => "simulate",
            Command::Exponent => "exponent",
            Command::Budget => "budget",
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// Flags shared by every subcommand. Anything left unset falls back to the
/// config file, then to the subcommand's defaults.
#[derive(Args, Debug, Default, Clone)]
pub struct Flags {
    /// TOML file with any of the options below (snake_case keys).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Comma-separated scheme names, or `all`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub schemes: Option<Vec<String>>,

    /// Smallest photons per pixel on the grid.
    #[arg(long, global = true)]
    pub ns_min: Option<f64>,

    /// Largest photons per pixel on the grid.
    #[arg(long, global = true)]
    pub ns_max: Option<f64>,

    /// Number of log-spaced grid points.
    #[arg(long, global = true)]
    pub ns_points: Option<usize>,

    /// Photons per pixel for a single coherent simulation.
    #[arg(long, global = true)]
    pub n_s: Option<f64>,

    /// Block length (pixels per codeword), a power of two.
    #[arg(long, global = true)]
    pub m: Option<u64>,

    /// End-to-end transmissivity; a comma-separated list for `budget`.
    #[arg(long, global = true, value_delimiter = ',')]
    pub kappa: Option<Vec<f64>>,

    /// Probe copies sent per read (W state).
    #[arg(long, global = true)]
    pub k_copies: Option<u32>,

    /// Target word-error probability.
    #[arg(long, global = true)]
    pub epsilon: Option<f64>,

    /// Target bits per photon; comma-separated for several.
    #[arg(long, global = true, value_delimiter = ',')]
    pub pie: Option<Vec<f64>>,

    /// Lower edge of the PIE axis of the exponent table.
    #[arg(long, global = true)]
    pub pie_min: Option<f64>,

    /// Upper edge of the PIE axis of the exponent table.
    #[arg(long, global = true)]
    pub pie_max: Option<f64>,

    /// Points on the PIE axis of the exponent table.
    #[arg(long, global = true)]
    pub pie_points: Option<usize>,

    /// Monte Carlo trials.
    #[arg(long, global = true)]
    pub trials: Option<u64>,

    /// Master seed of the trial streams.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output file; standard output when absent.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Leave wall-clock fields out so repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub deterministic: bool,
}
