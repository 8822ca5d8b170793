//! Command-line front end for `kms-thermo`: model files, the bundled
//! catalog, and one subcommand per verification.

pub mod catalog;
pub mod commands;
pub mod model;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::{run, Outcome};

/// A malformed model, flag or file. Maps to exit status 2.
#[derive(Debug, Clone, PartialEq)]
pub struct InputError(pub String);

impl InputError {
    pub fn new(msg: impl Into<String>) -> Self {
        InputError(msg.into())
    }
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

/// Environment variable seeding every randomized sweep.
pub const SEED_ENV: &str = "KMS_THERMO_SEED";
pub const DEFAULT_SEED: u64 = 20_240_917;

pub fn seed_from_env() -> Result<u64, InputError> {
    match std::env::var(SEED_ENV) {
        Ok(s) => s.trim().parse().map_err(|_| InputError::new(format!("{SEED_ENV}={s:?} is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "kms-thermo", version, about = "Dimensions, eigenmeasures and KMS checks for expanding dynamical systems")]
pub struct Cli {
    /// Replace the potential of a symbolic model with the one in this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub potential: Option<String>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Run sweeps on a single thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BetaArg {
    Auto,
    Value(f64),
}

fn parse_beta(s: &str) -> Result<BetaArg, String> {
    if s == "auto" {
        return Ok(BetaArg::Auto);
    }
    s.parse::<f64>()
        .ok()
        .filter(|b| b.is_finite())
        .map(BetaArg::Value)
        .ok_or_else(|| format!("expected a number or 'auto', got {s:?}"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CircleCheck {
    Scaling,
    QuasiInvariance,
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OctafoldCheck {
    Dimension,
    Entropy,
    Scaling,
    MeasureScaling,
    Midpoints,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hausdorff dimension / inverse temperature of a model.
    Dimension {
        #[arg(long)]
        model: String,
    },
    /// Eigenmeasure masses of cylinders.
    Measure {
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "auto", value_parser = parse_beta)]
        beta: BetaArg,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Quasi-invariance defects of the measure under the shift.
    QuasiInvariance {
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "auto", value_parser = parse_beta)]
        beta: BetaArg,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// KMS condition over all pairs of bisections.
    KmsCheck {
        #[arg(long)]
        model: String,
        #[arg(long, default_value = "auto", value_parser = parse_beta)]
        beta: BetaArg,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Entropy from the scaling factor, against the topological entropy.
    Entropy {
        #[arg(long)]
        model: String,
    },
    /// Distance between two eventually periodic points, written `pre(period)`.
    Metric {
        #[arg(long)]
        model: String,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
    },
    /// Checks on a circle covering.
    Circle {
        /// Weight expression in `t`.
        #[arg(long, conflicts_with = "model")]
        f: Option<String>,
        #[arg(long)]
        model: Option<String>,
        #[arg(long, value_enum)]
        check: CircleCheck,
        #[arg(long)]
        tol: Option<f64>,
        /// Base point of the scaling probe.
        #[arg(long, default_value_t = 0.3)]
        x: f64,
        /// Number of random sections.
        #[arg(long, default_value_t = 20)]
        sections: usize,
    },
    /// Checks on the Sierpinski octafold.
    Octafold {
        #[arg(long, value_enum)]
        check: OctafoldCheck,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Lists the bundled models, or prints one as a model file.
    Catalog { name: Option<String> },
}
