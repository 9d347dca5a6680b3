use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::Serialize;

/// How the characteristic time behind the analytic profile is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    Numeric,
    Quadratic,
    Cubic,
}

impl SolveMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveMethod::Numeric => "numeric",
            SolveMethod::Quadratic => "quadratic",
            SolveMethod::Cubic => "cubic",
        }
    }

    pub fn truncation(&self) -> Option<usize> {
        match self {
            SolveMethod::Numeric => None,
            SolveMethod::Quadratic => Some(2),
            SolveMethod::Cubic => Some(3),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Parameters shared by every subcommand. `--skew` and `--capacity` may be
/// repeated; the run covers their full cross product.
#[derive(Debug, Clone, Args)]
pub struct RunSpec {
    /// Number of objects N.
    #[arg(long = "objects", default_value_t = 1000)]
    pub n_objects: usize,

    /// Skewness a (repeatable).
    #[arg(long = "skew")]
    pub skewness: Vec<f64>,

    /// Cache capacity C (repeatable).
    #[arg(long = "capacity")]
    pub capacity: Vec<usize>,

    #[arg(long, value_enum, default_value_t = SolveMethod::Cubic)]
    pub method: SolveMethod,

    /// Apply proportional normalization to the analytic profile.
    #[arg(long)]
    pub normalize: bool,

    /// Simulated requests per cell (0 disables simulation).
    #[arg(long = "requests", default_value_t = 0)]
    pub n_requests: u64,

    /// Uncounted requests before measuring (defaults to C).
    #[arg(long)]
    pub warmup: Option<u64>,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Add the exact Markov-chain profile (tiny instances only).
    #[arg(long)]
    pub oracle: bool,

    /// Do not fall back to the numeric time when a closed form has no
    /// admissible root.
    #[arg(long)]
    pub no_fallback: bool,

    #[arg(long = "format", value_enum, default_value_t = OutputFormat::Csv)]
    pub output_format: OutputFormat,

    /// Output file (stdout when absent).
    #[arg(long = "out")]
    pub output_path: Option<PathBuf>,
}

impl RunSpec {
    /// `(a, C)` cells ordered by skewness, then capacity.
    pub fn grid(&self) -> Vec<(f64, usize)> {
        self.skewness
            .iter()
            .flat_map(|&a| self.capacity.iter().map(move |&c| (a, c)))
            .collect()
    }

    pub fn fallback(&self) -> bool {
        !self.no_fallback
    }

    /// Seed of the `index`-th grid cell, so cells stay independent and
    /// reproducible regardless of evaluation order.
    pub fn cell_seed(&self, index: usize) -> u64 {
        self.seed.wrapping_add(index as u64)
    }
}
