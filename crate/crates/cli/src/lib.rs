//! Command-line front end: characteristic-time tables, per-object hit-ratio
//! profiles, and validation of one profile source against another over a
//! grid of `(a, C)` cells.

pub mod compute;
pub mod output;
pub mod spec;

use std::fs;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use compute::{CellError, FailureKind, ProfileSource, Thresholds};
use output::Metadata;
use spec::RunSpec;

#[derive(Debug, Parser)]
#[command(name = "lru-chartime", version, about = "LRU hit probabilities from the characteristic time")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact and closed-form characteristic time for every (a, C) cell.
    Chartime(RunSpec),
    /// Per-object hit probabilities (analytic, normalized, simulated, oracle).
    Hitratio(RunSpec),
    /// Error metrics between two profile sources, checked against thresholds.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub spec: RunSpec,

    #[arg(long, value_enum, default_value_t = ProfileSource::Analytic)]
    pub left: ProfileSource,

    #[arg(long, value_enum, default_value_t = ProfileSource::Simulated)]
    pub right: ProfileSource,

    /// Fail (exit 3) when the mean absolute error exceeds this.
    #[arg(long)]
    pub max_mae: Option<f64>,

    /// Fail (exit 3) when the largest per-object error exceeds this.
    #[arg(long)]
    pub max_abs: Option<f64>,

    /// Fail (exit 3) when either profile's |Σπ - C| exceeds this.
    #[arg(long)]
    pub max_mass_gap: Option<f64>,
}

/// Process exit statuses.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const USAGE: u8 = 1;
    pub const SOLVER: u8 = 2;
    pub const BREACH: u8 = 3;
}

fn error_code(e: &Option<CellError>) -> u8 {
    match e.as_ref().map(|e| e.kind) {
        None => exit::SUCCESS,
        Some(FailureKind::Input) => exit::USAGE,
        Some(FailureKind::Solver) => exit::SOLVER,
    }
}

/// Evaluates the command, writes its output, and returns the exit status:
/// the most severe outcome over all cells (breach > solver failure > invalid
/// cell > success).
pub fn run(cli: Cli) -> Result<u8> {
    let (spec, rendered, code) = match cli.command {
        Command::Chartime(spec) => {
            let cells = compute::chartime(&spec);
            let meta = Metadata::new("chartime", &spec);
            let text = output::render_chartime(&meta, &cells, spec.output_format)?;
            let unresolved = |c: &compute::ChartimeCell| c.status == "no_admissible_root" && !spec.fallback();
            let code = cells
                .iter()
                .map(|c| if unresolved(c) { exit::SOLVER } else { error_code(&c.error) })
                .max()
                .unwrap_or(0);
            (spec, text, code)
        }
        Command::Hitratio(spec) => {
            let cells = compute::hitratio(&spec);
            let meta = Metadata::new("hitratio", &spec);
            let text = output::render_hitratio(&meta, &cells, spec.output_format)?;
            let code = cells.iter().map(|c| error_code(&c.error)).max().unwrap_or(0);
            (spec, text, code)
        }
        Command::Validate(args) => {
            let thresholds = Thresholds {
                max_mae: args.max_mae,
                max_abs: args.max_abs,
                max_mass_gap: args.max_mass_gap,
            };
            let cells = compute::validate(&args.spec, args.left, args.right, &thresholds);
            let mut meta = Metadata::new("validate", &args.spec);
            meta.left = Some(args.left);
            meta.right = Some(args.right);
            meta.thresholds = Some(thresholds);
            let text = output::render_validate(&meta, &cells, args.spec.output_format)?;
            let code = cells
                .iter()
                .map(|c| if c.status == "breach" { exit::BREACH } else { error_code(&c.error) })
                .max()
                .unwrap_or(0);
            (args.spec, text, code)
        }
    };
    match &spec.output_path {
        Some(path) => fs::write(path, rendered).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(code)
}
