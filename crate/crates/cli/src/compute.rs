//! Per-cell evaluation for the subcommands.

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;

use lru_chartime::simulator::default_warmup;
use lru_chartime::{
    exact_stationary, hit_profile, proportional_normalize, simulate, solve_common_closed_form,
    solve_common_numeric, CacheConfig, ClosedForm, DemandModel, Error, HitProfile, Method,
    DEFAULT_TOL,
};

use crate::spec::RunSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// Invalid parameters for this cell (bad capacity, oracle too large, ...).
    Input,
    /// A solver could not produce a value.
    Solver,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellError {
    pub kind: FailureKind,
    pub message: String,
}

impl From<Error> for CellError {
    fn from(err: Error) -> Self {
        let kind = match err {
            Error::InvalidArgument(_) | Error::CapacityTooLarge { .. } | Error::StateSpaceTooLarge { .. } => {
                FailureKind::Input
            }
            Error::NoConvergence { .. } | Error::Degenerate(_) => FailureKind::Solver,
        };
        Self {
            kind,
            message: err.to_string(),
        }
    }
}

fn input_error(message: impl Into<String>) -> CellError {
    CellError {
        kind: FailureKind::Input,
        message: message.into(),
    }
}

/// Characteristic time used for the analytic profile of a cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimeChoice {
    pub r: f64,
    pub method_used: Method,
    /// The requested closed form had no admissible root.
    pub no_admissible_root: bool,
}

fn setup(spec: &RunSpec, skew: f64, capacity: usize) -> Result<(DemandModel, CacheConfig), CellError> {
    Ok((
        DemandModel::power_law(spec.n_objects, skew)?,
        CacheConfig::with_capacity(capacity)?,
    ))
}

pub fn choose_time(spec: &RunSpec, demand: &DemandModel, config: &CacheConfig) -> Result<TimeChoice, CellError> {
    let Some(k) = spec.method.truncation() else {
        let r = solve_common_numeric(demand, config, DEFAULT_TOL)?;
        return Ok(TimeChoice {
            r: r.value,
            method_used: r.method,
            no_admissible_root: false,
        });
    };
    match solve_common_closed_form(demand, config, k)? {
        ClosedForm::Admissible(r) => Ok(TimeChoice {
            r: r.value,
            method_used: r.method,
            no_admissible_root: false,
        }),
        ClosedForm::NoAdmissibleRoot { real_roots, .. } if !spec.fallback() => Err(CellError {
            kind: FailureKind::Solver,
            message: format!("no real root >= C (real roots {real_roots:?})"),
        }),
        ClosedForm::NoAdmissibleRoot { .. } => {
            let r = solve_common_numeric(demand, config, DEFAULT_TOL)?;
            Ok(TimeChoice {
                r: r.value,
                method_used: r.method,
                no_admissible_root: true,
            })
        }
    }
}

// ---------------------------------------------------------------- chartime

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartimeCell {
    pub skew: f64,
    pub capacity: usize,
    pub r_exact: Option<f64>,
    /// Time from the requested method (equal to `r_exact` for numeric).
    pub r_method: Option<f64>,
    /// `ok`, `no_admissible_root`, or `error`.
    pub status: &'static str,
    pub r_fallback: Option<f64>,
    pub error: Option<CellError>,
}

fn chartime_cell(spec: &RunSpec, skew: f64, capacity: usize) -> ChartimeCell {
    let mut cell = ChartimeCell {
        skew,
        capacity,
        r_exact: None,
        r_method: None,
        status: "error",
        r_fallback: None,
        error: None,
    };
    let result = (|| -> Result<(), CellError> {
        let (demand, config) = setup(spec, skew, capacity)?;
        let exact = solve_common_numeric(&demand, &config, DEFAULT_TOL)?.value;
        cell.r_exact = Some(exact);
        match spec.method.truncation() {
            None => {
                cell.r_method = Some(exact);
                cell.status = "ok";
            }
            Some(k) => match solve_common_closed_form(&demand, &config, k)? {
                ClosedForm::Admissible(r) => {
                    cell.r_method = Some(r.value);
                    cell.status = "ok";
                }
                ClosedForm::NoAdmissibleRoot { .. } => {
                    cell.status = "no_admissible_root";
                    if spec.fallback() {
                        cell.r_fallback = Some(exact);
                    }
                }
            },
        }
        Ok(())
    })();
    if let Err(e) = result {
        cell.status = "error";
        cell.error = Some(e);
    }
    cell
}

pub fn chartime(spec: &RunSpec) -> Vec<ChartimeCell> {
    spec.grid()
        .into_par_iter()
        .map(|(a, c)| chartime_cell(spec, a, c))
        .collect()
}

// ---------------------------------------------------------------- hitratio

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitRow {
    pub rank: usize,
    pub p: f64,
    pub pi_analytic: Option<f64>,
    pub pi_normalized: Option<f64>,
    pub pi_simulated: Option<f64>,
    pub pi_oracle: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitCell {
    pub skew: f64,
    pub capacity: usize,
    pub time: Option<TimeChoice>,
    pub seed: u64,
    pub warmup: u64,
    pub rows: Vec<HitRow>,
    pub error: Option<CellError>,
}

/// Every profile one cell can provide.
#[derive(Debug, Clone, Default)]
pub struct Profiles {
    pub analytic: Option<HitProfile>,
    pub normalized: Option<HitProfile>,
    pub simulated: Option<HitProfile>,
    pub oracle: Option<HitProfile>,
}

pub struct CellInputs<'a> {
    pub spec: &'a RunSpec,
    pub skew: f64,
    pub capacity: usize,
    pub seed: u64,
    pub want_normalized: bool,
    pub want_simulated: bool,
    pub want_oracle: bool,
}

fn profiles(inputs: &CellInputs<'_>) -> Result<(DemandModel, TimeChoice, u64, Profiles), CellError> {
    let spec = inputs.spec;
    let (demand, config) = setup(spec, inputs.skew, inputs.capacity)?;
    let time = choose_time(spec, &demand, &config)?;
    let analytic = hit_profile(&demand, time.r * config.rate())?;
    let normalized = if inputs.want_normalized {
        Some(proportional_normalize(&analytic, config.capacity())?)
    } else {
        None
    };
    let warmup = spec.warmup.unwrap_or_else(|| default_warmup(&config));
    let simulated = if inputs.want_simulated {
        if spec.n_requests == 0 {
            return Err(input_error("simulated profile needs --requests > 0"));
        }
        Some(simulate(&demand, &config, spec.n_requests, inputs.seed, warmup)?.to_profile())
    } else {
        None
    };
    let oracle = if inputs.want_oracle {
        Some(exact_stationary(&demand, &config)?.profile)
    } else {
        None
    };
    Ok((
        demand,
        time,
        warmup,
        Profiles {
            analytic: Some(analytic),
            normalized,
            simulated,
            oracle,
        },
    ))
}

fn hitratio_cell(spec: &RunSpec, index: usize, skew: f64, capacity: usize) -> HitCell {
    let seed = spec.cell_seed(index);
    let inputs = CellInputs {
        spec,
        skew,
        capacity,
        seed,
        want_normalized: spec.normalize,
        want_simulated: spec.n_requests > 0,
        want_oracle: spec.oracle,
    };
    match profiles(&inputs) {
        Ok((demand, time, warmup, prof)) => {
            let column = |p: &Option<HitProfile>, i: usize| p.as_ref().map(|p| p.probs[i]);
            let rows = demand
                .probs()
                .iter()
                .enumerate()
                .map(|(i, &p)| HitRow {
                    rank: i + 1,
                    p,
                    pi_analytic: column(&prof.analytic, i),
                    pi_normalized: column(&prof.normalized, i),
                    pi_simulated: column(&prof.simulated, i),
                    pi_oracle: column(&prof.oracle, i),
                })
                .collect();
            HitCell {
                skew,
                capacity,
                time: Some(time),
                seed,
                warmup,
                rows,
                error: None,
            }
        }
        Err(e) => HitCell {
            skew,
            capacity,
            time: None,
            seed,
            warmup: spec.warmup.unwrap_or(capacity as u64),
            rows: vec![],
            error: Some(e),
        },
    }
}

pub fn hitratio(spec: &RunSpec) -> Vec<HitCell> {
    spec.grid()
        .into_par_iter()
        .enumerate()
        .map(|(i, (a, c))| hitratio_cell(spec, i, a, c))
        .collect()
}

// ---------------------------------------------------------------- validate

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileSource {
    Analytic,
    Normalized,
    Simulated,
    Oracle,
}

impl ProfileSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProfileSource::Analytic => "analytic",
            ProfileSource::Normalized => "normalized",
            ProfileSource::Simulated => "simulated",
            ProfileSource::Oracle => "oracle",
        }
    }

    fn pick<'p>(&self, p: &'p Profiles) -> Option<&'p HitProfile> {
        match self {
            ProfileSource::Analytic => p.analytic.as_ref(),
            ProfileSource::Normalized => p.normalized.as_ref(),
            ProfileSource::Simulated => p.simulated.as_ref(),
            ProfileSource::Oracle => p.oracle.as_ref(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Thresholds {
    pub max_mae: Option<f64>,
    pub max_abs: Option<f64>,
    pub max_mass_gap: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub mae: f64,
    pub max_abs: f64,
    /// `|Σπ - C|` of the left and right profiles.
    pub mass_gap_left: f64,
    pub mass_gap_right: f64,
}

pub fn compare(left: &HitProfile, right: &HitProfile, capacity: usize) -> Metrics {
    let diffs = left.probs.iter().zip(&right.probs).map(|(a, b)| (a - b).abs());
    let (sum, max) = diffs.fold((0.0, 0.0f64), |(s, m), d| (s + d, m.max(d)));
    Metrics {
        mae: sum / left.probs.len() as f64,
        max_abs: max,
        mass_gap_left: (left.mass - capacity as f64).abs(),
        mass_gap_right: (right.mass - capacity as f64).abs(),
    }
}

impl Thresholds {
    pub fn breached(&self, m: &Metrics) -> bool {
        let over = |limit: Option<f64>, v: f64| limit.is_some_and(|l| v > l);
        over(self.max_mae, m.mae)
            || over(self.max_abs, m.max_abs)
            || over(self.max_mass_gap, m.mass_gap_left.max(m.mass_gap_right))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidateCell {
    pub skew: f64,
    pub capacity: usize,
    pub left: ProfileSource,
    pub right: ProfileSource,
    pub time: Option<TimeChoice>,
    pub seed: u64,
    pub metrics: Option<Metrics>,
    /// `pass`, `breach`, or `error`.
    pub status: &'static str,
    pub error: Option<CellError>,
}

pub fn validate(spec: &RunSpec, left: ProfileSource, right: ProfileSource, thresholds: &Thresholds) -> Vec<ValidateCell> {
    let wants = |s: ProfileSource| left == s || right == s;
    spec.grid()
        .into_par_iter()
        .enumerate()
        .map(|(i, (skew, capacity))| {
            let seed = spec.cell_seed(i);
            let inputs = CellInputs {
                spec,
                skew,
                capacity,
                seed,
                want_normalized: wants(ProfileSource::Normalized),
                want_simulated: wants(ProfileSource::Simulated),
                want_oracle: wants(ProfileSource::Oracle),
            };
            let mut cell = ValidateCell {
                skew,
                capacity,
                left,
                right,
                time: None,
                seed,
                metrics: None,
                status: "error",
                error: None,
            };
            match profiles(&inputs) {
                Ok((_, time, _, prof)) => {
                    let (l, r) = (left.pick(&prof).unwrap(), right.pick(&prof).unwrap());
                    let m = compare(l, r, capacity);
                    cell.status = if thresholds.breached(&m) { "breach" } else { "pass" };
                    cell.metrics = Some(m);
                    cell.time = Some(time);
                }
                Err(e) => cell.error = Some(e),
            }
            cell
        })
        .collect()
}
