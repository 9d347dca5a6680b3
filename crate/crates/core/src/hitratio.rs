//! Per-object hit probabilities from a characteristic time, and the
//! single-pass proportional normalization that restores `Σπ = C`.

use serde::Serialize;

use crate::demand::DemandModel;
use crate::error::{invalid, Error, Result};

/// Missing mass below this (relative to `max(1, C)`) counts as zero when the
/// remaining tail of the vector is empty.
pub const MASS_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Analytic,
    Simulated,
    Oracle,
}

/// Steady-state probability `π_i` that each object is cached.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitProfile {
    pub probs: Vec<f64>,
    /// `Σ π_i`.
    pub mass: f64,
    pub normalized: bool,
    pub source: Source,
    /// Entries capped at 1 during normalization.
    pub clipped: usize,
    /// Entries floored at 0 during normalization (only when the input mass
    /// exceeded `C`).
    pub floored: usize,
    /// `C - Σπ` left after normalization; `None` before.
    pub mass_gap: Option<f64>,
}

impl HitProfile {
    pub fn new(probs: Vec<f64>, source: Source) -> Result<Self> {
        if let Some(bad) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(invalid(format!("hit probability {bad} outside [0, 1]")));
        }
        Ok(Self {
            mass: probs.iter().sum(),
            probs,
            normalized: false,
            source,
            clipped: 0,
            floored: 0,
            mass_gap: None,
        })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// `π_i = 1 - e^{-p_i r}` for every object, with `r` measured in requests.
pub fn hit_profile(demand: &DemandModel, r: f64) -> Result<HitProfile> {
    if r.is_nan() || r < 0.0 {
        return Err(invalid(format!("characteristic time must be non-negative, got {r}")));
    }
    let probs = demand
        .probs()
        .iter()
        .map(|&p| if r.is_infinite() { if p > 0.0 { 1.0 } else { 0.0 } } else { -(-p * r).exp_m1() })
        .collect();
    HitProfile::new(probs, Source::Analytic)
}

/// Redistributes the missing mass `C - Σπ` in one pass over the ranks.
///
/// At rank `i` the missing mass is recomputed from the current, partially
/// updated vector, and `π_i` grows by its share `π_i / Σ_{j≥i} π_j` of it,
/// capped at 1. A negative missing mass shrinks entries the same way,
/// floored at 0. No second pass is made if capping leaves mass missing;
/// the remainder is reported in [`HitProfile::mass_gap`].
pub fn proportional_normalize(profile: &HitProfile, capacity: usize) -> Result<HitProfile> {
    let n = profile.probs.len();
    if capacity >= n {
        return Err(Error::CapacityTooLarge { capacity, limit: n });
    }
    if let Some(bad) = profile.probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(invalid(format!("hit probability {bad} outside [0, 1]")));
    }
    let c = capacity as f64;
    let mut pi = profile.probs.clone();

    // Entries at and after i are still untouched when rank i is processed,
    // so the tail sums can be taken from the input.
    let mut tails = vec![0.0; n + 1];
    for i in (0..n).rev() {
        tails[i] = tails[i + 1] + pi[i];
    }
    let mut total: f64 = pi.iter().sum();
    let (mut clipped, mut floored) = (0, 0);

    for i in 0..n {
        let missing = c - total;
        let tail = tails[i];
        if tail == 0.0 {
            if missing.abs() > MASS_ZERO_TOL * c.max(1.0) {
                return Err(Error::Degenerate(format!(
                    "missing mass {missing} but every hit probability from rank {} on is zero",
                    i + 1
                )));
            }
            break;
        }
        let old = pi[i];
        let mut new = old + missing * old / tail;
        if new > 1.0 {
            new = 1.0;
            clipped += 1;
        } else if new < 0.0 {
            new = 0.0;
            floored += 1;
        }
        pi[i] = new;
        total += new - old;
    }

    let mass: f64 = pi.iter().sum();
    Ok(HitProfile {
        probs: pi,
        mass,
        normalized: true,
        source: profile.source,
        clipped,
        floored,
        mass_gap: Some(c - mass),
    })
}
