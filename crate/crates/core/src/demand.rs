//! Generalized power-law demand and generalized harmonic numbers.
//!
//! The object with rank `i` (1-based) is requested with probability
//! `p_i = Λ / i^a`, where `Λ` normalizes the vector to unit mass. Ranks are
//! 1-based in every public API that takes a rank; vectors are 0-based.

use serde::Serialize;

use crate::error::{invalid, Result};

/// Below this distance from 1, [`harmonic_approx`] switches to `ln(n)`.
pub const HARMONIC_SINGULARITY_EPS: f64 = 1e-9;

/// Popularity distribution over a universe of `N` objects.
///
/// Immutable after construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemandModel {
    n_objects: usize,
    skewness: Option<f64>,
    lambda_norm: Option<f64>,
    probs: Vec<f64>,
}

impl DemandModel {
    /// Builds `p_i = Λ / i^a` for `i = 1..=n_objects`, with `Λ` taken from
    /// the exact harmonic sum.
    pub fn power_law(n_objects: usize, skewness: f64) -> Result<Self> {
        if n_objects == 0 {
            return Err(invalid("number of objects must be at least 1"));
        }
        if !skewness.is_finite() || skewness < 0.0 {
            return Err(invalid(format!(
                "skewness must be finite and non-negative, got {skewness}"
            )));
        }
        let lambda = 1.0 / harmonic_exact(n_objects, skewness)?;
        let probs = (1..=n_objects)
            .map(|i| lambda / (i as f64).powf(skewness))
            .collect();
        Ok(Self {
            n_objects,
            skewness: Some(skewness),
            lambda_norm: Some(lambda),
            probs,
        })
    }

    /// Wraps an arbitrary probability vector. Such a model is accepted by the
    /// numeric solvers and the simulator, but not by the closed-form path.
    pub fn from_probabilities(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid("probability vector is empty"));
        }
        if let Some(bad) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(invalid(format!("probability {bad} is not in [0, 1]")));
        }
        let total: f64 = probs.iter().rev().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self {
            n_objects: probs.len(),
            skewness: None,
            lambda_norm: None,
            probs,
        })
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    /// Skewness `a`, or `None` for an arbitrary probability vector.
    pub fn skewness(&self) -> Option<f64> {
        self.skewness
    }

    /// Normalization constant `Λ`, or `None` for an arbitrary vector.
    pub fn lambda_norm(&self) -> Option<f64> {
        self.lambda_norm
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Request probability of the object with 1-based `rank`.
    pub fn prob(&self, rank: usize) -> Option<f64> {
        rank.checked_sub(1).and_then(|i| self.probs.get(i).copied())
    }
}

/// `Σ_{l=1..n} 1 / l^order`, summed smallest terms first.
pub fn harmonic_exact(n: usize, order: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("harmonic number needs n >= 1"));
    }
    if !order.is_finite() {
        return Err(invalid(format!("harmonic order must be finite, got {order}")));
    }
    Ok((1..=n).rev().map(|l| (l as f64).powf(-order)).sum())
}

/// Integral approximation `(n^{1-order} - 1) / (1 - order)` of the harmonic
/// number, with the `ln(n)` limit near `order = 1`.
///
/// For `order = 0` this yields `n - 1`, not `n`; callers that need the exact
/// term count must use it directly.
pub fn harmonic_approx(n: usize, order: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("harmonic number needs n >= 1"));
    }
    if !order.is_finite() || order < 0.0 {
        return Err(invalid(format!(
            "approximate harmonic order must be finite and non-negative, got {order}"
        )));
    }
    let n = n as f64;
    let gap = 1.0 - order;
    if gap.abs() <= HARMONIC_SINGULARITY_EPS {
        Ok(n.ln())
    } else {
        Ok((n.powf(gap) - 1.0) / gap)
    }
}
