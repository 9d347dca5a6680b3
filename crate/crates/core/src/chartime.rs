//! Characteristic time of an LRU cache.
//!
//! Two families of solvers live here:
//!
//! * numeric solvers for the normalization equation
//!   `Σ_i e^{-p_i r} = N - C` (common time) and its per-object variant
//!   `Σ_{j≠i} e^{-p_j r_i} = N - 1 - C`, valid for any probability vector;
//! * closed-form solvers that truncate the double Taylor expansion of
//!   `e^{-p r}` (around `r = C`, then `p = 0`) after `K` terms, turning the
//!   normalization equation into a quadratic (`K = 2`) or cubic (`K = 3`)
//!   in `r`. Those require power-law demand, whose power sums are
//!   `Λ^m H_N^{(am)}` with the integral approximation of `H`.
//!
//! Times are computed with the request rate normalized to one, so they are
//! measured in requests. [`CacheConfig::rate`] only rescales the reported
//! [`CharTimeResult::value`].

use serde::Serialize;

use crate::demand::{harmonic_approx, DemandModel};
use crate::error::{invalid, Error, Result};
use crate::polyroots::{solve_cubic, solve_quadratic};

/// Default relative tolerance of the numeric solvers.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Bisection/Newton iteration cap of the numeric solvers.
pub const MAX_ITERATIONS: usize = 10_000;

/// Cache of `capacity` unit-sized objects fed at `rate` requests per unit time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CacheConfig {
    capacity: usize,
    rate: f64,
}

impl CacheConfig {
    pub fn new(capacity: usize, rate: f64) -> Result<Self> {
        if capacity == 0 {
            return Err(invalid("cache capacity must be at least 1"));
        }
        if !rate.is_finite() || rate <= 0.0 {
            return Err(invalid(format!("request rate must be positive, got {rate}")));
        }
        Ok(Self { capacity, rate })
    }

    /// Unit request rate.
    pub fn with_capacity(capacity: usize) -> Result<Self> {
        Self::new(capacity, 1.0)
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    NumericCommon,
    NumericPerObject,
    ClosedQuadratic,
    ClosedCubic,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::NumericCommon => "numeric_common",
            Method::NumericPerObject => "numeric_per_object",
            Method::ClosedQuadratic => "closed_quadratic",
            Method::ClosedCubic => "closed_cubic",
        }
    }

    fn closed(truncation_k: usize) -> Self {
        if truncation_k == 2 {
            Method::ClosedQuadratic
        } else {
            Method::ClosedCubic
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A solved characteristic time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharTimeResult {
    /// Characteristic time in units of time (requests divided by the rate).
    pub value: f64,
    pub method: Method,
    /// Left side minus right side of the normalization equation (the
    /// per-object one when `object_rank` is set), evaluated at `value` with
    /// the exact request probabilities.
    pub residual: f64,
    /// 1-based rank for per-object times.
    pub object_rank: Option<usize>,
    /// Every `r_i`, when the per-object equation was solved for all objects.
    pub per_object: Option<Vec<f64>>,
}

/// Outcome of a closed-form solve.
///
/// The polynomial may have no real root at or above `C`; that is reported as
/// [`ClosedForm::NoAdmissibleRoot`] with every real root found, never as a
/// root below `C`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ClosedForm {
    Admissible(CharTimeResult),
    NoAdmissibleRoot { method: Method, real_roots: Vec<f64> },
}

impl ClosedForm {
    pub fn admissible(&self) -> Option<&CharTimeResult> {
        match self {
            ClosedForm::Admissible(r) => Some(r),
            ClosedForm::NoAdmissibleRoot { .. } => None,
        }
    }

    pub fn into_admissible(self) -> Option<CharTimeResult> {
        match self {
            ClosedForm::Admissible(r) => Some(r),
            ClosedForm::NoAdmissibleRoot { .. } => None,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("tolerance must be positive, got {tol}")))
    }
}

fn check_rank(demand: &DemandModel, rank: usize) -> Result<usize> {
    if rank == 0 || rank > demand.n_objects() {
        return Err(invalid(format!(
            "object rank {rank} outside 1..={}",
            demand.n_objects()
        )));
    }
    Ok(rank - 1)
}

fn check_common_capacity(demand: &DemandModel, config: &CacheConfig) -> Result<()> {
    if config.capacity >= demand.n_objects() {
        return Err(Error::CapacityTooLarge {
            capacity: config.capacity,
            limit: demand.n_objects(),
        });
    }
    Ok(())
}

fn check_per_object_capacity(demand: &DemandModel, config: &CacheConfig) -> Result<()> {
    // N - 1 - C must be positive.
    if config.capacity + 1 >= demand.n_objects() {
        return Err(Error::CapacityTooLarge {
            capacity: config.capacity,
            limit: demand.n_objects().saturating_sub(1),
        });
    }
    Ok(())
}

/// `Σ_{j≠skip} e^{-p_j r} - target`.
pub(crate) fn mass_residual(probs: &[f64], skip: Option<usize>, target: f64, r: f64) -> f64 {
    terms(probs, skip).map(|p| (-p * r).exp()).sum::<f64>() - target
}

fn terms(probs: &[f64], skip: Option<usize>) -> impl Iterator<Item = f64> + '_ {
    probs
        .iter()
        .enumerate()
        .filter(move |(j, _)| Some(*j) != skip)
        .map(|(_, &p)| p)
}

/// Residual of the common normalization equation at time `r` (in requests).
pub fn common_residual(demand: &DemandModel, capacity: usize, r: f64) -> f64 {
    let target = demand.n_objects() as f64 - capacity as f64;
    mass_residual(demand.probs(), None, target, r)
}

/// Residual of the per-object equation for 1-based `rank` at time `r`.
pub fn per_object_residual(demand: &DemandModel, capacity: usize, rank: usize, r: f64) -> f64 {
    let target = demand.n_objects() as f64 - 1.0 - capacity as f64;
    mass_residual(demand.probs(), Some(rank - 1), target, r)
}

/// Solves `Σ_{j≠skip} e^{-p_j r} = target` for `r ≥ 0`.
///
/// The left side falls strictly from the number of terms toward the count of
/// zero-probability terms, so a bracket always exists when `target` lies in
/// between. Bisection keeps the bracket; Newton steps that land inside it
/// are taken instead of the midpoint.
fn solve_mass_equation(probs: &[f64], skip: Option<usize>, target: f64, tol: f64) -> Result<(f64, f64)> {
    let n_terms = terms(probs, skip).count();
    let zeros = terms(probs, skip).filter(|&p| p == 0.0).count();
    if target <= zeros as f64 || target >= n_terms as f64 {
        return Err(Error::Degenerate(format!(
            "target mass {target} not reachable with {n_terms} terms ({zeros} of zero probability)"
        )));
    }
    let abs_tol = tol * n_terms as f64;
    let f = |r: f64| mass_residual(probs, skip, target, r);
    let f_and_df = |r: f64| {
        terms(probs, skip).fold((-target, 0.0), |(v, d), p| {
            let e = (-p * r).exp();
            (v + e, d - p * e)
        })
    };

    let mut lo = 0.0;
    let mut hi = probs.len().max(1) as f64;
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::NoConvergence { iterations: 0, lo, hi });
        }
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITERATIONS {
        let (v, dv) = f_and_df(x);
        if v.abs() <= abs_tol {
            return Ok((x, v));
        }
        if v > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok((x, v));
        }
        let newton = x - v / dv;
        x = if dv < 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        lo,
        hi,
    })
}

/// Common characteristic time from the normalization equation, solved
/// numerically. Works for any probability vector.
pub fn solve_common_numeric(
    demand: &DemandModel,
    config: &CacheConfig,
    tol: f64,
) -> Result<CharTimeResult> {
    check_common_capacity(demand, config)?;
    check_tol(tol)?;
    let target = (demand.n_objects() - config.capacity) as f64;
    let (r, residual) = solve_mass_equation(demand.probs(), None, target, tol)?;
    Ok(CharTimeResult {
        value: r / config.rate,
        method: Method::NumericCommon,
        residual,
        object_rank: None,
        per_object: None,
    })
}

/// Characteristic time of the object with 1-based `object_rank`, solved
/// numerically from the per-object equation.
pub fn solve_per_object_numeric(
    demand: &DemandModel,
    config: &CacheConfig,
    object_rank: usize,
    tol: f64,
) -> Result<CharTimeResult> {
    check_per_object_capacity(demand, config)?;
    check_tol(tol)?;
    let idx = check_rank(demand, object_rank)?;
    let target = (demand.n_objects() - 1 - config.capacity) as f64;
    let (r, residual) = solve_mass_equation(demand.probs(), Some(idx), target, tol)?;
    Ok(CharTimeResult {
        value: r / config.rate,
        method: Method::NumericPerObject,
        residual,
        object_rank: Some(object_rank),
        per_object: None,
    })
}

/// Solves the per-object equation for every object.
///
/// `per_object` holds `r_1..r_N`; `value` is their mean and `residual` the
/// residual of largest magnitude.
pub fn solve_all_per_object_numeric(
    demand: &DemandModel,
    config: &CacheConfig,
    tol: f64,
) -> Result<CharTimeResult> {
    let mut times = Vec::with_capacity(demand.n_objects());
    let mut worst: f64 = 0.0;
    for rank in 1..=demand.n_objects() {
        let res = solve_per_object_numeric(demand, config, rank, tol)?;
        times.push(res.value);
        if res.residual.abs() > worst.abs() {
            worst = res.residual;
        }
    }
    let mean = times.iter().sum::<f64>() / times.len() as f64;
    Ok(CharTimeResult {
        value: mean,
        method: Method::NumericPerObject,
        residual: worst,
        object_rank: None,
        per_object: Some(times),
    })
}

fn check_truncation(truncation_k: usize) -> Result<()> {
    if truncation_k == 2 || truncation_k == 3 {
        Ok(())
    } else {
        Err(invalid(format!(
            "closed form needs truncation order 2 or 3, got {truncation_k}"
        )))
    }
}

fn power_law_params(demand: &DemandModel) -> Result<(f64, f64)> {
    match (demand.skewness(), demand.lambda_norm()) {
        (Some(a), Some(lambda)) => Ok((a, lambda)),
        _ => Err(invalid("closed-form solvers need power-law demand")),
    }
}

/// Power sums `Σ_j p_j^m` for `m = 0..=2K`, approximated for power-law
/// demand. `m = 0` is the exact term count. With `excluded` set, the term of
/// that 1-based rank is removed.
fn approx_power_sums(demand: &DemandModel, truncation_k: usize, excluded: Option<usize>) -> Result<Vec<f64>> {
    let (a, lambda) = power_law_params(demand)?;
    let n = demand.n_objects();
    let mut sums = Vec::with_capacity(2 * truncation_k + 1);
    sums.push((n - usize::from(excluded.is_some())) as f64);
    for m in 1..=2 * truncation_k {
        let order = a * m as f64;
        let mut h = harmonic_approx(n, order)?;
        if let Some(rank) = excluded {
            h -= (rank as f64).powf(-order);
        }
        sums.push(lambda.powi(m as i32) * h);
    }
    Ok(sums)
}

// Polynomials below are stored lowest degree first.

fn poly_mul(lhs: &[f64], rhs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; lhs.len() + rhs.len() - 1];
    for (i, a) in lhs.iter().enumerate() {
        for (j, b) in rhs.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Builds the truncated master polynomial in `r` (highest degree first).
///
/// With `a_k = (-C)^k / k!` and `b_k(r) = (-(r - C))^k / k!`, the polynomial
/// is `Σ_{m=0}^{2K} (Σ_{m1+m2=m, m1,m2≤K} a_{m1} b_{m2}(r)) S_m - target`,
/// where `S_m` are the power sums. The `m = 0` term is `S_0`, which combines
/// with `target` into the constant `C`.
fn master_polynomial(power_sums: &[f64], capacity: f64, target: f64, truncation_k: usize) -> Vec<f64> {
    let a: Vec<f64> = (0..=truncation_k)
        .map(|k| (-capacity).powi(k as i32) / factorial(k))
        .collect();
    // (C - r) as a polynomial in r, raised to successive powers.
    let c_minus_r = [capacity, -1.0];
    let mut b: Vec<Vec<f64>> = vec![vec![1.0]];
    for k in 1..=truncation_k {
        let next = poly_mul(&b[k - 1], &c_minus_r);
        b.push(next);
    }
    for (k, bk) in b.iter_mut().enumerate() {
        let f = factorial(k);
        bk.iter_mut().for_each(|c| *c /= f);
    }

    let mut poly = vec![0.0; truncation_k + 1];
    poly[0] = power_sums[0] - target;
    for (m, sum) in power_sums.iter().enumerate().skip(1) {
        for (m1, a_m1) in a.iter().enumerate().take(m + 1) {
            let m2 = m - m1;
            if m2 > truncation_k {
                continue;
            }
            for (deg, coeff) in b[m2].iter().enumerate() {
                poly[deg] += a_m1 * coeff * sum;
            }
        }
    }
    poly.reverse();
    poly
}

/// Coefficients `[α_K, ..., α_1, α_0]` of the truncated master equation for
/// the common characteristic time, `K ∈ {2, 3}`.
pub fn master_coefficients(
    demand: &DemandModel,
    config: &CacheConfig,
    truncation_k: usize,
) -> Result<Vec<f64>> {
    check_truncation(truncation_k)?;
    let sums = approx_power_sums(demand, truncation_k, None)?;
    let target = demand.n_objects() as f64 - config.capacity as f64;
    Ok(master_polynomial(&sums, config.capacity as f64, target, truncation_k))
}

/// Master-equation coefficients for the per-object time of 1-based `rank`.
pub fn per_object_master_coefficients(
    demand: &DemandModel,
    config: &CacheConfig,
    rank: usize,
    truncation_k: usize,
) -> Result<Vec<f64>> {
    check_truncation(truncation_k)?;
    check_rank(demand, rank)?;
    let sums = approx_power_sums(demand, truncation_k, Some(rank))?;
    let target = demand.n_objects() as f64 - 1.0 - config.capacity as f64;
    Ok(master_polynomial(&sums, config.capacity as f64, target, truncation_k))
}

/// Smallest real root at or above `capacity`, or every real root if none is.
fn select_root(coeffs: &[f64], capacity: f64) -> Result<std::result::Result<f64, Vec<f64>>> {
    let roots = match *coeffs {
        [a2, a1, a0] => solve_quadratic(a2, a1, a0)?,
        [a3, a2, a1, a0] => solve_cubic(a3, a2, a1, a0)?,
        _ => unreachable!("truncation order already validated"),
    };
    Ok(roots
        .roots
        .iter()
        .copied()
        .find(|&r| r >= capacity)
        .ok_or(roots.roots))
}

/// Closed-form common characteristic time: the smallest real root of the
/// truncated master equation that is at least `C`.
pub fn solve_common_closed_form(
    demand: &DemandModel,
    config: &CacheConfig,
    truncation_k: usize,
) -> Result<ClosedForm> {
    check_common_capacity(demand, config)?;
    let coeffs = master_coefficients(demand, config, truncation_k)?;
    let method = Method::closed(truncation_k);
    Ok(match select_root(&coeffs, config.capacity as f64)? {
        Ok(r) => ClosedForm::Admissible(CharTimeResult {
            value: r / config.rate,
            method,
            residual: common_residual(demand, config.capacity, r),
            object_rank: None,
            per_object: None,
        }),
        Err(real_roots) => ClosedForm::NoAdmissibleRoot { method, real_roots },
    })
}

/// Closed-form per-object characteristic time for 1-based `object_rank`.
pub fn solve_per_object_closed_form(
    demand: &DemandModel,
    config: &CacheConfig,
    object_rank: usize,
    truncation_k: usize,
) -> Result<ClosedForm> {
    check_per_object_capacity(demand, config)?;
    let coeffs = per_object_master_coefficients(demand, config, object_rank, truncation_k)?;
    let method = Method::closed(truncation_k);
    Ok(match select_root(&coeffs, config.capacity as f64)? {
        Ok(r) => ClosedForm::Admissible(CharTimeResult {
            value: r / config.rate,
            method,
            residual: per_object_residual(demand, config.capacity, object_rank, r),
            object_rank: Some(object_rank),
            per_object: None,
        }),
        Err(real_roots) => ClosedForm::NoAdmissibleRoot { method, real_roots },
    })
}
