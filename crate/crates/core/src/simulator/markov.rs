//! Exact stationary analysis of LRU as a Markov chain whose states are the
//! ordered cache contents (most recent first). There are `C! · binom(N, C)`
//! such states, so this is only usable on tiny instances.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::chartime::CacheConfig;
use crate::demand::DemandModel;
use crate::error::{invalid, Error, Result};
use crate::hitratio::{HitProfile, Source};

/// Largest chain the oracle will build.
pub const STATE_CAP: u128 = 1_000_000;

/// Chains up to this size are solved with a dense LU factorization; larger
/// ones by power iteration on the sparse transitions.
const DENSE_LIMIT: usize = 2_000;
const POWER_TOL: f64 = 1e-15;
const POWER_MAX_ITERS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactStationary {
    pub profile: HitProfile,
    pub state_count: usize,
}

/// `C! · binom(N, C) = N! / (N - C)!`, saturating at `u128::MAX`.
pub fn state_count(n_objects: usize, capacity: usize) -> u128 {
    if capacity > n_objects {
        return 0;
    }
    ((n_objects - capacity + 1)..=n_objects).fold(1u128, |acc, k| acc.saturating_mul(k as u128))
}

fn enumerate_states(n: usize, c: usize) -> Vec<Vec<u32>> {
    fn extend(n: usize, c: usize, cur: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if cur.len() == c {
            out.push(cur.clone());
            return;
        }
        for obj in 0..n {
            if !used[obj] {
                used[obj] = true;
                cur.push(obj as u32);
                extend(n, c, cur, used, out);
                cur.pop();
                used[obj] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(n, c, &mut Vec::with_capacity(c), &mut vec![false; n], &mut out);
    out
}

/// State reached from `state` when `obj` is requested.
fn successor(state: &[u32], obj: u32) -> Vec<u32> {
    let mut next = Vec::with_capacity(state.len());
    next.push(obj);
    match state.iter().position(|&s| s == obj) {
        Some(pos) => {
            next.extend_from_slice(&state[..pos]);
            next.extend_from_slice(&state[pos + 1..]);
        }
        None => next.extend_from_slice(&state[..state.len() - 1]),
    }
    next
}

/// Exact probability that each object is cached in steady state, from the
/// stationary distribution of the recency-ordered LRU chain.
pub fn exact_stationary(demand: &DemandModel, config: &CacheConfig) -> Result<ExactStationary> {
    let n = demand.n_objects();
    let c = config.capacity();
    if c > n {
        return Err(invalid(format!("capacity {c} exceeds the {n} objects")));
    }
    let count = state_count(n, c);
    if count > STATE_CAP {
        return Err(Error::StateSpaceTooLarge {
            states: count,
            cap: STATE_CAP,
        });
    }

    let states = enumerate_states(n, c);
    debug_assert_eq!(states.len() as u128, count);
    let index: HashMap<&[u32], usize> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_slice(), i))
        .collect();
    let probs = demand.probs();

    let stationary = if states.len() <= DENSE_LIMIT {
        solve_dense(&states, &index, probs)?
    } else {
        solve_power(&states, &index, probs)?
    };

    let mut present = vec![0.0; n];
    for (state, &w) in states.iter().zip(&stationary) {
        for &obj in state {
            present[obj as usize] += w;
        }
    }
    for p in &mut present {
        *p = p.clamp(0.0, 1.0);
    }
    Ok(ExactStationary {
        profile: HitProfile::new(present, Source::Oracle)?,
        state_count: states.len(),
    })
}

/// Solves `x (P - I) = 0` with the last equation replaced by `Σ x = 1`.
fn solve_dense(states: &[Vec<u32>], index: &HashMap<&[u32], usize>, probs: &[f64]) -> Result<Vec<f64>> {
    let s = states.len();
    // Row k of `a` is the balance equation of state k: Σ_from x_from P[from][k] - x_k.
    let mut a = DMatrix::<f64>::zeros(s, s);
    for (from, state) in states.iter().enumerate() {
        for (obj, &p) in probs.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            let to = index[successor(state, obj as u32).as_slice()];
            a[(to, from)] += p;
        }
        a[(from, from)] -= 1.0;
    }
    for col in 0..s {
        a[(s - 1, col)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(s);
    b[s - 1] = 1.0;
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Degenerate("singular Markov chain balance equations".into()))?;
    Ok(x.iter().map(|&v| v.max(0.0)).collect())
}

fn solve_power(states: &[Vec<u32>], index: &HashMap<&[u32], usize>, probs: &[f64]) -> Result<Vec<f64>> {
    let s = states.len();
    let transitions: Vec<Vec<(usize, f64)>> = states
        .iter()
        .map(|state| {
            probs
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(|(obj, &p)| (index[successor(state, obj as u32).as_slice()], p))
                .collect()
        })
        .collect();
    let mut x = vec![1.0 / s as f64; s];
    let mut y = vec![0.0; s];
    for _ in 0..POWER_MAX_ITERS {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (from, edges) in transitions.iter().enumerate() {
            for &(to, p) in edges {
                y[to] += x[from] * p;
            }
        }
        let diff: f64 = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut y);
        if diff < POWER_TOL {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        iterations: POWER_MAX_ITERS,
        lo: 0.0,
        hi: 1.0,
    })
}
