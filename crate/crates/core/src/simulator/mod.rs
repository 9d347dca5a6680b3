//! Discrete-event LRU simulation under independent requests, and the exact
//! Markov-chain solution for tiny instances.
//!
//! Under independent requests the hit/miss outcome of every request depends
//! only on the order of requests, so Poisson arrival times are not drawn:
//! the simulator consumes an i.i.d. sequence of object ranks.

mod lru;
mod markov;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use lru::LruState;
pub use markov::{exact_stationary, state_count, ExactStationary, STATE_CAP};

use crate::chartime::CacheConfig;
use crate::demand::DemandModel;
use crate::error::{invalid, Result};
use crate::hitratio::{HitProfile, Source};

/// RNG recorded in every [`SimReport`]: ChaCha with 8 rounds, seeded through
/// `SeedableRng::seed_from_u64`.
pub const RNG_ALGORITHM: &str = "chacha8-seed_from_u64";

/// Sampler recorded in every [`SimReport`]: `u = (next_u64 >> 11) * 2^-53`,
/// then the first index whose cumulative probability exceeds `u`.
pub const SAMPLER_ALGORITHM: &str = "cdf-binary-search-u53";

/// Inverse-CDF sampler over object indices.
#[derive(Debug, Clone)]
pub struct CdfSampler {
    cdf: Vec<f64>,
}

impl CdfSampler {
    pub fn new(probs: &[f64]) -> Self {
        let mut acc = 0.0;
        let cdf = probs
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { cdf }
    }

    /// Maps a uniform `u ∈ [0, 1)` to an object index.
    pub fn index_for(&self, u: f64) -> usize {
        let idx = self.cdf.partition_point(|&c| c <= u);
        // Rounding can leave the last cumulative value just below 1.
        idx.min(self.cdf.len() - 1)
    }

    pub fn sample<R: RngCore>(&self, rng: &mut R) -> usize {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        self.index_for(u)
    }
}

/// Per-object counters of one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub hits: Vec<u64>,
    pub requests_per_object: Vec<u64>,
    /// Counted requests (excluding warmup).
    pub total_requests: u64,
    pub seed: u64,
    pub warmup: u64,
    /// `hits / requests` per object, 0 for objects never requested.
    pub hit_ratio: Vec<f64>,
    pub rng: &'static str,
    pub sampler: &'static str,
}

impl SimReport {
    pub fn total_hits(&self) -> u64 {
        self.hits.iter().sum()
    }

    /// Empirical hit ratios as a profile. Under independent requests the
    /// ratio seen by arriving requests estimates the probability of being
    /// cached.
    pub fn to_profile(&self) -> HitProfile {
        HitProfile::new(self.hit_ratio.clone(), Source::Simulated)
            .expect("hit ratios lie in [0, 1]")
    }
}

/// Default warmup: one cache fill.
pub fn default_warmup(config: &CacheConfig) -> u64 {
    config.capacity() as u64
}

/// Simulates an LRU cache for `warmup` uncounted requests followed by
/// `n_requests` counted ones. Identical arguments give identical reports.
pub fn simulate(
    demand: &DemandModel,
    config: &CacheConfig,
    n_requests: u64,
    seed: u64,
    warmup: u64,
) -> Result<SimReport> {
    if n_requests == 0 {
        return Err(invalid("simulation needs at least one request"));
    }
    let n = demand.n_objects();
    let sampler = CdfSampler::new(demand.probs());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cache = LruState::new(n, config.capacity().min(n));

    for _ in 0..warmup {
        cache.access(sampler.sample(&mut rng));
    }

    let mut hits = vec![0u64; n];
    let mut requests = vec![0u64; n];
    for _ in 0..n_requests {
        let obj = sampler.sample(&mut rng);
        requests[obj] += 1;
        if cache.access(obj) {
            hits[obj] += 1;
        }
    }

    let hit_ratio = hits
        .iter()
        .zip(&requests)
        .map(|(&h, &r)| if r == 0 { 0.0 } else { h as f64 / r as f64 })
        .collect();
    Ok(SimReport {
        hits,
        requests_per_object: requests,
        total_requests: n_requests,
        seed,
        warmup,
        hit_ratio,
        rng: RNG_ALGORITHM,
        sampler: SAMPLER_ALGORITHM,
    })
}
