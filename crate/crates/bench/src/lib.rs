//! Benchmark fixtures shared by the criterion benches.

use lru_chartime::{CacheConfig, DemandModel};

/// Skewness and capacity grid used throughout the benches (N = 1000).
pub const SKEWS: [f64; 3] = [0.4, 0.6, 0.8];
pub const CAPACITIES: [usize; 4] = [50, 100, 150, 200];
pub const N_OBJECTS: usize = 1000;

pub fn fixture(skew: f64, capacity: usize) -> (DemandModel, CacheConfig) {
    (
        DemandModel::power_law(N_OBJECTS, skew).expect("valid skewness"),
        CacheConfig::with_capacity(capacity).expect("valid capacity"),
    )
}
