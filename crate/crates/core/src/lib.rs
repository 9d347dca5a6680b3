//! Steady-state hit probabilities of an LRU cache under independent,
//! generalized power-law demand.
//!
//! The characteristic time `r` of the cache (the longest gap between two
//! requests to an object that still lets the second one hit) determines the
//! hit probability `π_i = 1 - e^{-p_i r}` of every object. This crate solves
//! for `r` numerically and in closed form (quadratic or cubic truncation of
//! the normalization equation), applies proportional normalization, and
//! checks the results against an LRU simulator and an exact Markov chain.
//!
//! ```
//! use lru_chartime::{
//!     hit_profile, solve_common_closed_form, solve_common_numeric, CacheConfig, DemandModel,
//! };
//!
//! let demand = DemandModel::power_law(1000, 0.6).unwrap();
//! let cache = CacheConfig::with_capacity(100).unwrap();
//! let exact = solve_common_numeric(&demand, &cache, 1e-10).unwrap();
//! let approx = solve_common_closed_form(&demand, &cache, 3).unwrap();
//! let approx = approx.admissible().unwrap();
//! assert!((exact.value - approx.value).abs() / exact.value < 0.01);
//!
//! let profile = hit_profile(&demand, approx.value).unwrap();
//! assert!((profile.mass - 100.0).abs() < 1.0);
//! ```

pub mod chartime;
pub mod demand;
pub mod error;
pub mod hitratio;
pub mod polyroots;
pub mod simulator;

pub use chartime::{
    master_coefficients, solve_all_per_object_numeric, solve_common_closed_form,
    solve_common_numeric, solve_per_object_closed_form, solve_per_object_numeric, CacheConfig,
    CharTimeResult, ClosedForm, Method, DEFAULT_TOL,
};
pub use demand::{harmonic_approx, harmonic_exact, DemandModel};
pub use error::{Error, Result};
pub use hitratio::{hit_profile, proportional_normalize, HitProfile, Source};
pub use polyroots::{solve_cubic, solve_quadratic, RealRoots};
pub use simulator::{exact_stationary, simulate, ExactStationary, LruState, SimReport};
