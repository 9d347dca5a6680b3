//! Randomized invariant checks, one proptest runner per property.

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};

use lru_chartime::chartime::common_residual;
use lru_chartime::polyroots::{cubic_discriminant, eval};
use lru_chartime::{
    exact_stationary, harmonic_approx, harmonic_exact, hit_profile, master_coefficients,
    proportional_normalize, simulate, solve_common_closed_form, solve_common_numeric, solve_cubic,
    CacheConfig, ClosedForm, DemandModel, HitProfile, LruState, Source, DEFAULT_TOL,
};

pub type Outcome = Result<(), String>;

fn runner(cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn check<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Outcome
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| match e {
        TestError::Fail(reason, value) => format!("{reason} (input {value:?})"),
        TestError::Abort(reason) => format!("aborted: {reason}"),
    })
}

fn cfg(c: usize) -> CacheConfig {
    CacheConfig::with_capacity(c).unwrap()
}

const CASES: u32 = 1000;

pub fn run_all() -> Vec<(&'static str, Outcome)> {
    vec![
        ("demand_unit_mass", demand_unit_mass()),
        ("demand_monotone", demand_monotone()),
        ("harmonic_approx_continuity", harmonic_approx_continuity()),
        ("harmonic_exact_dominates_approx", harmonic_exact_dominates_approx()),
        ("harmonic_relative_gap_within_10pct", harmonic_relative_gap()),
        ("cubic_roots_residual_and_count", cubic_roots()),
        ("numeric_residual", numeric_residual()),
        ("numeric_monotone_in_capacity", numeric_monotone_in_capacity()),
        ("closed_form_root_at_least_capacity", closed_form_at_least_capacity()),
        ("closed_form_envelope_3_5pct", closed_form_envelope()),
        ("cubic_not_worse_than_quadratic_on_table_grid", cubic_not_worse_than_quadratic()),
        ("master_coefficients_match_expansion", master_coefficients_match_expansion()),
        ("hit_profile_monotone", hit_profile_monotone()),
        ("normalize_preserves_order", normalize_preserves_order()),
        ("normalize_idempotent_at_fixed_point", normalize_idempotent()),
        ("normalize_mass_when_unclipped", normalize_mass_when_unclipped()),
        ("simulation_deterministic", simulation_deterministic()),
        ("simulation_counters", simulation_counters()),
        ("lru_state_trace", lru_state_trace()),
        ("oracle_mass_equals_capacity", oracle_mass()),
    ]
}

fn demand_unit_mass() -> Outcome {
    // N log-uniform over [1, 10^6].
    check(CASES, (0.0..=6.0f64, 0.0..=2.0f64), |(exp, a)| {
        let n = 10f64.powf(exp).round() as usize;
        let d = DemandModel::power_law(n, a).unwrap();
        let total: f64 = d.probs().iter().rev().sum();
        prop_assert!((total - 1.0).abs() <= 1e-12, "N={} a={}: sum {}", n, a, total);
        Ok(())
    })
}

fn demand_monotone() -> Outcome {
    let skew = prop_oneof![Just(0.0), 1e-3..=2.0f64];
    check(CASES, (2usize..5000, skew), |(n, a)| {
        let d = DemandModel::power_law(n, a).unwrap();
        for w in d.probs().windows(2) {
            if a > 0.0 {
                prop_assert!(w[0] > w[1]);
            } else {
                prop_assert_eq!(w[0], w[1]);
            }
        }
        Ok(())
    })
}

fn harmonic_approx_continuity() -> Outcome {
    check(CASES, (1usize..1_000_000, prop::bool::ANY), |(n, above)| {
        let order = if above { 1.0 + 1e-10 } else { 1.0 - 1e-10 };
        let v = harmonic_approx(n, order).unwrap();
        prop_assert!((v - (n as f64).ln()).abs() <= 1e-6);
        Ok(())
    })
}

fn harmonic_exact_dominates_approx() -> Outcome {
    check(CASES, (100usize..100_000, 0.2..=3.0f64), |(n, a)| {
        let exact = harmonic_exact(n, a).unwrap();
        let approx = harmonic_approx(n, a).unwrap();
        prop_assert!(exact >= approx, "n={} a={}: {} < {}", n, a, exact, approx);
        Ok(())
    })
}

fn harmonic_relative_gap() -> Outcome {
    check(CASES, (100usize..100_000, 0.2..=3.0f64), |(n, a)| {
        let exact = harmonic_exact(n, a).unwrap();
        let approx = harmonic_approx(n, a).unwrap();
        let gap = (exact - approx) / exact;
        prop_assert!(gap <= 0.10, "n={} a={}: relative gap {:.4}", n, a, gap);
        Ok(())
    })
}

fn cubic_roots() -> Outcome {
    let coeff = -1e3..=1e3f64;
    check(10_000, (coeff.clone(), coeff.clone(), coeff.clone(), coeff), |(a3, a2, a1, a0)| {
        prop_assume!(a3 != 0.0);
        let coeffs = [a3, a2, a1, a0];
        let roots = solve_cubic(a3, a2, a1, a0).unwrap();
        prop_assert!(!roots.is_empty());
        for &x in &roots.roots {
            let scale: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c.abs() * x.abs().powi(3 - k as i32))
                .sum();
            let rel = eval(&coeffs, x).abs() / scale;
            prop_assert!(rel <= 1e-6, "root {} relative residual {}", x, rel);
        }
        let disc = cubic_discriminant(a3, a2, a1, a0);
        let disc_scale = 27.0 * (a3 * a0).powi(2) + 4.0 * (a2.abs().powi(3) * a0.abs() + a3.abs() * a1.abs().powi(3))
            + (a2 * a1).powi(2) + 18.0 * (a3 * a2 * a1 * a0).abs();
        if disc > 1e-9 * disc_scale {
            prop_assert_eq!(roots.len(), 3);
        } else if disc < -1e-9 * disc_scale {
            prop_assert_eq!(roots.len(), 1);
        }
        Ok(())
    })
}

fn numeric_residual() -> Outcome {
    check(CASES, (2usize..3000, 0.0..=2.0f64, 0.0..1.0f64), |(n, a, frac)| {
        let c = 1 + ((n - 1) as f64 * frac) as usize;
        prop_assume!(c < n);
        let d = DemandModel::power_law(n, a).unwrap();
        let r = solve_common_numeric(&d, &cfg(c), DEFAULT_TOL).unwrap();
        prop_assert!(r.residual.abs() <= 1e-8 * n as f64);
        prop_assert!((common_residual(&d, c, r.value) - r.residual).abs() <= 1e-8 * n as f64);
        Ok(())
    })
}

fn numeric_monotone_in_capacity() -> Outcome {
    check(CASES, (10usize..2000, 0.0..=2.0f64), |(n, a)| {
        let d = DemandModel::power_law(n, a).unwrap();
        let mut caps: Vec<usize> = (1..=8).map(|k| (k * (n - 1) / 8).max(1)).collect();
        caps.dedup();
        let times: Vec<f64> = caps
            .iter()
            .map(|&c| solve_common_numeric(&d, &cfg(c), DEFAULT_TOL).unwrap().value)
            .collect();
        for w in times.windows(2) {
            prop_assert!(w[0] < w[1], "capacities {:?} times {:?}", caps, times);
        }
        Ok(())
    })
}

fn closed_form_at_least_capacity() -> Outcome {
    check(CASES, (10usize..3000, 0.0..=1.5f64, 0.0..1.0f64, 2usize..=3), |(n, a, frac, k)| {
        let c = 1 + ((n - 2) as f64 * frac) as usize;
        let d = DemandModel::power_law(n, a).unwrap();
        match solve_common_closed_form(&d, &cfg(c), k).unwrap() {
            ClosedForm::Admissible(r) => prop_assert!(r.value >= c as f64),
            ClosedForm::NoAdmissibleRoot { real_roots, .. } => {
                prop_assert!(real_roots.iter().all(|&r| r < c as f64))
            }
        }
        Ok(())
    })
}

fn closed_form_envelope() -> Outcome {
    check(CASES, (0.0..=0.6f64, 1usize..=200), |(a, c)| {
        let d = DemandModel::power_law(1000, a).unwrap();
        let exact = solve_common_numeric(&d, &cfg(c), DEFAULT_TOL).unwrap().value;
        let closed = solve_common_closed_form(&d, &cfg(c), 3).unwrap();
        let closed = closed.admissible().map(|r| r.value);
        prop_assert!(closed.is_some(), "a={} C={}: no admissible root", a, c);
        let dev = (closed.unwrap() - exact).abs() / exact;
        prop_assert!(dev <= 0.035, "a={} C={}: deviation {:.4}", a, c, dev);
        Ok(())
    })
}

/// Fixed 12-cell grid rather than random draws. A cell where neither
/// truncation has an admissible root is printed as a known deviation.
fn cubic_not_worse_than_quadratic() -> Outcome {
    let mut violations = Vec::new();
    for a in [0.4, 0.6, 0.8] {
        let d = DemandModel::power_law(1000, a).unwrap();
        for c in [50, 100, 150, 200] {
            let exact = solve_common_numeric(&d, &cfg(c), DEFAULT_TOL).unwrap().value;
            let dev = |k| {
                solve_common_closed_form(&d, &cfg(c), k)
                    .unwrap()
                    .admissible()
                    .map(|r| (r.value - exact).abs())
            };
            match (dev(3), dev(2)) {
                (Some(cubic), Some(quad)) if cubic > quad => {
                    violations.push(format!("a={a} C={c}: cubic off by {cubic:.3}, quadratic by {quad:.3}"))
                }
                (None, Some(_)) => violations.push(format!("a={a} C={c}: only the quadratic has a root")),
                (None, None) => println!("    known deviation a={a} C={c}: neither truncation has a root >= C"),
                _ => {}
            }
        }
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations.join("; "))
    }
}

fn master_coefficients_match_expansion() -> Outcome {
    check(CASES, (10usize..5000, 0.0..=1.5f64, 0.0..0.5f64), |(n, a, frac)| {
        let c = 1 + ((n - 2) as f64 * frac) as usize;
        let d = DemandModel::power_law(n, a).unwrap();
        let lambda = d.lambda_norm().unwrap();
        let cf = c as f64;
        let h = |m: i32| harmonic_approx(n, a * m as f64).unwrap();
        let l = |m: i32| lambda.powi(m);
        // Every term of each coefficient, as written out for K = 3.
        let terms: [Vec<f64>; 4] = [
            vec![
                -l(3) / 6.0 * h(3),
                l(4) * cf / 6.0 * h(4),
                -l(5) * cf.powi(2) / 12.0 * h(5),
                l(6) * cf.powi(3) / 36.0 * h(6),
            ],
            vec![
                l(2) / 2.0 * h(2),
                -l(4) * cf.powi(2) / 4.0 * h(4),
                l(5) * cf.powi(3) / 6.0 * h(5),
                -l(6) * cf.powi(4) / 12.0 * h(6),
            ],
            vec![
                -l(1) * h(1),
                l(4) * cf.powi(3) / 6.0 * h(4),
                -l(5) * cf.powi(4) / 12.0 * h(5),
                l(6) * cf.powi(5) / 12.0 * h(6),
            ],
            vec![cf, -l(4) * cf.powi(4) / 12.0 * h(4), -l(6) * cf.powi(6) / 36.0 * h(6)],
        ];
        let got = master_coefficients(&d, &cfg(c), 3).unwrap();
        for (k, t) in terms.iter().enumerate() {
            let want: f64 = t.iter().sum();
            // Relative to the largest term, the natural scale when terms cancel.
            let scale = t.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            prop_assert!(
                (got[k] - want).abs() <= 1e-12 * scale,
                "coefficient {}: {} vs {} (scale {})", k, got[k], want, scale
            );
        }
        Ok(())
    })
}

fn hit_profile_monotone() -> Outcome {
    check(CASES, (2usize..2000, 1e-3..=2.0f64, 0.0..=1e5f64), |(n, a, r)| {
        let d = DemandModel::power_law(n, a).unwrap();
        let h = hit_profile(&d, r).unwrap();
        for w in h.probs.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        prop_assert!(h.probs.iter().all(|p| (0.0..=1.0).contains(p)));
        Ok(())
    })
}

/// Non-increasing vectors in [0, 1] with a capacity below their length.
fn sorted_profile() -> impl Strategy<Value = (Vec<f64>, usize)> {
    prop::collection::vec(1e-6..=1.0f64, 2..400).prop_flat_map(|mut v| {
        v.sort_by(|a, b| b.total_cmp(a));
        let n = v.len();
        (Just(v), 1..n)
    })
}

fn normalize_preserves_order() -> Outcome {
    check(CASES, sorted_profile(), |(v, c)| {
        let p = HitProfile::new(v, Source::Analytic).unwrap();
        let out = proportional_normalize(&p, c).unwrap();
        for w in out.probs.windows(2) {
            prop_assert!(w[0] >= w[1] - 1e-12, "order broken: {} < {}", w[0], w[1]);
        }
        Ok(())
    })
}

fn normalize_idempotent() -> Outcome {
    check(CASES, sorted_profile(), |(v, c)| {
        let p = HitProfile::new(v, Source::Analytic).unwrap();
        let once = proportional_normalize(&p, c).unwrap();
        prop_assume!(once.clipped == 0);
        let twice = proportional_normalize(&once, c).unwrap();
        for (a, b) in once.probs.iter().zip(&twice.probs) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
        Ok(())
    })
}

fn normalize_mass_when_unclipped() -> Outcome {
    check(CASES, sorted_profile(), |(v, c)| {
        let p = HitProfile::new(v, Source::Analytic).unwrap();
        let out = proportional_normalize(&p, c).unwrap();
        if out.clipped == 0 {
            prop_assert!((out.mass - c as f64).abs() <= 1e-9, "mass {} vs {}", out.mass, c);
        }
        let recomputed: f64 = out.probs.iter().sum();
        prop_assert!((recomputed - out.mass).abs() <= 1e-12);
        Ok(())
    })
}

fn small_sim_case() -> impl Strategy<Value = (usize, f64, usize, u64, u64, u64)> {
    (2usize..50, 0.0..=1.5f64).prop_flat_map(|(n, a)| {
        (Just(n), Just(a), 1..=n, 1u64..3000, any::<u64>(), 0u64..100)
    })
}

fn simulation_deterministic() -> Outcome {
    check(CASES, small_sim_case(), |(n, a, c, reqs, seed, warmup)| {
        let d = DemandModel::power_law(n, a).unwrap();
        let first = simulate(&d, &cfg(c), reqs, seed, warmup).unwrap();
        let second = simulate(&d, &cfg(c), reqs, seed, warmup).unwrap();
        prop_assert_eq!(first, second);
        Ok(())
    })
}

fn simulation_counters() -> Outcome {
    check(CASES, small_sim_case(), |(n, a, c, reqs, seed, warmup)| {
        let d = DemandModel::power_law(n, a).unwrap();
        let rep = simulate(&d, &cfg(c), reqs, seed, warmup).unwrap();
        prop_assert_eq!(rep.requests_per_object.iter().sum::<u64>(), rep.total_requests);
        prop_assert!(rep.hits.iter().zip(&rep.requests_per_object).all(|(h, r)| h <= r));
        Ok(())
    })
}

fn lru_state_trace() -> Outcome {
    let case = (1usize..20).prop_flat_map(|n| {
        (Just(n), 0..=n, prop::collection::vec(0..n, 0..300))
    });
    check(CASES, case, |(n, c, trace)| {
        let mut lru = LruState::new(n, c);
        // Reference model: a plain vector, most recent first.
        let mut model: Vec<usize> = Vec::new();
        for obj in trace {
            let hit = lru.access(obj);
            let pos = model.iter().position(|&x| x == obj);
            prop_assert_eq!(hit, pos.is_some());
            if let Some(p) = pos {
                model.remove(p);
            }
            if c > 0 {
                model.insert(0, obj);
                model.truncate(c);
            }
            let order: Vec<usize> = lru.iter().collect();
            prop_assert_eq!(&order, &model);
            prop_assert!(lru.len() <= c);
            if c > 0 {
                prop_assert_eq!(order[0], obj);
            }
        }
        Ok(())
    })
}

fn oracle_mass() -> Outcome {
    let case = (2usize..=6).prop_flat_map(|n| (Just(n), 1..n, 0.0..=2.0f64));
    check(CASES, case, |(n, c, a)| {
        let d = DemandModel::power_law(n, a).unwrap();
        let ex = exact_stationary(&d, &cfg(c)).unwrap();
        prop_assert!((ex.profile.mass - c as f64).abs() <= 1e-10);
        Ok(())
    })
}
