//! Real roots of quadratic and cubic polynomials in closed form.
//!
//! Coefficients are given highest degree first. Every solver re-evaluates
//! the input polynomial at each returned root and reports the absolute value
//! as that root's residual.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

/// Roots closer than this (relative to `max(1, |root|)`) are merged.
pub const ROOT_MERGE_TOL: f64 = 1e-9;

/// Real roots in ascending order, with `|p(root)|` for each one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealRoots {
    pub roots: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl RealRoots {
    fn from_candidates(coeffs: &[f64], mut roots: Vec<f64>) -> Self {
        roots.retain(|r| r.is_finite());
        roots.sort_by(f64::total_cmp);
        roots.dedup_by(|b, a| (*b - *a).abs() <= ROOT_MERGE_TOL * a.abs().max(1.0));
        let residuals = roots.iter().map(|&r| eval(coeffs, r).abs()).collect();
        Self { roots, residuals }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }
}

/// Horner evaluation, coefficients highest degree first.
pub fn eval(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

fn eval_with_derivative(coeffs: &[f64], x: f64) -> (f64, f64) {
    coeffs.iter().fold((0.0, 0.0), |(p, dp), &c| (p * x + c, dp * x + p))
}

fn check_finite(coeffs: &[f64]) -> Result<()> {
    match coeffs.iter().find(|c| !c.is_finite()) {
        Some(c) => Err(invalid(format!("non-finite polynomial coefficient {c}"))),
        None => Ok(()),
    }
}

/// One Newton correction, kept only if it lowers `|p(x)|`.
fn polish(coeffs: &[f64], x: f64) -> f64 {
    let (p, dp) = eval_with_derivative(coeffs, x);
    if dp == 0.0 || p == 0.0 {
        return x;
    }
    let next = x - p / dp;
    if next.is_finite() && eval(coeffs, next).abs() < p.abs() {
        next
    } else {
        x
    }
}

/// Real roots of `a2 x^2 + a1 x + a0`.
///
/// A zero leading coefficient falls back to the linear equation; if `a1` is
/// zero as well the result is empty.
pub fn solve_quadratic(a2: f64, a1: f64, a0: f64) -> Result<RealRoots> {
    let coeffs = [a2, a1, a0];
    check_finite(&coeffs)?;
    if a2 == 0.0 {
        if a1 == 0.0 {
            return Ok(RealRoots::from_candidates(&coeffs, vec![]));
        }
        return Ok(RealRoots::from_candidates(&coeffs, vec![-a0 / a1]));
    }
    let disc = a1 * a1 - 4.0 * a2 * a0;
    let candidates = if disc < 0.0 {
        vec![]
    } else if disc == 0.0 {
        vec![-a1 / (2.0 * a2)]
    } else {
        // Avoids cancellation between -a1 and sqrt(disc).
        let q = -0.5 * (a1 + a1.signum_nonzero() * disc.sqrt());
        if q == 0.0 {
            vec![0.0]
        } else {
            vec![q / a2, a0 / q]
        }
    };
    Ok(RealRoots::from_candidates(&coeffs, candidates))
}

/// Discriminant of `a3 x^3 + a2 x^2 + a1 x + a0`: positive for three
/// distinct real roots, negative for one real root and a complex pair.
pub fn cubic_discriminant(a3: f64, a2: f64, a1: f64, a0: f64) -> f64 {
    18.0 * a3 * a2 * a1 * a0 - 4.0 * a2.powi(3) * a0 + a2 * a2 * a1 * a1
        - 4.0 * a3 * a1.powi(3)
        - 27.0 * a3 * a3 * a0 * a0
}

/// Real roots of `a3 x^3 + a2 x^2 + a1 x + a0`.
///
/// Uses the trigonometric form when all three roots are real and Cardano's
/// formula otherwise, followed by a single Newton polish per root. A zero
/// `a3` delegates to [`solve_quadratic`].
pub fn solve_cubic(a3: f64, a2: f64, a1: f64, a0: f64) -> Result<RealRoots> {
    let coeffs = [a3, a2, a1, a0];
    check_finite(&coeffs)?;
    if a3 == 0.0 {
        if a2 == 0.0 && a1 == 0.0 {
            return Err(Error::Degenerate(
                "cubic with zero leading coefficients".into(),
            ));
        }
        return solve_quadratic(a2, a1, a0);
    }

    // x = t - b/3 turns the monic cubic into t^3 + p t + q.
    let (b, c, d) = (a2 / a3, a1 / a3, a0 / a3);
    let shift = b / 3.0;
    let p = c - b * b / 3.0;
    let q = 2.0 * b.powi(3) / 27.0 - b * c / 3.0 + d;

    let half_q = q / 2.0;
    let third_p = p / 3.0;
    let inner = half_q * half_q + third_p.powi(3);

    let depressed: Vec<f64> = if p == 0.0 && q == 0.0 {
        vec![0.0]
    } else if inner < 0.0 {
        // Three real roots; p < 0 is guaranteed here.
        let m = 2.0 * (-third_p).sqrt();
        let cos_arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = cos_arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * PI * k as f64 / 3.0).cos())
            .collect()
    } else if inner == 0.0 {
        // Repeated root.
        let u = (-half_q).cbrt();
        vec![2.0 * u, -u]
    } else {
        let s = (half_q.abs() + inner.sqrt()).cbrt();
        let u = -half_q.signum_nonzero() * s;
        let t = if u == 0.0 { 0.0 } else { u - third_p / u };
        vec![t]
    };

    let roots = depressed
        .into_iter()
        .map(|t| polish(&coeffs, t - shift))
        .collect();
    Ok(RealRoots::from_candidates(&coeffs, roots))
}

trait SignumNonzero {
    fn signum_nonzero(self) -> f64;
}

impl SignumNonzero for f64 {
    /// Like `signum`, but maps `+0.0` and `-0.0` to `1.0`.
    fn signum_nonzero(self) -> f64 {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn assert_roots(got: &RealRoots, expected: &[f64], tol: f64) {
        assert_eq!(got.roots.len(), expected.len(), "{got:?}");
        for (g, e) in got.roots.iter().zip(expected) {
            assert_abs_diff_eq!(*g, *e, epsilon = tol);
        }
        assert_eq!(got.residuals.len(), got.roots.len());
    }

    #[test]
    fn quadratic_factored() {
        assert_roots(&solve_quadratic(1.0, -3.0, 2.0).unwrap(), &[1.0, 2.0], 1e-14);
    }

    #[test]
    fn quadratic_complex_pair_is_empty() {
        assert!(solve_quadratic(1.0, 0.0, 1.0).unwrap().is_empty());
    }

    #[test]
    fn quadratic_linear_and_constant_fallbacks() {
        assert_roots(&solve_quadratic(0.0, 2.0, -4.0).unwrap(), &[2.0], 0.0);
        assert!(solve_quadratic(0.0, 0.0, 3.0).unwrap().is_empty());
    }

    #[test]
    fn quadratic_double_root_is_merged() {
        assert_roots(&solve_quadratic(1.0, -4.0, 4.0).unwrap(), &[2.0], 1e-12);
    }

    #[test]
    fn quadratic_rejects_non_finite() {
        assert!(solve_quadratic(f64::NAN, 1.0, 1.0).is_err());
        assert!(solve_cubic(1.0, f64::INFINITY, 1.0, 1.0).is_err());
    }

    #[test]
    fn cubic_three_distinct() {
        assert_roots(&solve_cubic(1.0, -6.0, 11.0, -6.0).unwrap(), &[1.0, 2.0, 3.0], 1e-12);
    }

    #[test]
    fn cubic_single_real_cube_root() {
        assert_roots(&solve_cubic(1.0, 0.0, 0.0, -8.0).unwrap(), &[2.0], 1e-14);
    }

    #[test]
    fn cubic_triple_root() {
        assert_roots(&solve_cubic(1.0, -3.0, 3.0, -1.0).unwrap(), &[1.0], 1e-12);
    }

    #[test]
    fn cubic_double_plus_simple() {
        // (x - 1)^2 (x + 2) = x^3 - 3x + 2
        assert_roots(&solve_cubic(1.0, 0.0, -3.0, 2.0).unwrap(), &[-2.0, 1.0], 1e-7);
    }

    #[test]
    fn cubic_with_zero_leading_delegates() {
        assert_roots(&solve_cubic(0.0, 1.0, -3.0, 2.0).unwrap(), &[1.0, 2.0], 1e-14);
        assert!(matches!(solve_cubic(0.0, 0.0, 0.0, 1.0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn cubic_residuals_are_reported() {
        let roots = solve_cubic(2.0, -3.0, -11.0, 6.0).unwrap();
        for (r, res) in roots.roots.iter().zip(&roots.residuals) {
            assert_eq!(*res, eval(&[2.0, -3.0, -11.0, 6.0], *r).abs());
            assert!(*res <= 1e-6 * 6.0);
        }
    }

    #[test]
    fn discriminant_sign() {
        assert!(cubic_discriminant(1.0, -6.0, 11.0, -6.0) > 0.0);
        assert!(cubic_discriminant(1.0, 0.0, 0.0, -8.0) < 0.0);
        assert_eq!(cubic_discriminant(1.0, -3.0, 3.0, -1.0), 0.0);
    }
}
