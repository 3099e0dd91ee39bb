//! Graded quadrature in the polar angle for integrands with an algebraic
//! endpoint singularity at `θ = 0`.
//!
//! The interval `[0, θ_max]` is split at `θ₀ = arccos(1 − δ)`. On `[0, θ₀]`
//! the substitution `θ = θ₀ s^q` with integer `q ≥ ⌈4/(β + 1)⌉` turns
//! `θ^β · smooth` into `s^{q(β+1)−1} · smooth`, which Gauss–Legendre handles
//! well; beyond `θ₀` geometric panels `[2^j θ₀, 2^{j+1} θ₀]` resolve the
//! remaining algebraic variation. The Gauss order is doubled until two
//! successive values agree.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::specfun::{gauss_jacobi, QuadratureRule1D};

/// Split point in `t = cos θ`: the singular piece is `t ∈ [1 − δ, 1]`.
pub const SPLIT_DELTA: f64 = 1e-3;
/// Agreement required between successive refinements.
pub const REFINE_TOL: f64 = 1e-8;

const MIN_ORDER_LOG2: usize = 3;
const MAX_ORDER_LOG2: usize = 10;

fn legendre_rule(log2: usize) -> &'static QuadratureRule1D {
    static RULES: OnceLock<Vec<QuadratureRule1D>> = OnceLock::new();
    let rules = RULES.get_or_init(|| {
        (0..=MAX_ORDER_LOG2)
            .map(|j| gauss_jacobi(1 << j, 0.0).expect("Gauss–Legendre rule"))
            .collect()
    });
    &rules[log2]
}

/// `arccos(1 − δ)`, computed as `2 arcsin(√(δ/2))`.
pub fn split_angle() -> f64 {
    2.0 * (SPLIT_DELTA / 2.0).sqrt().asin()
}

/// Grading power for a leading behaviour `θ^β`.
fn grading_power(beta: f64) -> i32 {
    ((4.0 / (beta + 1.0)).ceil() as i32).clamp(1, 64)
}

/// One pass at fixed order: returns `(∫ f, ∫ |f|)`.
fn pass<F: Fn(f64, f64) -> f64>(f: &F, rule: &QuadratureRule1D, q: i32, theta_max: f64) -> (f64, f64) {
    let theta0 = split_angle().min(theta_max);
    let mut acc = 0.0;
    let mut abs = 0.0;
    let qf = q as f64;
    // singular piece: θ = θ₀ s^q, s ∈ [0, 1]
    for (x, w) in rule.iter() {
        let s = 0.5 * (x + 1.0);
        let theta = theta0 * s.powi(q);
        let jac = theta0 * qf * s.powi(q - 1) * 0.5;
        let gap = 2.0 * (0.5 * theta).sin().powi(2);
        let v = w * jac * f(theta, gap);
        acc += v;
        abs += v.abs();
    }
    let mut lo = theta0;
    while lo < theta_max {
        let mut hi = (2.0 * lo).min(theta_max);
        // fold a sliver at the end into the last panel
        if theta_max - hi < 0.25 * (hi - lo) {
            hi = theta_max;
        }
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, w) in rule.iter() {
            let theta = mid + half * x;
            let gap = 2.0 * (0.5 * theta).sin().powi(2);
            let v = w * half * f(theta, gap);
            acc += v;
            abs += v.abs();
        }
        lo = hi;
    }
    (acc, abs)
}

/// `∫₀^{θ_max} f(θ, 1 − cos θ) dθ` for an integrand behaving like `θ^β` at 0.
pub fn integrate_polar<F: Fn(f64, f64) -> f64>(f: F, beta: f64, theta_max: f64) -> Result<f64> {
    integrate_polar_with_floor(f, beta, theta_max, 0.0)
}

/// [`integrate_polar`] with refinement judged against `max(∫|f|, floor)`,
/// for integrands that may cancel to zero.
pub(crate) fn integrate_polar_with_floor<F: Fn(f64, f64) -> f64>(
    f: F,
    beta: f64,
    theta_max: f64,
    floor: f64,
) -> Result<f64> {
    if !(beta > -1.0) {
        return Err(Error::NonIntegrable(format!(
            "integrand behaves like θ^{beta} at the pole"
        )));
    }
    let q = grading_power(beta);
    let mut prev = pass(&f, legendre_rule(MIN_ORDER_LOG2), q, theta_max).0;
    for j in MIN_ORDER_LOG2 + 1..=MAX_ORDER_LOG2 {
        let (cur, abs) = pass(&f, legendre_rule(j), q, theta_max);
        if !cur.is_finite() {
            return Err(Error::NonIntegrable("integrand is not finite".into()));
        }
        if (cur - prev).abs() <= REFINE_TOL * abs.max(floor).max(f64::MIN_POSITIVE) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::NonConvergence(format!(
        "polar quadrature did not settle at order {} (β = {beta})",
        1 << MAX_ORDER_LOG2
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn smooth_integrals() {
        let v = integrate_polar(|th, _| th.sin(), 1.0, PI).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let v = integrate_polar(|th, _| th.sin().powi(3), 3.0, PI).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn algebraic_singularity() {
        // ∫₀^π θ^{−0.7} dθ = π^{0.3}/0.3
        let v = integrate_polar(|th, _| th.powf(-0.7), -0.7, PI).unwrap();
        assert!((v - PI.powf(0.3) / 0.3).abs() < 1e-9 * v);
        // |ξ − ζ|^{−1} on S³ at the pole: ∫ (2 gap)^{−1/2} sin²θ dθ · 4π = 16π/3
        let v = integrate_polar(|th, g| (2.0 * g).powf(-0.5) * th.sin().powi(2), 1.0, PI).unwrap();
        assert!((4.0 * PI * v - 16.0 * PI / 3.0).abs() < 1e-10);
    }

    #[test]
    fn flags_non_integrable() {
        assert!(matches!(
            integrate_polar(|th, _| 1.0 / th, -1.0, PI),
            Err(Error::NonIntegrable(_))
        ));
    }
}
