//! Gauss–Jacobi rules for the symmetric weight `(1 − t²)^α` on `[−1, 1]`.
//!
//! The orthogonal family for this weight is `C_m^λ` with `λ = α + 1/2`.
//! Nodes are the zeros of `C_m^λ`, found by Newton's method on the
//! recurrence (with deflation against the zeros already found) from the
//! Chebyshev-type guesses `cos((i − 1/4 + α/2)π / (m + α + 1/2))`. Only the
//! positive half is computed; the rule is mirrored so that it is exactly
//! symmetric.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::specfun::gamma_ratio_unchecked;

/// A quadrature rule `∫₋₁¹ f(t)(1 − t²)^α dt ≈ Σ w_i f(t_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule1D {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    alpha: f64,
}

impl QuadratureRule1D {
    /// Nodes in increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Exponent of the weight function.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ w_i f(t_i)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    /// Pairs `(node, weight)`.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// The zeroth moment `∫₋₁¹ (1 − t²)^α dt = √π Γ(α + 1)/Γ(α + 3/2)`.
    pub fn total_mass(alpha: f64) -> f64 {
        PI.sqrt() * gamma_ratio_unchecked(alpha + 1.0, alpha + 1.5)
    }
}

/// `(C_m^λ(x), C_{m−1}^λ(x))`.
fn gegenbauer_pair(m: usize, lambda: f64, x: f64) -> (f64, f64) {
    let (mut prev, mut cur) = (1.0, 2.0 * lambda * x);
    if m == 1 {
        return (cur, prev);
    }
    for j in 1..m {
        let jf = j as f64;
        let next = (2.0 * x * (jf + lambda) * cur - (jf + 2.0 * lambda - 1.0) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Derivative of `C_m^λ` from `(1 − x²) C_m' = −m x C_m + (m + 2λ − 1) C_{m−1}`.
fn gegenbauer_derivative(m: usize, lambda: f64, x: f64, cm: f64, cm1: f64) -> f64 {
    let mf = m as f64;
    (-mf * x * cm + (mf + 2.0 * lambda - 1.0) * cm1) / (1.0 - x * x)
}

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;

/// The `m`-point Gauss rule for the weight `(1 − t²)^α`, exact for polynomials
/// of degree at most `2m − 1`.
pub fn gauss_jacobi(m: usize, alpha: f64) -> Result<QuadratureRule1D> {
    if m == 0 {
        return domain("gauss_jacobi requires at least one node");
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return domain(format!("gauss_jacobi requires a finite α ≥ 0, got {alpha}"));
    }
    let lambda = alpha + 0.5;
    let mf = m as f64;

    // h_{m−1} = ∫ (C_{m−1}^λ)² (1 − t²)^α, built up from h_0 by its ratio.
    let mut h = QuadratureRule1D::total_mass(alpha);
    for j in 1..m {
        let jf = j as f64;
        h *= (jf + 2.0 * lambda - 1.0) * (jf - 1.0 + lambda) / (jf * (jf + lambda));
    }
    let lead_ratio = 2.0 * (lambda + mf - 1.0) / mf;

    let half = m / 2;
    let mut positive: Vec<(f64, f64)> = Vec::with_capacity(half + 1);
    for i in 0..half {
        let theta = (i as f64 + 0.75 + alpha / 2.0) * PI / (mf + alpha + 0.5);
        let mut x = theta.cos();
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (cm, cm1) = gegenbauer_pair(m, lambda, x);
            let d = gegenbauer_derivative(m, lambda, x, cm, cm1);
            let deflate: f64 = positive.iter().map(|&(r, _)| 1.0 / (x - r)).sum();
            let dx = cm / (d - cm * deflate);
            x -= dx;
            if dx.abs() <= NEWTON_TOL {
                converged = true;
                break;
            }
        }
        if !converged || !(x > 0.0 && x < 1.0) {
            return Err(Error::NonConvergence(format!(
                "Gauss–Jacobi node {i} of {m} (α = {alpha}) did not converge"
            )));
        }
        let (cm, cm1) = gegenbauer_pair(m, lambda, x);
        let d = gegenbauer_derivative(m, lambda, x, cm, cm1);
        positive.push((x, h * lead_ratio / (cm1 * d)));
    }

    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for &(x, w) in &positive {
        nodes.push(-x);
        weights.push(w);
    }
    if m % 2 == 1 {
        let (cm, cm1) = gegenbauer_pair(m, lambda, 0.0);
        let d = gegenbauer_derivative(m, lambda, 0.0, cm, cm1);
        nodes.push(0.0);
        weights.push(h * lead_ratio / (cm1 * d));
    }
    for &(x, w) in positive.iter().rev() {
        nodes.push(x);
        weights.push(w);
    }

    let strictly_increasing = nodes.windows(2).all(|p| p[0] < p[1]);
    if !strictly_increasing || weights.iter().any(|&w| !(w > 0.0)) {
        return Err(Error::NonConvergence(format!(
            "Gauss–Jacobi rule with {m} nodes (α = {alpha}) is degenerate"
        )));
    }
    Ok(QuadratureRule1D { nodes, weights, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::lgamma;

    /// `∫₋₁¹ t^{2j} (1 − t²)^α dt = B(j + 1/2, α + 1)`.
    fn even_moment(j: usize, alpha: f64) -> f64 {
        let a = j as f64 + 0.5;
        let b = alpha + 1.0;
        (lgamma(a) + lgamma(b) - lgamma(a + b)).exp()
    }

    #[test]
    fn one_point_legendre() {
        let r = gauss_jacobi(1, 0.0).unwrap();
        assert_eq!(r.nodes(), &[0.0]);
        assert!((r.weights()[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_point_moments() {
        let r = gauss_jacobi(2, 0.0).unwrap();
        assert!((r.integrate(|t| t * t) - 2.0 / 3.0).abs() < 1e-15);
        assert!((r.nodes()[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn total_weight_for_half() {
        let r = gauss_jacobi(17, 0.5).unwrap();
        let s: f64 = r.weights().iter().sum();
        assert!((s - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn weight_sums_and_layout() {
        for &alpha in &[0.0, 0.5, 1.0, 1.5, 2.5, 4.0] {
            for &m in &[1usize, 2, 3, 8, 33, 200, 600] {
                let r = gauss_jacobi(m, alpha).unwrap();
                assert_eq!(r.len(), m);
                let s: f64 = r.weights().iter().sum();
                let want = QuadratureRule1D::total_mass(alpha);
                assert!((s - want).abs() < 1e-12 * want, "m={m} α={alpha}: {s} vs {want}");
                assert!(r.nodes().iter().all(|&t| t > -1.0 && t < 1.0));
                for (a, b) in r.nodes().iter().zip(r.nodes().iter().rev()) {
                    assert_eq!(*a, -*b);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(gauss_jacobi(0, 0.0).is_err());
        assert!(gauss_jacobi(3, -0.25).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn exact_on_polynomials(
                m in 1usize..40,
                alpha in prop::sample::select(vec![0.0, 0.5, 1.0, 1.5, 2.0, 3.5]),
                seed in prop::collection::vec(-1.0f64..1.0, 80),
            ) {
                let r = gauss_jacobi(m, alpha).unwrap();
                let coeffs = &seed[..2 * m];
                let poly = |t: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c);
                let quad = r.integrate(poly);
                // odd moments vanish
                let exact: f64 = coeffs
                    .iter()
                    .enumerate()
                    .filter(|(d, _)| d % 2 == 0)
                    .map(|(d, c)| c * even_moment(d / 2, alpha))
                    .sum();
                let scale: f64 = coeffs
                    .iter()
                    .enumerate()
                    .filter(|(d, _)| d % 2 == 0)
                    .map(|(d, c)| c.abs() * even_moment(d / 2, alpha))
                    .sum::<f64>()
                    .max(1e-300);
                prop_assert!((quad - exact).abs() <= 1e-12 * scale.max(exact.abs()));
            }
        }
    }
}
