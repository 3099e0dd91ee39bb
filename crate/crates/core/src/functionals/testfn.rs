use std::f64::consts::PI;
use std::sync::Arc;

use serde::Serialize;

use super::KProfile;
use crate::conformal::ConformalSpectrum;
use crate::error::{domain, Error, Result};
use crate::specfun::{lgamma, sphere_area};
use crate::sphere::{integrate_polar, Grid, GridField};
use crate::vecmath::{dot, north_pole};

/// `A = 2^{−(n−2σ)/2} ω_{n−1} 2^n ∫₀^∞ r^{n−1}(1 + r²)^{−(n+2σ)/2} dr`, using
/// `∫₀^∞ r^{n−1}(1 + r²)^{−(n+2σ)/2} dr = Γ(n/2)Γ(σ)/(2Γ(n/2 + σ))`.
pub fn expansion_constant_a(n: usize, sigma: f64) -> Result<f64> {
    let nf = n as f64;
    if n == 0 || !(sigma > 0.0 && sigma < nf / 2.0) {
        return domain(format!("σ must lie in (0, n/2), got σ = {sigma}, n = {n}"));
    }
    let radial = 0.5 * (lgamma(nf / 2.0) + lgamma(sigma) - lgamma(nf / 2.0 + sigma)).exp();
    Ok(2f64.powf(-(nf - 2.0 * sigma) / 2.0) * sphere_area(n - 1) * 2f64.powi(n as i32) * radial)
}

/// `v_{i,β} = (√(β² − 1)/(β − cos r_i))^{(n−2σ)/2}` written with `b = β − 1`
/// and `gap = 1 − cos r_i`.
fn single(b: f64, gap: f64, e: f64) -> f64 {
    ((b * (b + 2.0)).sqrt() / (b + gap)).powf(e)
}

/// `v_β = v_{1,β} + v_{2,β}` with `ξ₁ = ξ` and `ξ₂ = −ξ`, sampled on a grid.
pub fn test_function_field(beta: f64, xi1: &[f64], sigma: f64, grid: &Arc<Grid>) -> Result<GridField> {
    if !(beta > 1.0) {
        return domain(format!("β must exceed 1, got {beta}"));
    }
    let n = grid.geometry().n();
    let e = (n as f64 - 2.0 * sigma) / 2.0;
    let b = beta - 1.0;
    Ok(GridField::from_fn(grid, |x| {
        let c = dot(x, xi1);
        single(b, 1.0 - c, e) + single(b, 1.0 + c, e)
    }))
}

fn check_poles(k: &KProfile, n: usize) -> Result<()> {
    if !k.is_zonal() {
        return Err(Error::GeometryMismatch(
            "the test function quotient needs a zonal K with maxima at the poles".into(),
        ));
    }
    let north = north_pole(n);
    let south: Vec<f64> = north.iter().map(|v| -v).collect();
    let (kn, ks) = (k.value(&north), k.value(&south));
    if (kn - ks).abs() > 1e-12 * kn.abs() {
        return domain(format!("K must take equal values at the poles, got {kn} and {ks}"));
    }
    Ok(())
}

/// `Q[v_β]` at the critical exponent for `K` zonal with equal maxima at the
/// two poles. Since each `v_{i,β}` solves `P_σ v = c(n,σ) v^p`, the numerator
/// is `2c(n,σ)(ω_n + ∫ v₁ v₂^p)`; both integrals are done in the polar angle.
pub fn test_function_quotient(beta: f64, k: &KProfile, spec: &ConformalSpectrum) -> Result<f64> {
    if !(beta > 1.0) {
        return domain(format!("β must exceed 1, got {beta}"));
    }
    let n = spec.n();
    check_poles(k, n)?;
    let e = spec.bubble_exponent();
    let p = spec.critical_exponent();
    let b = beta - 1.0;
    let power = n as i32 - 1;
    let k_at = |t: f64| {
        let mut xi = vec![0.0; n + 1];
        xi[0] = (1.0 - t * t).max(0.0).sqrt();
        xi[n] = t;
        k.value(&xi)
    };
    // fold the southern hemisphere onto the northern one
    let (cross, mass) = {
        let both = |theta: f64, gap: f64, f: &dyn Fn(f64, f64, f64) -> f64| {
            let t = 1.0 - gap;
            let near = single(b, gap, e);
            let far = single(b, 2.0 - gap, e);
            (f(near, far, t) + f(far, near, -t)) * theta.sin().powi(power)
        };
        let cross = integrate_polar(|th, g| both(th, g, &|v1, v2, _| v1 * v2.powf(p)), power as f64, PI / 2.0)?;
        let mass = integrate_polar(
            |th, g| both(th, g, &|v1, v2, t| k_at(t) * (v1 + v2).powf(p + 1.0)),
            power as f64,
            PI / 2.0,
        )?;
        (cross, mass)
    };
    let omega_m = sphere_area(n - 1);
    let numerator = 2.0 * spec.c_n_sigma() * (sphere_area(n) + omega_m * cross);
    Ok(numerator / (omega_m * mass).powf(2.0 / (p + 1.0)))
}

/// Result of fitting the normalized test-function quotient against
/// `x = (β − 1)^{(n−2σ)/2}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub betas: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub slope: f64,
    pub expected: f64,
}

impl SlopeFit {
    pub fn relative_error(&self) -> f64 {
        (self.slope - self.expected).abs() / self.expected.abs()
    }
}

/// Samples `y = Q[v_β] K(ξ₁)^{(n−2σ)/n}/(c(n,σ) ω_n^{2σ/n} 2^{2σ/n}) − 1` at
/// `samples` equally spaced `β ∈ [lo, hi]` and fits `y ≈ s x + q x²`. The
/// expected slope is `−A/ω_n`.
pub fn test_function_slope(
    k: &KProfile,
    spec: &ConformalSpectrum,
    lo: f64,
    hi: f64,
    samples: usize,
) -> Result<SlopeFit> {
    if !(lo > 1.0 && hi > lo && hi <= 2.0) || samples < 3 {
        return domain("slope fit needs 1 < lo < hi ≤ 2 and at least three samples");
    }
    let n = spec.n();
    let nf = n as f64;
    let sigma = spec.sigma();
    let e = spec.bubble_exponent();
    let k1 = k.value(&north_pole(n));
    let norm = spec.c_n_sigma() * (sphere_area(n) * 2.0).powf(2.0 * sigma / nf) / k1.powf((nf - 2.0 * sigma) / nf);
    let betas: Vec<f64> = (0..samples).map(|i| lo + (hi - lo) * i as f64 / (samples - 1) as f64).collect();
    let mut x = Vec::with_capacity(samples);
    let mut y = Vec::with_capacity(samples);
    for &beta in &betas {
        x.push((beta - 1.0).powf(e));
        y.push(test_function_quotient(beta, k, spec)? / norm - 1.0);
    }
    // normal equations for y = s x + q x²
    let s = |a: i32| x.iter().map(|v| v.powi(a)).sum::<f64>();
    let t = |a: i32| x.iter().zip(&y).map(|(v, w)| v.powi(a) * w).sum::<f64>();
    let (s2, s3, s4) = (s(2), s(3), s(4));
    let (t1, t2) = (t(1), t(2));
    let det = s2 * s4 - s3 * s3;
    if det.abs() <= f64::EPSILON * s2 * s4 {
        return domain("degenerate fit design");
    }
    let slope = (t1 * s4 - t2 * s3) / det;
    let expected = -expansion_constant_a(n, sigma)? / sphere_area(n);
    Ok(SlopeFit { betas, x, y, slope, expected })
}

