//! The extremal bubble families on the sphere and on the plane.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::specfun::lgamma;
use crate::sphere::{Grid, GridField, Mode, SphereFunction};
use crate::vecmath::norm;

/// `v_{ξ₀,λ}(ξ) = (2λ/(2 + (λ² − 1)(1 − cos d(ξ, ξ₀))))^{(n−2σ)/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereBubble {
    pub center: Vec<f64>,
    pub lambda: f64,
    pub sigma: f64,
}

impl SphereBubble {
    pub fn new(center: &[f64], lambda: f64, sigma: f64) -> Result<Self> {
        if !(lambda > 0.0) {
            return domain(format!("bubble scale must be positive, got {lambda}"));
        }
        let r = norm(center);
        Ok(Self { center: center.iter().map(|v| v / r).collect(), lambda, sigma })
    }

    pub fn exponent(&self) -> f64 {
        ((self.center.len() - 1) as f64 - 2.0 * self.sigma) / 2.0
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        let minus: f64 = xi.iter().zip(&self.center).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / 2.0;
        let plus: f64 = xi.iter().zip(&self.center).map(|(a, b)| (a + b).powi(2)).sum::<f64>() / 2.0;
        let l = self.lambda;
        (2.0 * l / (plus + l * l * minus)).powf(self.exponent())
    }
}

impl SphereFunction for SphereBubble {
    fn value_at(&self, xi: &[f64]) -> f64 {
        self.eval(xi)
    }
}

/// `u(x) = A·λ^{(n−2σ)/2}(1 + kλ²|x − x₀|²)^{−(n−2σ)/2}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneBubble {
    pub center: Vec<f64>,
    pub lambda: f64,
    pub amplitude: f64,
    pub k: f64,
    pub sigma: f64,
}

impl PlaneBubble {
    pub fn n(&self) -> usize {
        self.center.len()
    }

    pub fn exponent(&self) -> f64 {
        (self.n() as f64 - 2.0 * self.sigma) / 2.0
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().zip(&self.center).map(|(a, b)| (a - b).powi(2)).sum();
        self.eval_radial(r2.sqrt())
    }

    /// Value at distance `r` from the centre.
    pub fn eval_radial(&self, r: f64) -> f64 {
        let e = self.exponent();
        let l = self.lambda;
        self.amplitude * l.powf(e) * (1.0 + self.k * l * l * r * r).powf(-e)
    }

    /// `du/dr` at distance `r`.
    pub fn derivative_radial(&self, r: f64) -> f64 {
        let e = self.exponent();
        let l2k = self.k * self.lambda * self.lambda;
        -2.0 * e * l2k * r * self.eval_radial(r) / (1.0 + l2k * r * r)
    }
}

/// Either bubble family.
#[derive(Debug, Clone, PartialEq)]
pub enum Bubble {
    Sphere(SphereBubble),
    Plane(PlaneBubble),
}

impl Bubble {
    /// Value at a point of `S^n` (sphere variant) or `R^n` (plane variant).
    pub fn eval(&self, p: &[f64]) -> f64 {
        match self {
            Bubble::Sphere(b) => b.eval(p),
            Bubble::Plane(b) => b.eval(p),
        }
    }
}

/// `k = (K₀ π^{n/2} Γ(σ)/Γ(n/2 + σ))^{1/σ}`, the concentration constant that
/// makes the planar bubble solve `u = ∫ K₀ u^p |x − y|^{2σ−n} dy`.
pub fn bubble_k(k0: f64, n: usize, sigma: f64) -> f64 {
    let nf = n as f64;
    let log = k0.ln() + 0.5 * nf * PI.ln() + lgamma(sigma) - lgamma(nf / 2.0 + sigma);
    (log / sigma).exp()
}

/// `v_{ξ₀,λ}` sampled on `grid`.
pub fn bubble_sphere(center: &[f64], lambda: f64, sigma: f64, grid: &Arc<Grid>) -> Result<GridField> {
    let g = grid.geometry();
    if center.len() != g.ambient() {
        return Err(Error::GeometryMismatch(format!(
            "centre has {} coordinates, grid is on S^{}",
            center.len(),
            g.n()
        )));
    }
    let b = SphereBubble::new(center, lambda, sigma)?;
    if g.mode() == Mode::Zonal && (1.0 - b.center[g.n()].abs()) > 1e-12 {
        return Err(Error::GeometryMismatch(
            "a zonal grid only supports bubbles centred on the symmetry axis".into(),
        ));
    }
    Ok(GridField::from_fn(grid, |xi| b.eval(xi)))
}

/// The planar bubble with unit amplitude solving the integral equation with
/// constant curvature `K₀`.
pub fn bubble_plane(center: &[f64], lambda: f64, k0: f64, sigma: f64) -> Result<PlaneBubble> {
    if !(k0 > 0.0) {
        return domain(format!("K₀ must be positive, got {k0}"));
    }
    if !(lambda > 0.0) {
        return domain(format!("bubble scale must be positive, got {lambda}"));
    }
    let n = center.len();
    if n == 0 || !(sigma > 0.0 && sigma < n as f64 / 2.0) {
        return domain(format!("σ must lie in (0, n/2), got σ = {sigma}, n = {n}"));
    }
    Ok(PlaneBubble {
        center: center.to_vec(),
        lambda,
        amplitude: 1.0,
        k: bubble_k(k0, n, sigma),
        sigma,
    })
}
