//! Stereographic projection `F(x) = (2x/(1 + |x|²), (|x|² − 1)/(1 + |x|²))`
//! from `R^n` onto `S^n` minus the north pole, with `F(0)` the south pole.
//!
//! A function `v` on the sphere corresponds to `u(x) = H(x) v(F(x))` on the
//! plane, `H = |J_F|^{(n−2σ)/(2n)} = (2/(1 + |x|²))^{(n−2σ)/2}`.

use std::sync::Arc;

use super::Rotation;
use crate::error::{domain, Result};
use crate::sphere::{Grid, GridField, SphereFunction};
use crate::vecmath::south_pole;

/// `(F(x), |J_F(x)|)` with `|J_F| = (2/(1 + |x|²))^n`.
pub fn stereo_forward(x: &[f64]) -> (Vec<f64>, f64) {
    let n = x.len();
    let r2: f64 = x.iter().map(|v| v * v).sum();
    let d = 1.0 + r2;
    let mut xi: Vec<f64> = x.iter().map(|v| 2.0 * v / d).collect();
    xi.push((r2 - 1.0) / d);
    (xi, (2.0 / d).powi(n as i32))
}

/// `F^{−1}(ξ) = ξ'/(1 − ξ_{n+1})`; `None` at the north pole.
pub fn stereo_inverse(xi: &[f64]) -> Option<Vec<f64>> {
    let n = xi.len() - 1;
    // 1 − ξ_{n+1} = |ξ'|²/(1 + ξ_{n+1}) is accurate in the southern half
    let top = xi[n];
    let rho2: f64 = xi[..n].iter().map(|v| v * v).sum();
    let denom = if top < 0.0 { 1.0 - top } else { rho2 / (1.0 + top) };
    if denom <= 0.0 {
        return None;
    }
    Some(xi[..n].iter().map(|v| v / denom).collect())
}

/// `H(x) = (2/(1 + |x|²))^{(n−2σ)/2}`.
pub(crate) fn conformal_weight(x: &[f64], sigma: f64) -> f64 {
    let n = x.len() as f64;
    let r2: f64 = x.iter().map(|v| v * v).sum();
    (2.0 / (1.0 + r2)).powf((n - 2.0 * sigma) / 2.0)
}

/// The planar representative `u(x) = H(x) v(R F(x))` of a function on the
/// sphere, where `R` is a rotation taking the south pole to the chosen centre.
pub struct PlanarPullback<'a> {
    v: &'a dyn SphereFunction,
    sigma: f64,
    rotation: Option<Rotation>,
}

impl<'a> PlanarPullback<'a> {
    /// Re-centre the projection so that `x = 0` corresponds to `center`.
    pub fn centered_at(mut self, center: &[f64]) -> Self {
        let n = center.len() - 1;
        self.rotation = Some(Rotation::between(&south_pole(n), center));
        self
    }

    /// The sphere point `R F(x)` under `x`.
    pub fn sphere_point(&self, x: &[f64]) -> Vec<f64> {
        let (xi, _) = stereo_forward(x);
        match &self.rotation {
            Some(r) => r.apply(&xi),
            None => xi,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        conformal_weight(x, self.sigma) * self.v.value_at(&self.sphere_point(x))
    }

    /// Values along the ray `r e₁`.
    pub fn radial_profile(&self, n: usize, radii: &[f64]) -> Vec<f64> {
        radii
            .iter()
            .map(|&r| {
                let mut x = vec![0.0; n];
                x[0] = r;
                self.eval(&x)
            })
            .collect()
    }
}

/// Planar representative of `v` with respect to the standard projection.
pub fn pull_to_plane(v: &dyn SphereFunction, sigma: f64) -> PlanarPullback<'_> {
    PlanarPullback { v, sigma, rotation: None }
}

/// Inverse transfer: `v(ξ) = u(F^{−1}ξ)/H(F^{−1}ξ)` at every node of `grid`.
pub fn push_to_sphere(
    u: &dyn Fn(&[f64]) -> f64,
    sigma: f64,
    grid: &Arc<Grid>,
) -> Result<GridField> {
    let mut values = Vec::with_capacity(grid.len());
    for p in grid.points() {
        let Some(x) = stereo_inverse(p) else {
            return domain("push_to_sphere cannot evaluate at the north pole");
        };
        values.push(u(&x) / conformal_weight(&x, sigma));
    }
    GridField::new(Arc::clone(grid), values)
}
