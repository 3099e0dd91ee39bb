//! Rotations and same-centre conformal dilations of `S^n`.
//!
//! `φ_{ξ₀,λ} = F_{ξ₀} ∘ (x ↦ λx) ∘ F_{ξ₀}^{−1}` where `F_{ξ₀}` is stereographic
//! projection sending `0` to `ξ₀`. Along each geodesic from `ξ₀` it acts by
//! `tan(d'/2) = λ tan(d/2)`, pushing mass away from `ξ₀` as `λ` grows, so that
//! `|det dφ|^{(n−2σ)/(2n)} = v_{ξ₀,λ}` concentrates at `ξ₀`.

use std::sync::Arc;

use crate::error::{domain, Error, Result};
use crate::sphere::{Grid, GridField, Mode, SphereFunction};
use crate::vecmath::{dot, geodesic, norm, normalized};

/// A rotation of `R^{n+1}` stored as a dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    dim: usize,
    matrix: Vec<f64>,
}

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        let mut matrix = vec![0.0; dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = 1.0;
        }
        Self { dim, matrix }
    }

    /// The rotation in the plane of `a` and `b` carrying `a` to `b` (both unit).
    /// For antipodal `a`, `b` the plane is completed with a coordinate axis.
    pub fn between(a: &[f64], b: &[f64]) -> Self {
        let dim = a.len();
        let a = normalized(a);
        let b = normalized(b);
        let c = dot(&a, &b).clamp(-1.0, 1.0);
        let mut w: Vec<f64> = b.iter().zip(&a).map(|(bi, ai)| bi - c * ai).collect();
        let wn = norm(&w);
        if wn < 1e-15 {
            if c > 0.0 {
                return Self::identity(dim);
            }
            // pick the coordinate axis least aligned with a
            let k = (0..dim)
                .min_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs()))
                .unwrap_or(0);
            w = vec![0.0; dim];
            w[k] = 1.0;
            let d = dot(&w, &a);
            w.iter_mut().zip(&a).for_each(|(wi, ai)| *wi -= d * ai);
            w = normalized(&w);
        } else {
            w.iter_mut().for_each(|v| *v /= wn);
        }
        let angle = geodesic(&a, &b);
        let (s, co) = angle.sin_cos();
        let mut matrix = Self::identity(dim).matrix;
        for i in 0..dim {
            for j in 0..dim {
                matrix[i * dim + j] += (co - 1.0) * (a[i] * a[j] + w[i] * w[j])
                    + s * (w[i] * a[j] - a[i] * w[j]);
            }
        }
        Self { dim, matrix }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| dot(&self.matrix[i * self.dim..(i + 1) * self.dim], x))
            .collect()
    }

    pub fn inverse(&self) -> Self {
        let d = self.dim;
        let mut matrix = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                matrix[j * d + i] = self.matrix[i * d + j];
            }
        }
        Self { dim: d, matrix }
    }
}

/// The conformal dilation of `S^n` with centre `ξ₀` and scale `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusMap {
    center: Vec<f64>,
    scale: f64,
}

impl MobiusMap {
    pub fn new(center: &[f64], scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return domain(format!("Möbius scale must be positive, got {scale}"));
        }
        let r = norm(center);
        if !(r > 0.0) || !r.is_finite() {
            return domain("Möbius centre must be a nonzero point");
        }
        Ok(Self { center: center.iter().map(|v| v / r).collect(), scale })
    }

    pub fn identity(n: usize) -> Self {
        Self { center: crate::vecmath::north_pole(n), scale: 1.0 }
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `φ_{ξ₀,λ} ∘ φ_{ξ₀,μ} = φ_{ξ₀,λμ}`.
    pub fn compose(&self, other: &MobiusMap) -> Result<MobiusMap> {
        if geodesic(&self.center, &other.center) > 1e-12 {
            return Err(Error::GeometryMismatch("only same-centre dilations compose here".into()));
        }
        Ok(Self { center: self.center.clone(), scale: self.scale * other.scale })
    }

    pub fn inverse(&self) -> MobiusMap {
        Self { center: self.center.clone(), scale: 1.0 / self.scale }
    }

    /// `(d, u)`: geodesic distance from the centre and unit tangent direction
    /// (zero at the centre and its antipode).
    fn polar(&self, xi: &[f64]) -> (f64, Vec<f64>) {
        let d = geodesic(xi, &self.center);
        let c = dot(xi, &self.center);
        let mut u: Vec<f64> = xi.iter().zip(&self.center).map(|(x, z)| x - c * z).collect();
        let un = norm(&u);
        if un > 0.0 {
            u.iter_mut().for_each(|v| *v /= un);
        }
        (d, u)
    }

    /// `φ(ξ)`.
    pub fn apply(&self, xi: &[f64]) -> Vec<f64> {
        let (d, u) = self.polar(xi);
        let half = (0.5 * d).tan();
        let d_new = if half.is_finite() { 2.0 * (self.scale * half).atan() } else { d };
        let (s, c) = d_new.sin_cos();
        self.center.iter().zip(&u).map(|(z, ui)| c * z + s * ui).collect()
    }

    /// `|det dφ(ξ)| = (2λ/((1 + cos d) + λ²(1 − cos d)))^n`.
    pub fn conformal_factor(&self, xi: &[f64]) -> f64 {
        let n = self.center.len() - 1;
        self.factor_root(xi).powi(n as i32)
    }

    /// `|det dφ(ξ)|^{1/n}`.
    fn factor_root(&self, xi: &[f64]) -> f64 {
        // 1 ± cos d from chord lengths, accurate at both ends
        let minus: f64 = xi.iter().zip(&self.center).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / 2.0;
        let plus: f64 = xi.iter().zip(&self.center).map(|(a, b)| (a + b).powi(2)).sum::<f64>() / 2.0;
        let l = self.scale;
        2.0 * l / (plus + l * l * minus)
    }

    /// `|det dφ(ξ)|^{(n−2σ)/(2n)}`.
    pub fn factor_power(&self, xi: &[f64], sigma: f64) -> f64 {
        let n = (self.center.len() - 1) as f64;
        self.factor_root(xi).powf((n - 2.0 * sigma) / 2.0)
    }
}

fn check_axis(grid: &Grid, center: &[f64]) -> Result<()> {
    let n = grid.geometry().n();
    if grid.geometry().mode() == Mode::Zonal && (1.0 - center[n].abs()) > 1e-12 {
        return Err(Error::GeometryMismatch(
            "a zonal grid only supports centres on the symmetry axis".into(),
        ));
    }
    Ok(())
}

/// `T_φ v = (v ∘ φ)|det dφ|^{(n−2σ)/(2n)}` sampled on `grid`.
pub fn t_phi_sample(
    v: &dyn SphereFunction,
    phi: &MobiusMap,
    sigma: f64,
    grid: &Arc<Grid>,
) -> Result<GridField> {
    if phi.center.len() != grid.geometry().ambient() {
        return Err(Error::GeometryMismatch("Möbius map and grid live on different spheres".into()));
    }
    check_axis(grid, &phi.center)?;
    Ok(GridField::from_fn(grid, |xi| v.value_at(&phi.apply(xi)) * phi.factor_power(xi, sigma)))
}

/// `T_φ v` for a sampled field, using the grid's interpolation for `v ∘ φ`.
pub fn t_phi_transform(v: &GridField, phi: &MobiusMap, sigma: f64) -> Result<GridField> {
    t_phi_sample(v, phi, sigma, v.grid())
}

/// Used by tests as an independent route to `φ`: rotate the centre to the
/// south pole, project, dilate, lift and rotate back.
#[cfg(test)]
pub(crate) fn mobius_via_projection(phi: &MobiusMap, xi: &[f64]) -> (Vec<f64>, f64) {
    use super::stereo::{stereo_forward, stereo_inverse};
    let n = xi.len() - 1;
    let south = crate::vecmath::south_pole(n);
    let r = Rotation::between(&south, &phi.center);
    let back = r.inverse();
    let x = stereo_inverse(&back.apply(xi)).expect("finite point");
    let jac_in = stereo_forward(&x).1;
    let y: Vec<f64> = x.iter().map(|v| phi.scale * v).collect();
    let (eta, jac_out) = stereo_forward(&y);
    let factor = phi.scale.powi(n as i32) * jac_out / jac_in;
    (r.apply(&eta), factor)
}
