//! The intertwining operator `P_σ`, its inverse, stereographic transfer,
//! Möbius dilations and the bubble families.

mod bubble;
mod mobius;
mod riesz;
mod stereo;

use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::specfun::{gamma_ratio, lgamma};
use crate::sphere::{Geometry, SpectralField};

pub use bubble::{bubble_k, bubble_plane, bubble_sphere, Bubble, PlaneBubble, SphereBubble};
pub use mobius::{t_phi_sample, t_phi_transform, MobiusMap, Rotation};
pub use riesz::{
    radial_riesz_kernel, radial_riesz_potential, radial_riesz_potential_derivative, riesz_direct,
};
pub use stereo::{pull_to_plane, push_to_sphere, stereo_forward, stereo_inverse, PlanarPullback};

/// Eigenvalues of `P_σ` on `S^n` and the associated constants.
///
/// `e_k = Γ(k + n/2 + σ)/Γ(k + n/2 − σ)`, `c(n,σ) = e_0` and the Riesz
/// constant `c_{n,σ} = Γ((n − 2σ)/2)/(2^{2σ} π^{n/2} Γ(σ))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConformalSpectrum {
    n: usize,
    sigma: f64,
    eigenvalues: Vec<f64>,
    c_n_sigma: f64,
    riesz_constant: f64,
}

impl ConformalSpectrum {
    pub fn new(n: usize, sigma: f64, degree_cap: usize) -> Result<Self> {
        let nf = n as f64;
        if n == 0 || !(sigma > 0.0 && sigma < nf / 2.0) {
            return domain(format!("σ must lie in (0, n/2), got σ = {sigma}, n = {n}"));
        }
        let eigenvalues = (0..=degree_cap)
            .map(|k| {
                let kf = k as f64;
                gamma_ratio(kf + nf / 2.0 + sigma, kf + nf / 2.0 - sigma)
            })
            .collect::<Result<Vec<_>>>()?;
        let riesz_constant = (lgamma((nf - 2.0 * sigma) / 2.0) - lgamma(sigma)).exp()
            / (2f64.powf(2.0 * sigma) * std::f64::consts::PI.powf(nf / 2.0));
        Ok(Self { n, sigma, c_n_sigma: eigenvalues[0], eigenvalues, riesz_constant })
    }

    pub fn for_geometry(geometry: &Geometry, sigma: f64) -> Result<Self> {
        Self::new(geometry.n(), sigma, geometry.degree_cap())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn degree_cap(&self) -> usize {
        self.eigenvalues.len() - 1
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, k: usize) -> f64 {
        self.eigenvalues[k]
    }

    /// `c(n,σ) = P_σ(1)`.
    pub fn c_n_sigma(&self) -> f64 {
        self.c_n_sigma
    }

    /// `c_{n,σ}`, the constant of the Riesz kernel of `P_σ^{−1}`.
    pub fn riesz_constant(&self) -> f64 {
        self.riesz_constant
    }

    /// `(n + 2σ)/(n − 2σ)`.
    pub fn critical_exponent(&self) -> f64 {
        critical_exponent(self.n, self.sigma)
    }

    /// `(n − 2σ)/2`, the homogeneity of bubbles.
    pub fn bubble_exponent(&self) -> f64 {
        (self.n as f64 - 2.0 * self.sigma) / 2.0
    }

    fn check(&self, f: &SpectralField) -> Result<()> {
        let g = f.geometry();
        if g.n() != self.n || g.degree_cap() > self.degree_cap() {
            return Err(Error::GeometryMismatch(format!(
                "spectrum for n = {} up to degree {} cannot act on {:?}",
                self.n,
                self.degree_cap(),
                g
            )));
        }
        Ok(())
    }
}

/// `(n + 2σ)/(n − 2σ)`.
pub fn critical_exponent(n: usize, sigma: f64) -> f64 {
    let nf = n as f64;
    (nf + 2.0 * sigma) / (nf - 2.0 * sigma)
}

/// Multiply the degree-`k` coefficients by `e_k`.
pub fn apply_psigma(f: &SpectralField, spec: &ConformalSpectrum) -> Result<SpectralField> {
    spec.check(f)?;
    Ok(f.scale_by_degree(|k| spec.eigenvalues[k]))
}

/// Multiply the degree-`k` coefficients by `1/e_k`.
pub fn apply_inverse_psigma(f: &SpectralField, spec: &ConformalSpectrum) -> Result<SpectralField> {
    spec.check(f)?;
    Ok(f.scale_by_degree(|k| 1.0 / spec.eigenvalues[k]))
}

#[cfg(test)]
mod tests;
