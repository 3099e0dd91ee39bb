use serde::{Deserialize, Serialize};

use crate::conformal::critical_exponent;
use crate::error::{Error, Result};
use crate::sphere::{Geometry, Mode};

/// Whether iterates are projected onto antipodally even functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    #[default]
    None,
    Antipodal,
}

/// How the concentration point `ξ★` is located on full `S²` grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgmaxMethod {
    /// The node with the largest value.
    Grid,
    /// The largest node refined by a compass search in the tangent plane,
    /// evaluating the field exactly.
    #[default]
    Refined,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub n: usize,
    pub sigma: f64,
    pub mode: Mode,
    /// Band limit `L` of the iterate.
    pub degree_cap: usize,
    /// Quadrature rings; `0` selects `2L + 2`.
    pub rings: usize,
    /// `τ = (n + 2σ)/(n − 2σ) − p`.
    pub tau: f64,
    /// Initial trial step of the line search.
    pub step: f64,
    pub max_iterations: usize,
    /// Stop when `‖P_σ v − λ Π(K v^p)‖ ≤ tolerance · λ` at unit constraint.
    pub gradient_tolerance: f64,
    pub symmetry: Symmetry,
    /// Blow-up threshold `M★` on `max v`.
    pub blowup_threshold: f64,
    /// Radius of the rescaled-profile comparison.
    pub probe_radius: f64,
    /// Planar radius `ρ` within which critical points of `w̄` are counted.
    pub rho: f64,
    pub argmax: ArgmaxMethod,
    /// Relative residual below which a continuation run counts as converged.
    pub critical_tolerance: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n: 3,
            sigma: 1.0,
            mode: Mode::Zonal,
            degree_cap: 32,
            rings: 0,
            tau: 1.0,
            step: 1.0,
            max_iterations: 4000,
            gradient_tolerance: 1e-10,
            symmetry: Symmetry::None,
            blowup_threshold: 50.0,
            probe_radius: 10.0,
            rho: 0.5,
            argmax: ArgmaxMethod::Refined,
            critical_tolerance: 1e-4,
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let nf = self.n as f64;
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n == 0 || !(self.sigma > 0.0 && self.sigma < nf / 2.0) {
            return bad(format!("σ must lie in (0, n/2), got σ = {}, n = {}", self.sigma, self.n));
        }
        if !(self.tau >= 0.0) || self.exponent() <= 1.0 {
            return bad(format!("τ must be ≥ 0 with p > 1, got τ = {}", self.tau));
        }
        if !(self.step > 0.0) {
            return bad(format!("step size must be positive, got {}", self.step));
        }
        if !(self.blowup_threshold > 1.0) {
            return bad(format!("blow-up threshold must exceed 1, got {}", self.blowup_threshold));
        }
        if !(self.gradient_tolerance > 0.0) || self.max_iterations == 0 {
            return bad("tolerance and iteration budget must be positive".into());
        }
        if self.mode == Mode::FullS2 && self.n != 2 {
            return bad("full spherical harmonics are only available on S²".into());
        }
        if self.rings != 0 && self.rings <= self.degree_cap {
            return bad(format!("need more than L = {} rings, got {}", self.degree_cap, self.rings));
        }
        Ok(())
    }

    pub fn exponent(&self) -> f64 {
        critical_exponent(self.n, self.sigma) - self.tau
    }

    pub fn geometry(&self) -> Result<Geometry> {
        Geometry::new(self.n, self.mode, self.degree_cap)
    }

    pub fn ring_count(&self) -> usize {
        if self.rings == 0 {
            2 * self.degree_cap + 2
        } else {
            self.rings
        }
    }
}
