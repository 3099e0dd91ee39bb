//! Energies and quotients on `S^n`, the Kazdan–Warner integrals, the planar
//! Pohozaev identity, the two-bubble test-function expansion and the
//! index-count hypothesis.

mod index;
mod kprofile;
mod pohozaev;
mod testfn;

use std::sync::Arc;

use crate::conformal::ConformalSpectrum;
use crate::error::{domain, Error, Result};
use crate::sphere::{analyze, synthesize, Grid, GridField, Mode, SpectralField};

pub use index::{index_count_check, IndexCount};
pub use kprofile::{CriticalPoint, KKind, KProfile};
pub use pohozaev::{pohozaev_residual, PohozaevTerms, RadialSamples, RadialWeight, Tail};
pub use testfn::{expansion_constant_a, test_function_field, test_function_quotient, test_function_slope, SlopeFit};

/// `∫ v P_σ v = Σ_k e_k c_k²`.
pub fn energy(v: &SpectralField, spec: &ConformalSpectrum) -> Result<f64> {
    let cap = v.geometry().degree_cap();
    if v.geometry().n() != spec.n() || cap > spec.degree_cap() {
        return Err(Error::GeometryMismatch("spectrum does not cover the field".into()));
    }
    let g = v.geometry();
    Ok(v.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| spec.eigenvalue(g.degree_of(i)) * c * c)
        .sum())
}

/// `‖(1 − Δ)^{σ/2} v‖_{L²}`.
pub fn hs_norm(v: &SpectralField, sigma: f64) -> f64 {
    let g = v.geometry();
    let n = g.n() as f64;
    v.coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let k = g.degree_of(i) as f64;
            (1.0 + k * (k + n - 1.0)).powf(sigma) * c * c
        })
        .sum::<f64>()
        .sqrt()
}

fn check_exponent(p: f64, spec: &ConformalSpectrum) -> Result<()> {
    let critical = spec.critical_exponent();
    if !(p > 1.0 && p <= critical * (1.0 + 1e-14)) {
        return domain(format!("p must lie in (1, {critical}], got {p}"));
    }
    Ok(())
}

/// `Q_p[v] = ∫ v P_σ v / (∫ K|v|^{p+1})^{2/(p+1)}` with the energy taken from
/// the spectral analysis of `v` on its grid.
pub fn sobolev_quotient(v: &GridField, k: &KProfile, p: f64, spec: &ConformalSpectrum) -> Result<f64> {
    let q = QuotientEvaluator::new(v.grid(), k, p, spec)?;
    q.value(&analyze(v))
}

/// Spectral gradient of `Q_p` with respect to the coefficients of `v`, where
/// `v` is synthesized on `grid` for the nonlinear term.
pub fn quotient_gradient(
    v: &SpectralField,
    grid: &Arc<Grid>,
    k: &KProfile,
    p: f64,
    spec: &ConformalSpectrum,
) -> Result<SpectralField> {
    QuotientEvaluator::new(grid, k, p, spec)?.gradient(v).map(|(_, g)| g)
}

/// The pieces of `Q_p` at one point.
#[derive(Debug, Clone)]
pub struct QuotientParts {
    pub numerator: f64,
    pub denominator: f64,
    pub value: f64,
    pub nodal: GridField,
}

/// Evaluates `Q_p` and its gradient for coefficient vectors on a fixed grid,
/// with `K` sampled once.
#[derive(Debug, Clone)]
pub struct QuotientEvaluator {
    grid: Arc<Grid>,
    k_nodes: Vec<f64>,
    p: f64,
    spec: ConformalSpectrum,
}

impl QuotientEvaluator {
    pub fn new(grid: &Arc<Grid>, k: &KProfile, p: f64, spec: &ConformalSpectrum) -> Result<Self> {
        check_exponent(p, spec)?;
        if grid.geometry().n() != spec.n() {
            return Err(Error::GeometryMismatch("grid and spectrum disagree on n".into()));
        }
        let k_nodes = k.positive_values_on(grid)?;
        Ok(Self { grid: grid.clone(), k_nodes, p, spec: spec.clone() })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn k_nodes(&self) -> &[f64] {
        &self.k_nodes
    }

    pub fn exponent(&self) -> f64 {
        self.p
    }

    pub fn spectrum(&self) -> &ConformalSpectrum {
        &self.spec
    }

    /// `∫ K |v|^{p+1}` for nodal values.
    pub fn constraint(&self, values: &[f64]) -> f64 {
        self.grid
            .weights()
            .iter()
            .zip(values.iter().zip(&self.k_nodes))
            .map(|(w, (v, k))| w * k * v.abs().powf(self.p + 1.0))
            .sum()
    }

    pub fn parts(&self, v: &SpectralField) -> Result<QuotientParts> {
        let numerator = energy(v, &self.spec)?;
        let cap = self.grid.geometry().degree_cap();
        let nodal = if v.geometry().degree_cap() == cap {
            synthesize(v, &self.grid)?
        } else if v.geometry().degree_cap() < cap {
            synthesize(&v.resize(cap)?, &self.grid)?
        } else {
            return Err(Error::GeometryMismatch("grid cannot represent the field".into()));
        };
        let denominator = self.constraint(nodal.values());
        if !(denominator > 0.0) {
            return Err(Error::ZeroDenominator("∫ K|v|^{p+1} vanishes".into()));
        }
        let value = numerator / denominator.powf(2.0 / (self.p + 1.0));
        Ok(QuotientParts { numerator, denominator, value, nodal })
    }

    pub fn value(&self, v: &SpectralField) -> Result<f64> {
        Ok(self.parts(v)?.value)
    }

    /// `∂Q/∂c_k = 2 D^{−2/(p+1)} (e_k c_k − (N/D) g_k)` with
    /// `g = analyze(K|v|^{p−1}v)`.
    pub fn gradient(&self, v: &SpectralField) -> Result<(QuotientParts, SpectralField)> {
        let parts = self.parts(v)?;
        let p = self.p;
        let nonlinear = GridField::new(
            self.grid.clone(),
            parts
                .nodal
                .values()
                .iter()
                .zip(&self.k_nodes)
                .map(|(v, k)| k * v.abs().powf(p - 1.0) * v)
                .collect(),
        )?;
        let g = analyze(&nonlinear).resize(v.geometry().degree_cap())?;
        let ratio = parts.numerator / parts.denominator;
        let scale = 2.0 / parts.denominator.powf(2.0 / (p + 1.0));
        let geom = v.geometry();
        let coeffs = v
            .coeffs()
            .iter()
            .zip(g.coeffs())
            .enumerate()
            .map(|(i, (c, gk))| scale * (self.spec.eigenvalue(geom.degree_of(i)) * c - ratio * gk))
            .collect();
        Ok((parts, SpectralField::new(*geom, coeffs)?))
    }
}

/// `∫ ⟨∇K, ∇ξ_j⟩ |v|^{2n/(n−2σ)}` for `j = 1..=n+1`. Since `∇K` is tangential
/// this is the `j`-th ambient component of `∇K` integrated against the weight.
pub fn kazdan_warner(v: &GridField, k: &KProfile, j: usize, sigma: f64) -> Result<f64> {
    let grid = v.grid();
    let n = grid.geometry().n();
    if j == 0 || j > n + 1 {
        return domain(format!("coordinate index must lie in 1..={}, got {j}", n + 1));
    }
    let nf = n as f64;
    if !(sigma > 0.0 && sigma < nf / 2.0) {
        return domain(format!("σ must lie in (0, n/2), got {sigma}"));
    }
    if grid.geometry().mode() == Mode::Zonal && j <= n {
        // a zonal integrand is odd under the reflection ξ_j ↦ −ξ_j
        return Ok(0.0);
    }
    let q = 2.0 * nf / (nf - 2.0 * sigma);
    Ok(grid
        .points()
        .iter()
        .zip(grid.weights())
        .zip(v.values())
        .map(|((xi, w), val)| w * k.gradient(xi)[j - 1] * val.abs().powf(q))
        .sum())
}

/// All `n + 1` Kazdan–Warner integrals.
pub fn kazdan_warner_all(v: &GridField, k: &KProfile, sigma: f64) -> Result<Vec<f64>> {
    let n = v.grid().geometry().n();
    (1..=n + 1).map(|j| kazdan_warner(v, k, j, sigma)).collect()
}
