use serde::Serialize;

use crate::conformal::{radial_riesz_potential, radial_riesz_potential_derivative};
use crate::error::{domain, Error, Result};
use crate::specfun::sphere_area;

/// A radial function on `B_R ⊂ R^n` sampled at increasing radii from `0` to `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSamples {
    radii: Vec<f64>,
    values: Vec<f64>,
}

impl RadialSamples {
    pub fn new(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if radii.len() != values.len() || radii.len() < 2 {
            return domain("radial samples need at least two matching radii and values");
        }
        if radii[0] != 0.0 || radii.windows(2).any(|w| w[1] <= w[0]) {
            return domain("radii must start at 0 and increase strictly");
        }
        Ok(Self { radii, values })
    }

    /// `nodes` equally spaced radii on `[0, R]`, including both ends.
    pub fn uniform(radius: f64, nodes: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        if !(radius > 0.0) || nodes < 2 {
            return domain("uniform radial grid needs R > 0 and at least two nodes");
        }
        let radii: Vec<f64> = (0..nodes).map(|i| radius * i as f64 / (nodes - 1) as f64).collect();
        let values = radii.iter().map(|&r| f(r)).collect();
        Self::new(radii, values)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn radius(&self) -> f64 {
        self.radii[self.radii.len() - 1]
    }

    /// Trapezoidal `∫_{B_R} f(|x|) dx` for nodal values `f`.
    fn ball_integral(&self, n: usize, f: &[f64]) -> f64 {
        let m = n as i32 - 1;
        let acc: f64 = self
            .radii
            .windows(2)
            .zip(f.windows(2))
            .map(|(r, v)| 0.5 * (r[1] - r[0]) * (v[0] * r[0].powi(m) + v[1] * r[1].powi(m)))
            .sum();
        sphere_area(n - 1) * acc
    }
}

/// A radial weight `K(|x|)` on `R^n`.
pub trait RadialWeight: Sync {
    fn value(&self, r: f64) -> f64;

    /// `x·∇K = r K'(r)`.
    fn radial_derivative(&self, _r: f64) -> f64 {
        0.0
    }
}

impl RadialWeight for f64 {
    fn value(&self, _r: f64) -> f64 {
        *self
    }
}

/// Source of the far-field term `h_R(x) = ∫_{|y|>R} K u^p |x − y|^{2σ−n} dy`.
pub enum Tail<'a> {
    /// `h_R` and `x·∇h_R` at the sample radii.
    Supplied { h: Vec<f64>, x_dot_grad_h: Vec<f64> },
    /// `u` on `|y| > R`, from which `h_R` is integrated.
    Exterior(&'a (dyn Fn(f64) -> f64 + Sync)),
}

/// The constituents of the Pohozaev identity and its residual `LHS − RHS`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PohozaevTerms {
    /// `((n−2σ)/2 − n/(p+1)) ∫ K u^{p+1}`.
    pub volume: f64,
    /// `−(1/(p+1)) ∫ x·∇K u^{p+1}`.
    pub k_gradient: f64,
    /// `((n−2σ)/2) ∫ K u^p h_R`.
    pub tail: f64,
    /// `∫ x·∇h_R K u^p`.
    pub tail_gradient: f64,
    /// `−(R/(p+1)) ∫_{∂B_R} K u^{p+1}`.
    pub boundary: f64,
    pub residual: f64,
    /// Largest absolute constituent.
    pub scale: f64,
}

/// Residual of the Pohozaev identity on `B_R` for a radial `u` solving
/// `u = ∫_{B_R} K u^p |x − y|^{2σ−n} dy + h_R`.
pub fn pohozaev_residual(
    u: &RadialSamples,
    k: &dyn RadialWeight,
    p: f64,
    n: usize,
    sigma: f64,
    tail: Option<Tail<'_>>,
) -> Result<PohozaevTerms> {
    let nf = n as f64;
    if n == 0 || !(sigma > 0.0 && sigma < nf / 2.0) || !(p > 0.0) {
        return domain(format!("need σ ∈ (0, n/2) and p > 0, got σ = {sigma}, p = {p}"));
    }
    if u.values.iter().any(|&v| v < 0.0) {
        return domain("u must be nonnegative on B_R");
    }
    let radius = u.radius();
    let e = (nf - 2.0 * sigma) / 2.0;
    let kv: Vec<f64> = u.radii.iter().map(|&r| k.value(r)).collect();
    let xk: Vec<f64> = u.radii.iter().map(|&r| k.radial_derivative(r)).collect();
    let up1: Vec<f64> = u.values.iter().map(|v| v.powf(p + 1.0)).collect();
    let kup: Vec<f64> = u.values.iter().zip(&kv).map(|(v, k)| k * v.powf(p)).collect();

    let (h, xh) = match tail {
        Some(Tail::Supplied { h, x_dot_grad_h }) => {
            if h.len() != u.radii.len() || x_dot_grad_h.len() != u.radii.len() {
                return Err(Error::MissingTail("tail samples do not match the radii".into()));
            }
            (h, x_dot_grad_h)
        }
        Some(Tail::Exterior(_)) if sigma <= 0.5 => {
            return domain("x·∇h_R is unbounded at |x| = R when σ ≤ 1/2; supply the tail instead");
        }
        Some(Tail::Exterior(outer)) => {
            let g = |s: f64| k.value(s) * outer(s).max(0.0).powf(p);
            let mut h = Vec::with_capacity(u.radii.len());
            let mut xh = Vec::with_capacity(u.radii.len());
            for &r in &u.radii {
                h.push(radial_riesz_potential(n, sigma, &g, r, radius, f64::INFINITY)?);
                xh.push(r * radial_riesz_potential_derivative(n, sigma, &g, r, radius, f64::INFINITY)?);
            }
            (h, xh)
        }
        None if u.values.iter().all(|&v| v == 0.0) => (vec![0.0; u.radii.len()], vec![0.0; u.radii.len()]),
        None => return Err(Error::MissingTail("h_R was neither supplied nor computable".into())),
    };

    let weighted = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x * y).collect() };
    let volume = (e - nf / (p + 1.0)) * u.ball_integral(n, &weighted(&kv, &up1));
    let k_gradient = -u.ball_integral(n, &weighted(&xk, &up1)) / (p + 1.0);
    let tail = e * u.ball_integral(n, &weighted(&kup, &h));
    let tail_gradient = u.ball_integral(n, &weighted(&kup, &xh));
    let last = u.radii.len() - 1;
    let boundary =
        -radius / (p + 1.0) * sphere_area(n - 1) * radius.powi(n as i32 - 1) * kv[last] * up1[last];
    let residual = volume + k_gradient - (tail + tail_gradient + boundary);
    let scale = [volume, k_gradient, tail, tail_gradient, boundary]
        .iter()
        .fold(0.0f64, |m, t| m.max(t.abs()));
    Ok(PohozaevTerms { volume, k_gradient, tail, tail_gradient, boundary, residual, scale })
}
