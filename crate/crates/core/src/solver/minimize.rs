use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{SolverConfig, Symmetry};
use crate::conformal::ConformalSpectrum;
use crate::error::{domain, Error, Result};
use crate::functionals::{KProfile, QuotientEvaluator};
use crate::sphere::{analyze, synthesize, Grid, GridField, SpectralField};

/// Floor applied to nodes that the positivity map leaves non-positive.
const POSITIVITY_FLOOR: f64 = 1e-12;
const ARMIJO: f64 = 1e-4;

/// Progress of one minimization run.
#[derive(Debug, Clone, Serialize)]
pub struct SolverState {
    #[serde(skip)]
    pub iterate: GridField,
    /// `Q_p` at the current iterate, which equals `λ_p` at unit constraint.
    pub lambda: f64,
    /// `‖P_σ v − λ Π(K v^p)‖ / λ` in coefficient space.
    pub gradient_norm: f64,
    pub iterations: usize,
    /// `Q_p` after every accepted iteration.
    pub quotient_history: Vec<f64>,
    /// `(max v, argmax node)` after every accepted iteration.
    pub max_history: Vec<(f64, Vec<f64>)>,
    /// Smallest nodal value seen after each positivity step.
    pub min_history: Vec<f64>,
    /// `|∫ K v^{p+1} − 1|` after each renormalization.
    pub constraint_defect: f64,
    pub positivity_repaired: bool,
}

/// Minimizer `v_p` (spectral and nodal), `λ_p` and the run record.
#[derive(Debug, Clone)]
pub struct Minimizer {
    pub coeffs: SpectralField,
    pub lambda: f64,
    pub state: SolverState,
}

impl Minimizer {
    pub fn nodal(&self) -> &GridField {
        &self.state.iterate
    }
}

/// The grid, spectrum and quotient shared by every iteration of a run.
pub(crate) struct Workspace {
    pub(crate) grid: Arc<Grid>,
    pub(crate) spec: ConformalSpectrum,
    pub(crate) quotient: QuotientEvaluator,
    symmetry: Symmetry,
}

impl Workspace {
    pub(crate) fn new(k: &KProfile, config: &SolverConfig) -> Result<Self> {
        config.validate()?;
        let geometry = config.geometry()?;
        let grid = Grid::with_rings(geometry, config.ring_count())?;
        let spec = ConformalSpectrum::for_geometry(&geometry, config.sigma)?;
        if config.symmetry == Symmetry::Antipodal && !k.is_antipodal() {
            return domain("antipodal mode needs an antipodally symmetric K");
        }
        let quotient = QuotientEvaluator::new(&grid, k, config.exponent(), &spec)?;
        Ok(Self { grid, spec, quotient, symmetry: config.symmetry })
    }

    fn project(&self, c: &mut SpectralField) {
        if self.symmetry == Symmetry::Antipodal {
            let g = *c.geometry();
            for (i, v) in c.coeffs_mut().iter_mut().enumerate() {
                if !g.is_even(i) {
                    *v = 0.0;
                }
            }
        }
    }

    /// Scale so that `∫ K v^{p+1} = 1`.
    fn normalize(&self, c: &SpectralField) -> Result<(SpectralField, GridField)> {
        let nodal = synthesize(c, &self.grid)?;
        let d = self.quotient.constraint(nodal.values());
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::ZeroDenominator("∫ K|v|^{p+1} vanished during the iteration".into()));
        }
        let s = d.powf(-1.0 / (self.quotient.exponent() + 1.0));
        Ok((c.scale_by_degree(|_| s), nodal.map(|v| s * v)))
    }

    /// `w = P_σ^{−1} Π(K|v|^{p−1}v)`, renormalized; nodes left non-positive are
    /// floored and the flag is raised.
    fn positivity_map(&self, nodal: &GridField) -> Result<(SpectralField, GridField, bool)> {
        let p = self.quotient.exponent();
        let rhs = GridField::new(
            self.grid.clone(),
            nodal
                .values()
                .iter()
                .zip(self.quotient.k_nodes())
                .map(|(v, k)| k * v.abs().powf(p - 1.0) * v)
                .collect(),
        )?;
        let mut w = analyze(&rhs).scale_by_degree(|k| 1.0 / self.spec.eigenvalue(k));
        self.project(&mut w);
        let (mut w, mut wn) = self.normalize(&w)?;
        let mut repaired = false;
        if wn.values().iter().any(|&v| v <= 0.0) {
            repaired = true;
            let clamped = wn.map(|v| v.max(POSITIVITY_FLOOR));
            let mut c = analyze(&clamped);
            self.project(&mut c);
            (w, wn) = self.normalize(&c)?;
            if wn.values().iter().any(|&v| v <= 0.0) {
                return Err(Error::Positivity(format!(
                    "band-limited iterate stays non-positive (min {:.3e})",
                    wn.values().iter().cloned().fold(f64::INFINITY, f64::min)
                )));
            }
        }
        Ok((w, wn, repaired))
    }
}

/// A positive starting field `1 + ε·(random decaying harmonics)` with a
/// reproducible seed.
pub fn random_initial_field(config: &SolverConfig, amplitude: f64) -> Result<SpectralField> {
    let geometry = config.geometry()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut c = SpectralField::constant(geometry, 1.0);
    let y0 = c.coeffs()[0];
    for (i, v) in c.coeffs_mut().iter_mut().enumerate().skip(1) {
        let k = geometry.degree_of(i) as f64;
        *v = amplitude * y0 * rng.random_range(-1.0..1.0) / (1.0 + k * k);
    }
    Ok(c)
}

/// Minimize `Q_p` over band-limited fields by preconditioned gradient descent
/// with backtracking, each accepted step followed by the positivity map.
pub fn subcritical_minimize(
    k: &KProfile,
    config: &SolverConfig,
    initial: Option<&SpectralField>,
) -> Result<Minimizer> {
    if !(config.tau > 0.0) {
        return domain(format!("the minimization needs τ > 0, got {}", config.tau));
    }
    let ws = Workspace::new(k, config)?;
    minimize_in(&ws, config, initial)
}

pub(crate) fn minimize_in(
    ws: &Workspace,
    config: &SolverConfig,
    initial: Option<&SpectralField>,
) -> Result<Minimizer> {
    let geometry = *ws.grid.geometry();
    let start = match initial {
        Some(c) if *c.geometry() == geometry => c.clone(),
        Some(c) => c.resize(geometry.degree_cap())?,
        None => random_initial_field(config, 0.1)?,
    };
    let mut start = start;
    ws.project(&mut start);
    let (_, n0) = ws.normalize(&start)?;
    let (mut c, mut nodal, mut repaired) = ws.positivity_map(&n0)?;

    let mut quotient_history = Vec::new();
    let mut max_history = Vec::new();
    let mut min_history = Vec::new();
    let mut lambda;
    let mut gradient_norm;
    let mut iterations = 0;
    loop {
        let (parts, grad) = ws.quotient.gradient(&c)?;
        lambda = parts.value;
        // at unit constraint the gradient is 2(P v − λ Π(K v^p))
        gradient_norm = 0.5 * grad.norm() / lambda;
        if !gradient_norm.is_finite() {
            return Err(Error::Divergence("gradient became non-finite".into()));
        }
        if gradient_norm <= config.gradient_tolerance {
            break;
        }
        if iterations == config.max_iterations {
            return Err(Error::Divergence(format!(
                "gradient norm {gradient_norm:.3e} above {:.1e} after {iterations} iterations",
                config.gradient_tolerance
            )));
        }
        let mut dir = grad.scale_by_degree(|k| -1.0 / ws.spec.eigenvalue(k));
        ws.project(&mut dir);
        let slope = grad.dot(&dir);
        let mut t = config.step;
        let mut trial = None;
        while t > 1e-12 {
            let moved = SpectralField::new(
                geometry,
                c.coeffs().iter().zip(dir.coeffs()).map(|(a, d)| a + t * d).collect(),
            )?;
            if let Ok((cand, cand_nodal)) = ws.normalize(&moved) {
                let q = ws.quotient.value(&cand)?;
                if q <= lambda + ARMIJO * t * slope {
                    trial = Some(cand_nodal);
                    break;
                }
            }
            t *= 0.5;
        }
        let base = trial.unwrap_or_else(|| nodal.clone());
        let (next, next_nodal, flag) = ws.positivity_map(&base)?;
        repaired |= flag;
        c = next;
        nodal = next_nodal;
        iterations += 1;
        let q = ws.quotient.value(&c)?;
        quotient_history.push(q);
        let (imax, vmax) = nodal
            .values()
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
        max_history.push((vmax, ws.grid.points()[imax].clone()));
        min_history.push(nodal.values().iter().cloned().fold(f64::INFINITY, f64::min));
    }
    let constraint_defect = (ws.quotient.constraint(nodal.values()) - 1.0).abs();
    let state = SolverState {
        iterate: nodal,
        lambda,
        gradient_norm,
        iterations,
        quotient_history,
        max_history,
        min_history,
        constraint_defect,
        positivity_repaired: repaired,
    };
    Ok(Minimizer { coeffs: c, lambda, state })
}

/// `‖P_σ v − λ Π(K v^q)‖ / ‖P_σ v‖` with `λ` fitted by least squares, for
/// an arbitrary exponent `q`.
pub fn euler_lagrange_residual(
    v: &SpectralField,
    k: &KProfile,
    q: f64,
    grid: &Arc<Grid>,
    spec: &ConformalSpectrum,
) -> Result<(f64, f64)> {
    let cap = grid.geometry().degree_cap();
    let padded = if v.geometry().degree_cap() == cap { v.clone() } else { v.resize(cap)? };
    let nodal = synthesize(&padded, grid)?;
    let kv = k.positive_values_on(grid)?;
    let rhs = GridField::new(
        grid.clone(),
        nodal.values().iter().zip(&kv).map(|(x, k)| k * x.abs().powf(q - 1.0) * x).collect(),
    )?;
    let g = analyze(&rhs).resize(v.geometry().degree_cap())?;
    let pv = v.scale_by_degree(|d| spec.eigenvalue(d));
    let gg = g.dot(&g);
    if !(gg > 0.0) {
        return Err(Error::ZeroDenominator("K v^q has no spectral mass".into()));
    }
    let lambda = pv.dot(&g) / gg;
    let res: f64 = pv
        .coeffs()
        .iter()
        .zip(g.coeffs())
        .map(|(a, b)| (a - lambda * b).powi(2))
        .sum::<f64>()
        .sqrt();
    Ok((res / pv.norm(), lambda))
}
