//! Nyström discretization of the linear integral equation
//! `u(x) = ∫_{B_3} V(y) u(y) |x − y|^{2σ−n} dy + h(x)` on small Euclidean
//! balls, with discrete Harnack, Hölder and Brezis–Kato type diagnostics.

mod ensemble;
mod grid;
mod kernel;

pub use ensemble::{random_potential, run_ensemble, write_ensemble_csv, EnsembleConfig, EnsembleReport, EnsembleRow};
pub use grid::BallGrid;
pub use kernel::{assemble_kernel, solve_linear_ie, spectral_radius, KernelMatrix, SolveMethod};

use crate::error::{domain, Error, Result};

/// `max u / min u` over the nodes of the closed unit ball.
pub fn harnack_ratio(u: &[f64], grid: &BallGrid) -> Result<f64> {
    check_len(u, grid)?;
    let inner = grid.indices_within(1.0);
    if inner.is_empty() {
        return domain("no grid nodes inside the unit ball");
    }
    let (lo, hi) = inner.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &i| (lo.min(u[i]), hi.max(u[i])));
    if !(lo > 0.0) {
        return domain(format!("Harnack ratio needs u > 0 on the unit ball, found {lo}"));
    }
    Ok(hi / lo)
}

/// `max |u(x) − u(z)| / |x − z|^α` over pairs of nodes in the unit ball.
pub fn holder_seminorm(u: &[f64], grid: &BallGrid, alpha: f64) -> Result<f64> {
    holder_seminorm_within(u, grid, alpha, 1.0)
}

pub(crate) fn holder_seminorm_within(u: &[f64], grid: &BallGrid, alpha: f64, radius: f64) -> Result<f64> {
    check_len(u, grid)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("Hölder exponent must lie in (0, 1), got {alpha}"));
    }
    let nodes = grid.indices_within(radius);
    let x = grid.centers();
    let mut best: f64 = 0.0;
    for (a, &i) in nodes.iter().enumerate() {
        for &j in &nodes[a + 1..] {
            let d2: f64 = x[i].iter().zip(&x[j]).map(|(p, q)| (p - q).powi(2)).sum();
            best = best.max((u[i] - u[j]).abs() / d2.powf(0.5 * alpha));
        }
    }
    Ok(best)
}

fn check_len(u: &[f64], grid: &BallGrid) -> Result<()> {
    if u.len() != grid.len() {
        return Err(Error::GeometryMismatch(format!("field has {} values, grid has {} cells", u.len(), grid.len())));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
