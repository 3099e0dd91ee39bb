use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{assemble_kernel, harnack_ratio, holder_seminorm, holder_seminorm_within, solve_linear_ie};
use super::{BallGrid, KernelMatrix, SolveMethod};
use crate::error::{domain, Result};

/// Parameters of a random-potential ensemble on `B_3`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleConfig {
    pub n: usize,
    pub sigma: f64,
    pub cells_per_axis: usize,
    pub samples: usize,
    pub first_seed: u64,
    /// Bound on `‖V‖_{L^p(B_3)}` and on `‖V‖_{L^{n/2σ}(B_3)}`.
    pub norm_bound: f64,
    /// Integrability exponent `p` of `V`; `n/σ` when absent.
    pub lp_exponent: Option<f64>,
    /// Hölder exponent; `σ/2` when absent.
    pub holder_alpha: Option<f64>,
    /// `h = c₀^{(x₁+1)/2}`, so `max h = c₀ min h` on the unit ball.
    pub harnack_c0: f64,
    /// Number of random Fourier modes in the Gaussian field.
    pub modes: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n: 2,
            sigma: 0.5,
            cells_per_axis: 24,
            samples: 100,
            first_seed: 0,
            norm_bound: 0.1,
            lp_exponent: None,
            holder_alpha: None,
            harnack_c0: 1.0,
            modes: 16,
        }
    }
}

impl EnsembleConfig {
    pub fn lp(&self) -> f64 {
        self.lp_exponent.unwrap_or(self.n as f64 / self.sigma)
    }

    pub fn alpha(&self) -> f64 {
        self.holder_alpha.unwrap_or(0.5 * self.sigma)
    }

    fn validate(&self) -> Result<()> {
        let nf = self.n as f64;
        if !(self.sigma > 0.0 && self.sigma < nf / 2.0) {
            return domain(format!("need 0 < σ < n/2, got σ = {}", self.sigma));
        }
        if !(self.lp() > nf / (2.0 * self.sigma)) {
            return domain(format!("V must lie in L^p with p > n/2σ, got p = {}", self.lp()));
        }
        if !(self.norm_bound > 0.0 && self.harnack_c0 >= 1.0) || self.samples == 0 || self.modes == 0 {
            return domain("need a positive norm bound, c₀ ≥ 1, and at least one sample and mode");
        }
        Ok(())
    }
}

/// One solved sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleRow {
    pub seed: u64,
    pub norm_v: f64,
    pub harnack_ratio: f64,
    pub holder_ratio: f64,
    pub bk_ratio: f64,
    pub grid_cells: usize,
    /// `min(u − h)` over the grid.
    pub positivity_margin: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EnsembleReport {
    pub config: EnsembleConfig,
    pub rows: Vec<EnsembleRow>,
    pub max_harnack_ratio: f64,
    pub max_holder_ratio: f64,
    pub max_bk_ratio: f64,
    pub min_positivity_margin: f64,
}

/// A nonnegative potential: a Gaussian random field built from `modes`
/// Fourier features, squared, smoothed by one application of the kernel
/// and scaled so that both `‖V‖_{L^p}` and `‖V‖_{L^{n/2σ}}` are at most
/// `norm_bound`. The field is a continuum function of `x`, so a seed gives
/// the same potential on every grid.
pub fn random_potential(grid: &BallGrid, kernel: &KernelMatrix, config: &EnsembleConfig, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n();
    let features: Vec<(f64, Vec<f64>, f64)> = (0..config.modes)
        .map(|_| {
            let a: f64 = rng.sample(StandardNormal);
            let k: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            (a, k, phase)
        })
        .collect();
    let scale = (2.0 / config.modes as f64).sqrt();
    let g2: Vec<f64> = grid
        .centers()
        .iter()
        .map(|x| {
            let g: f64 = features
                .iter()
                .map(|(a, k, phase)| a * (k.iter().zip(x).map(|(ki, xi)| ki * xi).sum::<f64>() + phase).cos())
                .sum();
            (scale * g).powi(2)
        })
        .collect();
    let smooth = kernel.apply(&g2);
    let bk_exponent = n as f64 / (2.0 * config.sigma);
    let norm = grid.lq_norm(&smooth, config.lp(), 3.0).max(grid.lq_norm(&smooth, bk_exponent, 3.0));
    smooth.iter().map(|v| v * config.norm_bound / norm).collect()
}

/// Solve the integral equation for `samples` consecutive seeds.
pub fn run_ensemble(config: &EnsembleConfig) -> Result<EnsembleReport> {
    config.validate()?;
    let (n, sigma) = (config.n, config.sigma);
    let nf = n as f64;
    let grid = BallGrid::new(n, config.cells_per_axis)?;
    let kernel = assemble_kernel(&grid, sigma)?;
    let h: Vec<f64> = grid.centers().iter().map(|x| config.harnack_c0.powf(0.5 * (x[0] + 1.0))).collect();
    let alpha = config.alpha();
    let r_exp = 2.0 * nf / (nf - 2.0 * sigma);
    let nu = 2.0 * r_exp;
    let h_holder = h.iter().cloned().fold(0.0, f64::max) + holder_seminorm_within(&h, &grid, alpha, 3.0)?;
    let h_nu = grid.lq_norm(&h, nu, 2.0);

    let rows: Vec<EnsembleRow> = (0..config.samples as u64)
        .into_par_iter()
        .map(|s| {
            let seed = config.first_seed + s;
            let v = random_potential(&grid, &kernel, config, seed);
            let u = solve_linear_ie(&kernel, &v, &h, SolveMethod::Auto)?;
            let u_r = grid.lq_norm(&u, r_exp, 3.0);
            Ok(EnsembleRow {
                seed,
                norm_v: grid.lq_norm(&v, config.lp(), 3.0),
                harnack_ratio: harnack_ratio(&u, &grid)?,
                holder_ratio: holder_seminorm(&u, &grid, alpha)? / (u_r + h_holder),
                bk_ratio: grid.lq_norm(&u, nu, 1.0) / (u_r + h_nu),
                grid_cells: grid.len(),
                positivity_margin: u.iter().zip(&h).map(|(a, b)| a - b).fold(f64::INFINITY, f64::min),
            })
        })
        .collect::<Result<_>>()?;
    let max = |f: fn(&EnsembleRow) -> f64| rows.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    Ok(EnsembleReport {
        config: config.clone(),
        max_harnack_ratio: max(|r| r.harnack_ratio),
        max_holder_ratio: max(|r| r.holder_ratio),
        max_bk_ratio: max(|r| r.bk_ratio),
        min_positivity_margin: rows.iter().map(|r| r.positivity_margin).fold(f64::INFINITY, f64::min),
        rows,
    })
}

/// CSV with columns `seed,norm_V,harnack_ratio,holder_ratio,bk_ratio,grid_cells`.
pub fn write_ensemble_csv(rows: &[EnsembleRow], out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "seed,norm_V,harnack_ratio,holder_ratio,bk_ratio,grid_cells")?;
    for r in rows {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.seed, r.norm_v, r.harnack_ratio, r.holder_ratio, r.bk_ratio, r.grid_cells
        )?;
    }
    Ok(())
}
