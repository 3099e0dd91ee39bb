use serde::Serialize;

use super::config::{ArgmaxMethod, SolverConfig};
use crate::conformal::{bubble_k, critical_exponent, pull_to_plane, t_phi_sample, MobiusMap};
use crate::error::{domain, Result};
use crate::functionals::{hs_norm, KProfile};
use crate::specfun::lgamma;
use crate::sphere::{Geometry, Grid, Mode, SpectralField, SphereFunction};
use crate::vecmath::{north_pole, normalized, south_pole};

/// Number of logarithmically spaced radii used to locate critical points of `w̄`.
const PROFILE_RADII: usize = 4000;

/// Diagnostics of a (possibly) concentrating solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupReport {
    /// `max v` on the sphere.
    pub m: f64,
    pub center: Vec<f64>,
    pub tau: f64,
    /// Value at the centre of the planar representative, `u(0)`.
    pub planar_max: f64,
    /// Coefficient `k` of the comparison bubble `(1 + k|x|²)^{−(n−2σ)/2}`.
    pub bubble_k: f64,
    /// `sup_{|x| ≤ R_probe} |m⁻¹u(m^{−(p−1)/(2σ)}x) − (1 + k|x|²)^{−(n−2σ)/2}|`.
    pub profile_error: f64,
    /// Interior critical points of `w̄` on `(0, ρ)`.
    pub wbar_critical_points: usize,
    /// `‖T_φ v − 1‖_∞` after the amplitude normalization.
    pub tphi_error: f64,
    pub hs_norm: Option<f64>,
    /// `m > M★`.
    pub blowup: bool,
}

/// `ū(r)` (mean of `u` over `|x| = r`) and `w̄(r) = r^{2σ/(p−1)} ū(r)`.
pub fn spherical_average_profile(
    u: &dyn Fn(&[f64]) -> f64,
    n: usize,
    radii: &[f64],
    p: f64,
    sigma: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if let Some(r) = radii.iter().find(|r| !(**r >= 0.0) || !r.is_finite()) {
        return domain(format!("radius {r} is outside the plane"));
    }
    if !(p > 1.0) {
        return domain(format!("w̄ needs p > 1, got {p}"));
    }
    let directions = average_directions(n);
    let power = 2.0 * sigma / (p - 1.0);
    let ubar: Vec<f64> = radii
        .iter()
        .map(|&r| {
            directions
                .iter()
                .map(|d| u(&d.iter().map(|c| r * c).collect::<Vec<_>>()))
                .sum::<f64>()
                / directions.len() as f64
        })
        .collect();
    let wbar = radii.iter().zip(&ubar).map(|(r, u)| r.powf(power) * u).collect();
    Ok((ubar, wbar))
}

/// Directions for the sphere mean: `±1` on the line, 64 equally spaced angles
/// in the plane, and `±e_i` otherwise (exact for harmonics of degree ≤ 3).
fn average_directions(n: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..64)
            .map(|j| {
                let a = 2.0 * std::f64::consts::PI * j as f64 / 64.0;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => (0..2 * n)
            .map(|j| {
                let mut d = vec![0.0; n];
                d[j / 2] = if j % 2 == 0 { 1.0 } else { -1.0 };
                d
            })
            .collect(),
    }
}

/// Count interior local extrema of a sampled profile.
pub fn count_critical_points(values: &[f64]) -> usize {
    let signs: Vec<f64> = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|d| *d != 0.0)
        .map(f64::signum)
        .collect();
    signs.windows(2).filter(|s| s[0] != s[1]).count()
}

/// Locate `ξ★` and `v(ξ★)`.
fn locate_max(v: &dyn SphereFunction, grid: &Grid, method: ArgmaxMethod) -> (Vec<f64>, f64) {
    let n = grid.geometry().n();
    let nodal = grid.points().iter().map(|p| (p, v.value_at(p)));
    let (best_node, best_val) = nodal.fold((None, f64::NEG_INFINITY), |acc, (p, val)| {
        if val > acc.1 {
            (Some(p.clone()), val)
        } else {
            acc
        }
    });
    if grid.geometry().mode() == Mode::Zonal {
        let (np, sp) = (north_pole(n), south_pole(n));
        let (vn, vs) = (v.value_at(&np), v.value_at(&sp));
        return if vn >= vs { (np, vn.max(best_val)) } else { (sp, vs.max(best_val)) };
    }
    let start = best_node.unwrap_or_else(|| north_pole(n));
    match method {
        ArgmaxMethod::Grid => (start, best_val),
        ArgmaxMethod::Refined => compass_search(v, start, best_val, std::f64::consts::PI / grid.rings() as f64),
    }
}

fn compass_search(v: &dyn SphereFunction, mut x: Vec<f64>, mut fx: f64, mut h: f64) -> (Vec<f64>, f64) {
    while h > 1e-12 {
        let (e1, e2) = tangent_frame(&x);
        let mut improved = false;
        for (a, b) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let cand = normalized(
                &(0..3).map(|i| x[i] + h * (a * e1[i] + b * e2[i])).collect::<Vec<_>>(),
            );
            let fc = v.value_at(&cand);
            if fc > fx {
                x = cand;
                fx = fc;
                improved = true;
                break;
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (x, fx)
}

fn tangent_frame(x: &[f64]) -> ([f64; 3], [f64; 3]) {
    let helper = if x[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let d: f64 = (0..3).map(|i| helper[i] * x[i]).sum();
    let e1v = normalized(&(0..3).map(|i| helper[i] - d * x[i]).collect::<Vec<_>>());
    let e1 = [e1v[0], e1v[1], e1v[2]];
    let e2 = [x[1] * e1[2] - x[2] * e1[1], x[2] * e1[0] - x[0] * e1[2], x[0] * e1[1] - x[1] * e1[0]];
    (e1, e2)
}

/// Blow-up diagnostics for `v` solving `P_σ v = μ K v^p` (`μ` is the
/// `coupling`: `λ_p` for solver output, `c(n,σ)` for the unnormalized
/// equation). `v` is evaluated exactly wherever it is sampled.
pub fn blowup_report(
    v: &dyn SphereFunction,
    geometry: Geometry,
    p: f64,
    k: &KProfile,
    coupling: f64,
    config: &SolverConfig,
) -> Result<BlowupReport> {
    let n = geometry.n();
    let nf = n as f64;
    let sigma = config.sigma;
    if n != config.n || !(p > 1.0) || !(coupling > 0.0) {
        return domain("blow-up report needs matching n, p > 1 and a positive coupling");
    }
    let e = (nf - 2.0 * sigma) / 2.0;
    let tau = critical_exponent(n, sigma) - p;
    let grid = Grid::with_rings(geometry, 2 * geometry.degree_cap() + 2)?;
    let (center, v_star) = locate_max(v, &grid, config.argmax);
    let nodal_max = grid.points().iter().map(|x| v.value_at(x)).fold(f64::NEG_INFINITY, f64::max);
    let m = v_star.max(nodal_max);
    let k_star = k.value(&center);

    // planar picture centred at ξ★
    let u = pull_to_plane(v, sigma).centered_at(&center);
    let origin = vec![0.0; n];
    let planar_max = u.eval(&origin);
    let riesz = (lgamma((nf - 2.0 * sigma) / 2.0) - lgamma(sigma)).exp()
        / (2f64.powf(2.0 * sigma) * std::f64::consts::PI.powf(nf / 2.0));
    let k_eff = coupling * riesz * k_star * 2f64.powf(e * tau);
    let kb = bubble_k(k_eff, n, sigma);
    let shrink = planar_max.powf(-(p - 1.0) / (2.0 * sigma));
    let directions = average_directions(n.min(2));
    let mut profile_error: f64 = 0.0;
    for j in 0..=400 {
        let big_r = config.probe_radius * j as f64 / 400.0;
        let model = (1.0 + kb * big_r * big_r).powf(-e);
        for d in directions.iter().take(if n <= 2 { directions.len() } else { 1 }) {
            let mut x = vec![0.0; n];
            for (xi, di) in x.iter_mut().zip(d) {
                *xi = shrink * big_r * di;
            }
            profile_error = profile_error.max((u.eval(&x) / planar_max - model).abs());
        }
    }

    let radii: Vec<f64> = (0..PROFILE_RADII)
        .map(|j| config.rho * 10f64.powf(-8.0 * (1.0 - j as f64 / (PROFILE_RADII - 1) as f64)))
        .collect();
    let (_, wbar) = spherical_average_profile(&|x: &[f64]| u.eval(x), n, &radii, p, sigma)?;
    let wbar_critical_points = count_critical_points(&wbar);

    // T_φ with |det dφ(ξ★)|^{(n−2σ)/(2n)} = ṽ(ξ★)^{−1}
    let amplitude = (coupling * k_star / crate::conformal::ConformalSpectrum::new(n, sigma, 0)?.c_n_sigma())
        .powf(1.0 / (p - 1.0));
    let scaled = |x: &[f64]| amplitude * v.value_at(x);
    let phi = MobiusMap::new(&center, (amplitude * v_star).powf(-1.0 / e))?;
    let t = t_phi_sample(&scaled, &phi, sigma, &grid)?;
    let tphi_error = t.values().iter().fold(0.0f64, |a, x| a.max((x - 1.0).abs()));

    Ok(BlowupReport {
        m,
        center,
        tau,
        planar_max,
        bubble_k: kb,
        profile_error,
        wbar_critical_points,
        tphi_error,
        hs_norm: None,
        blowup: m > config.blowup_threshold,
    })
}

/// [`blowup_report`] for a band-limited field, adding `‖v‖_{H^σ}`.
pub fn blowup_report_spectral(
    v: &SpectralField,
    p: f64,
    k: &KProfile,
    coupling: f64,
    config: &SolverConfig,
) -> Result<BlowupReport> {
    let mut report = blowup_report(v, *v.geometry(), p, k, coupling, config)?;
    report.hs_norm = Some(hs_norm(v, config.sigma));
    Ok(report)
}
