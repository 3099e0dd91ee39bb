//! Direct evaluation of the spherical Riesz potential
//! `c_{n,σ} ∫ f(ζ) |ξ − ζ|^{2σ−n} dvol(ζ)` and the radial reduction of the
//! Euclidean Riesz kernel.
//!
//! Around each target `ξ` the sphere is parametrised by geodesic polar
//! coordinates `ζ = cos θ ξ + sin θ η`, `η ∈ S^{n−1}`. The kernel depends on
//! `θ` alone, so the `θ` integral carries the whole singularity and is done
//! with the graded polar rule; the mean of `f` over each geodesic sphere is a
//! smooth function of `θ` and is computed with a Gauss rule in `η`.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::ConformalSpectrum;
use crate::error::{domain, Error, Result};
use crate::specfun::{gauss_jacobi, sphere_area};
use crate::sphere::{analyze, integrate_polar, integrate_polar_with_floor, Grid, GridField, Mode, REFINE_TOL};
use crate::vecmath::{dot, normalized};

/// `c_{n,σ} ∫ f(ζ)|ξ − ζ|^{2σ−n} dvol(ζ)` at every node of `f`'s grid.
///
/// Zonal fields are interpolated in `t` between nodes; `S²` fields are
/// evaluated through their spectral expansion, which makes this path
/// expensive beyond small degree caps.
pub fn riesz_direct(f: &GridField, spec: &ConformalSpectrum) -> Result<GridField> {
    let grid = f.grid();
    let g = grid.geometry();
    if g.n() != spec.n() {
        return Err(Error::GeometryMismatch(format!(
            "field on S^{} with a spectrum for S^{}",
            g.n(),
            spec.n()
        )));
    }
    let values = match g.mode() {
        Mode::Zonal => riesz_zonal(f, spec)?,
        Mode::FullS2 => riesz_s2(f, spec)?,
    };
    GridField::new(std::sync::Arc::clone(grid), values)
}

/// The inner rule over `S^{n−1}` for a function of one coordinate `u`:
/// nodes `u_j` and weights summing to `ω_{n−1}`.
fn sphere_mean_rule(n: usize, m: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 2 {
        // S¹: 2 ∫₋₁¹ g(u) (1 − u²)^{−1/2} du, Gauss–Chebyshev
        let nodes = (1..=m).map(|j| ((2 * j - 1) as f64 * PI / (2 * m) as f64).cos()).collect();
        return Ok((nodes, vec![2.0 * PI / m as f64; m]));
    }
    let rule = gauss_jacobi(m, (n as f64 - 3.0) / 2.0)?;
    let area = sphere_area(n - 2);
    Ok((rule.nodes().to_vec(), rule.weights().iter().map(|w| w * area).collect()))
}

fn riesz_zonal(f: &GridField, spec: &ConformalSpectrum) -> Result<Vec<f64>> {
    let grid: &Grid = f.grid();
    let n = spec.n();
    let exponent = 2.0 * spec.sigma() - n as f64;
    let (u, w) = sphere_mean_rule(n, grid.len() / 2 + 2)?;
    let power = n as i32 - 1;
    let beta = exponent + power as f64;
    let c = spec.riesz_constant();
    let values = f.values();
    // ∫|ξ − ζ|^{2σ−n} = 1/(c(n,σ) c_{n,σ})
    let floor = f.max_abs() / (spec.c_n_sigma() * c);
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let t0 = grid.height(i);
            let s0 = (1.0 - t0 * t0).max(0.0).sqrt();
            let integral = integrate_polar_with_floor(
                |theta, gap| {
                    let (st, ct) = theta.sin_cos();
                    let mean: f64 = u
                        .iter()
                        .zip(&w)
                        .map(|(&uj, &wj)| {
                            let t = (ct * t0 + st * s0 * uj).clamp(-1.0, 1.0);
                            wj * grid.zonal_interpolate(values, t)
                        })
                        .sum();
                    (2.0 * gap).powf(0.5 * exponent) * st.powi(power) * mean
                },
                beta,
                PI,
                floor,
            )?;
            Ok(c * integral)
        })
        .collect()
}

fn riesz_s2(f: &GridField, spec: &ConformalSpectrum) -> Result<Vec<f64>> {
    let grid = f.grid();
    let coeffs = analyze(f);
    let exponent = 2.0 * spec.sigma() - 2.0;
    let m = 2 * grid.geometry().degree_cap() + 2;
    let c = spec.riesz_constant();
    let floor = f.max_abs() / (spec.c_n_sigma() * c);
    grid.points()
        .par_iter()
        .map(|xi| {
            let (e1, e2) = tangent_frame(xi);
            let integral = integrate_polar_with_floor(
                |theta, gap| {
                    let (st, ct) = theta.sin_cos();
                    let mut mean = 0.0;
                    for j in 0..m {
                        let psi = 2.0 * PI * j as f64 / m as f64;
                        let (sp, cp) = psi.sin_cos();
                        let zeta: Vec<f64> =
                            (0..3).map(|a| ct * xi[a] + st * (cp * e1[a] + sp * e2[a])).collect();
                        mean += coeffs.evaluate(&zeta).unwrap_or(f64::NAN);
                    }
                    mean *= 2.0 * PI / m as f64;
                    (2.0 * gap).powf(0.5 * exponent) * st * mean
                },
                exponent + 1.0,
                PI,
                floor,
            )?;
            Ok(c * integral)
        })
        .collect()
}

/// Two orthonormal tangent vectors at a point of `S²`.
fn tangent_frame(xi: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let axis = if xi[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
    let d = dot(&axis, xi);
    let e1 = normalized(&[axis[0] - d * xi[0], axis[1] - d * xi[1], axis[2] - d * xi[2]]);
    let e2 = vec![
        xi[1] * e1[2] - xi[2] * e1[1],
        xi[2] * e1[0] - xi[0] * e1[2],
        xi[0] * e1[1] - xi[1] * e1[0],
    ];
    (e1, e2)
}

/// `ρ(r, s) = ∫_{S^{n−1}} |r e₁ − s θ|^{2σ−n} dθ`, the kernel of the Euclidean
/// Riesz potential `∫ g(|y|)|x − y|^{2σ−n} dy` restricted to radial `g`.
///
/// Closed forms are used for `n = 1` and `n = 3`; other dimensions use the
/// polar quadrature.
pub fn radial_riesz_kernel(n: usize, sigma: f64, r: f64, s: f64) -> Result<f64> {
    radial_kernel_with_gap(n, sigma, r, s, (r - s).abs())
}

/// As [`radial_riesz_kernel`] with `|r − s|` supplied, so that callers can
/// keep it accurate when `s` is within rounding of `r`.
fn radial_kernel_with_gap(n: usize, sigma: f64, r: f64, s: f64, gap: f64) -> Result<f64> {
    let nf = n as f64;
    if n == 0 || !(sigma > 0.0 && sigma < nf / 2.0) || r < 0.0 || s < 0.0 {
        return domain(format!(
            "radial kernel needs r, s ≥ 0 and σ ∈ (0, n/2); got r={r}, s={s}, σ={sigma}"
        ));
    }
    let exponent = 2.0 * sigma - nf;
    if r == 0.0 || s == 0.0 {
        return Ok(sphere_area(n - 1) * (r + s).powf(exponent));
    }
    match n {
        1 => Ok(gap.powf(exponent) + (r + s).powf(exponent)),
        3 => {
            let a = 2.0 * sigma - 1.0;
            let bracket = if a.abs() < 1e-12 {
                ((r + s) / gap).ln()
            } else {
                ((r + s).powf(a) - gap.powf(a)) / a
            };
            Ok(2.0 * PI / (r * s) * bracket)
        }
        _ => {
            let power = n as i32 - 2;
            let beta = if gap == 0.0 { exponent + power as f64 } else { power as f64 };
            let d2 = gap * gap;
            let integral = integrate_polar(
                |theta, g| (d2 + 2.0 * r * s * g).powf(0.5 * exponent) * theta.sin().powi(power),
                beta,
                PI,
            )?;
            Ok(sphere_area(n - 2) * integral)
        }
    }
}

/// `∫_{a ≤ |y| ≤ b} g(|y|) |x − y|^{2σ−n} dy` at `|x| = r`, for radial `g`
/// (`b` may be infinite). The pieces are graded towards `s = r`, where the
/// reduced kernel is singular, and the unbounded piece is mapped by `s = T/w`.
pub fn radial_riesz_potential(
    n: usize,
    sigma: f64,
    g: &dyn Fn(f64) -> f64,
    r: f64,
    a: f64,
    b: f64,
) -> Result<f64> {
    potential_with(n, sigma, g, r, a, b, kernel_value)
}

/// `∂/∂r` of [`radial_riesz_potential`]. The derivative kernel is not
/// integrable across `s = r` when `σ ≤ 1/2`, so `r` should lie outside `[a, b]`
/// unless `σ > 1/2`.
pub fn radial_riesz_potential_derivative(
    n: usize,
    sigma: f64,
    g: &dyn Fn(f64) -> f64,
    r: f64,
    a: f64,
    b: f64,
) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    potential_with(n, sigma, g, r, a, b, radial_kernel_r_derivative)
}

/// Returns the kernel value and a magnitude against which cancellation in the
/// outer quadrature is judged.
type RadialKernelFn = fn(usize, f64, f64, f64, f64) -> Result<(f64, f64)>;

fn kernel_value(n: usize, sigma: f64, r: f64, s: f64, gap: f64) -> Result<(f64, f64)> {
    let v = radial_kernel_with_gap(n, sigma, r, s, gap)?;
    Ok((v, v.abs()))
}

fn potential_with(
    n: usize,
    sigma: f64,
    g: &dyn Fn(f64) -> f64,
    r: f64,
    a: f64,
    b: f64,
    kernel: RadialKernelFn,
) -> Result<f64> {
    if !(a >= 0.0 && b > a) {
        return domain(format!("radial range must satisfy 0 ≤ a < b, got [{a}, {b}]"));
    }
    let tail_start = if b.is_finite() { b } else { a.max(2.0 * r).max(1.0) };
    let mut breaks = vec![a];
    if r > a && r < tail_start {
        breaks.push(r);
    }
    if tail_start > a {
        breaks.push(tail_start);
    }
    let integrand = |s: f64, gap: f64| -> Result<(f64, f64)> {
        if s == 0.0 && n > 1 {
            return Ok((0.0, 0.0));
        }
        let (k, mag) = kernel(n, sigma, r, s, gap)?;
        let weight = g(s) * s.powi(n as i32 - 1);
        Ok((k * weight, mag * weight.abs()))
    };
    let pass = |order: usize| -> Result<(f64, f64)> {
        let rule = gauss_jacobi(order, 0.0)?;
        let (mut acc, mut abs) = (0.0, 0.0);
        for piece in breaks.windows(2) {
            let (lo, hi) = (piece[0], piece[1]);
            // cluster towards whichever end touches r
            let toward_hi = (hi - r).abs() < (lo - r).abs();
            for (x, w) in rule.iter() {
                let v = 0.5 * (x + 1.0);
                let q = 4;
                let offset = (hi - lo) * v.powi(q);
                let jac = (hi - lo) * q as f64 * v.powi(q - 1);
                let (s, end) = if toward_hi { (hi - offset, hi) } else { (lo + offset, lo) };
                let gap = if end == r { offset } else { (r - s).abs() };
                let (val, mag) = integrand(s, gap)?;
                acc += 0.5 * w * jac * val;
                abs += 0.5 * w * jac * mag;
            }
        }
        if !b.is_finite() {
            for (x, w) in rule.iter() {
                let v = 0.5 * (x + 1.0);
                let s = tail_start / v;
                let (val, mag) = integrand(s, (s - r).abs())?;
                acc += 0.5 * w * tail_start / (v * v) * val;
                abs += 0.5 * w * tail_start / (v * v) * mag;
            }
        }
        Ok((acc, abs))
    };
    // kernels without a closed form carry the polar quadrature's own error
    let tol = if n == 1 || n == 3 { 1e-11 } else { 10.0 * REFINE_TOL };
    let mut prev = pass(16)?.0;
    let mut order = 32;
    while order <= 1024 {
        let (cur, abs) = pass(order)?;
        if (cur - prev).abs() <= tol * abs.max(f64::MIN_POSITIVE) {
            return Ok(cur);
        }
        prev = cur;
        order *= 2;
    }
    Err(Error::NonConvergence(format!("radial Riesz potential at r = {r} did not settle")))
}

/// `∂ρ/∂r` for `r > 0`, `s ≥ 0`, with `|r − s|` supplied.
fn radial_kernel_r_derivative(n: usize, sigma: f64, r: f64, s: f64, gap: f64) -> Result<(f64, f64)> {
    let nf = n as f64;
    let exponent = 2.0 * sigma - nf;
    // sign of s − r
    let side = if s >= r { 1.0 } else { -1.0 };
    if s == 0.0 {
        let v = sphere_area(n - 1) * exponent * r.powf(exponent - 1.0);
        return Ok((v, v.abs()));
    }
    match n {
        1 => {
            let (far, near) = ((r + s).powf(exponent - 1.0), gap.powf(exponent - 1.0));
            Ok((exponent * (far - side * near), exponent.abs() * (far + near)))
        }
        3 => {
            let a = 2.0 * sigma - 1.0;
            let rho = radial_kernel_with_gap(n, sigma, r, s, gap)?;
            let (far, near) = ((r + s).powf(a - 1.0), gap.powf(a - 1.0));
            let scale = 2.0 * PI / (r * s);
            Ok((-rho / r + scale * (far + side * near), rho.abs() / r + scale * (far + near)))
        }
        _ => {
            let power = n as i32 - 2;
            let beta = if gap == 0.0 { exponent - 1.0 + power as f64 } else { power as f64 };
            let d2 = gap * gap;
            let signed = -side * gap;
            let integral = integrate_polar(
                |theta, g| {
                    (d2 + 2.0 * r * s * g).powf(0.5 * exponent - 1.0)
                        * exponent
                        * (signed + s * g)
                        * theta.sin().powi(power)
                },
                beta,
                PI,
            )?;
            let rho = radial_kernel_with_gap(n, sigma, r, s, gap)?;
            let mag = exponent.abs() * rho / r.max(gap);
            Ok((sphere_area(n - 2) * integral, mag))
        }
    }
}
