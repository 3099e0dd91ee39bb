use fracsphere_core::conformal::{
    apply_psigma, bubble_plane, bubble_sphere, critical_exponent, ConformalSpectrum,
};
use fracsphere_core::functionals::{kazdan_warner_all, pohozaev_residual, sobolev_quotient, KProfile, RadialSamples, Tail};
use fracsphere_core::specfun::{log_gamma, sphere_area};
use fracsphere_core::sphere::{analyze, funk_hecke_multiplier, Geometry, Grid, GridField, RieszKernel, SpectralField};
use fracsphere_core::Result;
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn below(name: &'static str, value: f64, tolerance: f64) -> Self {
        Self { name, value, tolerance, passed: value <= tolerance, note: None }
    }

    fn skipped(name: &'static str, why: &str) -> Self {
        Self { name, value: 0.0, tolerance: 0.0, passed: true, note: Some(format!("skipped: {why}")) }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn north(n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n + 1];
    x[n] = 1.0;
    x
}

/// Identity suite for `P_σ` on the given geometry.
pub fn run(geometry: Geometry, sigma: f64) -> Result<Vec<Check>> {
    let n = geometry.n();
    let nf = n as f64;
    let spec = ConformalSpectrum::for_geometry(&geometry, sigma)?;
    let grid = Grid::new(geometry)?;
    let p = critical_exponent(n, sigma);
    let omega = sphere_area(n);
    let sharp = spec.c_n_sigma() * omega.powf(2.0 * sigma / nf);
    let mut checks = Vec::new();

    let one_coeffs = SpectralField::constant(geometry, 1.0);
    let p_one = apply_psigma(&one_coeffs, &spec)?;
    let defect: f64 = p_one
        .coeffs()
        .iter()
        .zip(one_coeffs.coeffs())
        .map(|(a, b)| (a - spec.c_n_sigma() * b).powi(2))
        .sum::<f64>()
        .sqrt()
        / (spec.c_n_sigma() * one_coeffs.norm());
    checks.push(Check::below("constant_solves_equation", defect, 1e-12));
    let one = GridField::constant(&grid, 1.0);

    let kernel = RieszKernel { exponent: 2.0 * sigma - nf, scale: spec.riesz_constant() };
    let mut fh: f64 = 0.0;
    for k in 0..=geometry.degree_cap().min(8) {
        fh = fh.max((funk_hecke_multiplier(&kernel, k, &geometry)? * spec.eigenvalue(k) - 1.0).abs());
    }
    checks.push(Check::below("funk_hecke_riesz_inverse", fh, 1e-8));

    let constant_k = KProfile::constant(1.0);
    let q_one = sobolev_quotient(&one, &constant_k, p, &spec)?;
    checks.push(Check::below("sharp_constant_at_constant", rel(q_one, sharp), 1e-10));

    let bubble = bubble_sphere(&north(n), 2.0, sigma, &grid)?;
    let q_bubble = sobolev_quotient(&bubble, &constant_k, p, &spec)?;
    checks.push(Check::below("sharp_constant_at_bubble", rel(q_bubble, sharp), 1e-6));

    let pv = apply_psigma(&analyze(&bubble), &spec)?;
    let rhs = analyze(&bubble.map(|v| spec.c_n_sigma() * v.powf(p)));
    let defect: f64 = pv.coeffs().iter().zip(rhs.coeffs()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    checks.push(Check::below("bubble_solves_equation", defect / pv.norm(), 1e-8));

    let kw = kazdan_warner_all(&bubble, &constant_k, sigma)?;
    checks.push(Check::below("kazdan_warner_constant_k", kw.iter().fold(0.0, |a, v| a.max(v.abs())), 1e-12));
    let kw_height = kazdan_warner_all(&bubble, &KProfile::affine_height(0.0, 1.0), sigma)?[n];
    checks.push(Check {
        name: "kazdan_warner_height_positive",
        value: kw_height,
        tolerance: 0.0,
        passed: kw_height > 0.0,
        note: None,
    });

    if sigma > 0.5 {
        let k0 = (log_gamma(nf / 2.0 + sigma)? - log_gamma(sigma)?).exp() / std::f64::consts::PI.powf(nf / 2.0);
        let b = bubble_plane(&vec![0.0; n], 1.0, k0, sigma)?;
        let u = RadialSamples::uniform(2.0, 400, |r| b.eval_radial(r))?;
        let outer = |r: f64| b.eval_radial(r);
        let terms = pohozaev_residual(&u, &k0, p, n, sigma, Some(Tail::Exterior(&outer)))?;
        checks.push(Check::below("pohozaev_bubble", terms.residual.abs() / terms.scale, 1e-3));
    } else {
        checks.push(Check::skipped("pohozaev_bubble", "the exterior tail needs σ > 1/2"));
    }
    Ok(checks)
}
