use std::f64::consts::PI;

use super::mobius::mobius_via_projection;
use super::*;
use crate::sphere::{analyze, synthesize, Grid, GridField, SpectralField};
use crate::vecmath::{geodesic, north_pole, south_pole};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let p: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
    p.iter().map(|v| v / r).collect()
}

#[test]
fn eigenvalue_examples() {
    let s = ConformalSpectrum::new(3, 1.0, 32).unwrap();
    for k in 0..=32 {
        let kf = k as f64;
        assert!(rel(s.eigenvalue(k), (kf + 1.5) * (kf + 0.5)) < 1e-14);
    }
    assert_eq!(s.eigenvalue(0), 0.75);
    assert_eq!(s.eigenvalue(1), 3.75);
    assert!(rel(s.riesz_constant(), 1.0 / (4.0 * PI)) < 1e-14);
    let s = ConformalSpectrum::new(2, 0.5, 32).unwrap();
    for k in 0..=32 {
        assert!(rel(s.eigenvalue(k), k as f64 + 0.5) < 1e-14);
    }
    let s = ConformalSpectrum::new(5, 2.0, 3).unwrap();
    assert!(rel(s.c_n_sigma(), 105.0 / 16.0) < 1e-15);
    assert!((s.critical_exponent() - 9.0).abs() < 1e-15);
}

#[test]
fn spectrum_rejects_bad_sigma() {
    assert!(ConformalSpectrum::new(3, 1.5, 4).is_err());
    assert!(ConformalSpectrum::new(3, 0.0, 4).is_err());
    assert!(ConformalSpectrum::new(2, -0.1, 4).is_err());
}

#[test]
fn inverse_round_trip_and_constant() {
    let g = Geometry::zonal(3, 10).unwrap();
    let spec = ConformalSpectrum::for_geometry(&g, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f = SpectralField::new(g, (0..11).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
    let back = apply_inverse_psigma(&apply_psigma(&f, &spec).unwrap(), &spec).unwrap();
    for (a, b) in back.coeffs().iter().zip(f.coeffs()) {
        assert!((a - b).abs() < 1e-12);
    }
    let one = SpectralField::constant(g, 1.0);
    let grid = Grid::new(g).unwrap();
    let u = synthesize(&apply_inverse_psigma(&one, &spec).unwrap(), &grid).unwrap();
    assert!(u.values().iter().all(|v| (v - 4.0 / 3.0).abs() < 1e-13));
    let p1 = synthesize(&apply_psigma(&one, &spec).unwrap(), &grid).unwrap();
    assert!(p1.values().iter().all(|v| (v - spec.c_n_sigma()).abs() < 1e-14));
    let small = ConformalSpectrum::new(3, 1.0, 5).unwrap();
    assert!(apply_psigma(&f, &small).is_err());
}

#[test]
fn riesz_direct_on_constants_and_harmonics() {
    let g = Geometry::zonal(3, 32).unwrap();
    let spec = ConformalSpectrum::for_geometry(&g, 1.0).unwrap();
    let grid = Grid::new(g).unwrap();
    let u = riesz_direct(&GridField::constant(&grid, 1.0), &spec).unwrap();
    assert!(u.values().iter().all(|v| rel(*v, 4.0 / 3.0) < 1e-5));
    let mut c = SpectralField::zeros(g);
    c.coeffs_mut()[2] = 1.0;
    let f = synthesize(&c, &grid).unwrap();
    let u = riesz_direct(&f, &spec).unwrap();
    let scale = f.max_abs();
    for (a, b) in u.values().iter().zip(f.values()) {
        assert!((a - b * 4.0 / 35.0).abs() < 1e-5 * scale * 4.0 / 35.0);
    }
    let z = riesz_direct(&GridField::constant(&grid, 0.0), &spec).unwrap();
    assert!(z.values().iter().all(|&v| v == 0.0));
}

#[test]
fn riesz_direct_matches_spectral_inverse() {
    for (n, sigma) in [(2usize, 0.5), (3, 1.0), (5, 2.0)] {
        let g = Geometry::zonal(n, 32).unwrap();
        let spec = ConformalSpectrum::for_geometry(&g, sigma).unwrap();
        let grid = Grid::new(g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let mut c = SpectralField::zeros(g);
        for k in 0..=8 {
            c.coeffs_mut()[k] = rng.random_range(-1.0..1.0);
        }
        let f = synthesize(&c, &grid).unwrap();
        let direct = riesz_direct(&f, &spec).unwrap();
        let spectral = synthesize(&apply_inverse_psigma(&analyze(&f), &spec).unwrap(), &grid).unwrap();
        let err = direct
            .values()
            .iter()
            .zip(spectral.values())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err <= 1e-4 * f.max_abs(), "n={n}: {err}");
    }
}

#[test]
fn riesz_direct_on_s2() {
    let g = Geometry::full_s2(4).unwrap();
    let spec = ConformalSpectrum::for_geometry(&g, 0.5).unwrap();
    let grid = Grid::new(g).unwrap();
    let f = GridField::from_fn(&grid, |x| 1.0 + x[0] * x[1] - 0.3 * x[2]);
    let direct = riesz_direct(&f, &spec).unwrap();
    let spectral = synthesize(&apply_inverse_psigma(&analyze(&f), &spec).unwrap(), &grid).unwrap();
    for (a, b) in direct.values().iter().zip(spectral.values()) {
        assert!((a - b).abs() < 1e-6, "{a} vs {b}");
    }
}

#[test]
fn radial_kernel_closed_forms_match_quadrature() {
    // n = 3 closed form against the n = 3 polar quadrature written out
    for &(r, s, sigma) in &[(1.0, 2.0, 1.0), (0.5, 0.3, 0.75), (2.0, 2.5, 1.25)] {
        let closed = radial_riesz_kernel(3, sigma, r, s).unwrap();
        let e: f64 = 2.0 * sigma - 3.0;
        let quad = crate::sphere::integrate_polar(
            |th, gap| ((r - s) * (r - s) + 2.0 * r * s * gap).powf(0.5 * e) * th.sin(),
            1.0,
            PI,
        )
        .unwrap()
            * 2.0
            * PI;
        assert!(rel(closed, quad) < 1e-9, "{closed} vs {quad}");
    }
    // σ = 1, n = 3: 4π/max(r, s)
    assert!(rel(radial_riesz_kernel(3, 1.0, 0.5, 2.0).unwrap(), 2.0 * PI) < 1e-14);
    assert!(rel(radial_riesz_kernel(3, 1.0, 0.0, 2.0).unwrap(), 2.0 * PI) < 1e-14);
    // n = 1 is the two-point sum
    let v = radial_riesz_kernel(1, 0.25, 1.0, 3.0).unwrap();
    assert!(rel(v, 2f64.powf(-0.5) + 4f64.powf(-0.5)) < 1e-14);
}

#[test]
fn stereographic_examples() {
    let (xi, jac) = stereo_forward(&[0.0, 0.0, 0.0]);
    assert_eq!(xi, south_pole(3));
    assert_eq!(jac, 8.0);
    let (xi, jac) = stereo_forward(&[0.6, 0.8]);
    assert!(xi[2].abs() < 1e-15);
    assert!((jac - 1.0).abs() < 1e-15);
    let (xi, _) = stereo_forward(&[1e8, 0.0]);
    assert!((xi[2] - 1.0).abs() < 1e-15);
    let x = [0.3, -1.2, 2.0];
    let back = stereo_inverse(&stereo_forward(&x).0).unwrap();
    for (a, b) in back.iter().zip(&x) {
        assert!((a - b).abs() < 1e-14);
    }
    assert!(stereo_inverse(&north_pole(2)).is_none());
}

#[test]
fn pullback_examples() {
    let (n, sigma) = (3usize, 1.0);
    let e = (n as f64 - 2.0 * sigma) / 2.0;
    let one = |_: &[f64]| 1.0;
    let u = pull_to_plane(&one, sigma);
    for r in [0.0, 0.5, 3.0] {
        let x = [r, 0.1, -0.2];
        let r2 = r * r + 0.05;
        assert!(rel(u.eval(&x), (2.0 / (1.0 + r2)).powf(e)) < 1e-14);
    }
    let lambda = 3.0;
    let b = SphereBubble::new(&south_pole(n), lambda, sigma).unwrap();
    let u = pull_to_plane(&b, sigma);
    for r in [0.0, 0.2, 1.0, 4.0] {
        let want = 2f64.powf(e) * (lambda / (1.0 + lambda * lambda * r * r)).powf(e);
        assert!(rel(u.eval(&[r, 0.0, 0.0]), want) < 1e-13);
    }
    // recentred projection puts the bubble centre at the origin
    let b = SphereBubble::new(&north_pole(n), lambda, sigma).unwrap();
    let u = pull_to_plane(&b, sigma).centered_at(&north_pole(n));
    assert!(rel(u.eval(&[0.0, 0.0, 0.0]), 2f64.powf(e) * lambda.powf(e)) < 1e-13);
}

#[test]
fn push_pull_round_trip() {
    let g = Geometry::zonal(3, 24).unwrap();
    let grid = Grid::new(g).unwrap();
    let v = GridField::from_fn(&grid, |x| 2.0 + x[3] - 0.5 * x[3] * x[3]);
    let u = pull_to_plane(&v, 1.0);
    let back = push_to_sphere(&|x| u.eval(x), 1.0, &grid).unwrap();
    for (a, b) in back.values().iter().zip(v.values()) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn mobius_identity_and_orientation() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let id = MobiusMap::identity(3);
    for _ in 0..10 {
        let xi = random_point(&mut rng, 4);
        let y = id.apply(&xi);
        assert!(geodesic(&xi, &y) < 1e-14);
        assert!((id.conformal_factor(&xi) - 1.0).abs() < 1e-14);
    }
    // λ = 2, n = 3, σ = 1: factor^{(n−2σ)/(2n)} is the bubble with λ' = λ
    let center = random_point(&mut rng, 4);
    let phi = MobiusMap::new(&center, 2.0).unwrap();
    let bubble = SphereBubble::new(&center, 2.0, 1.0).unwrap();
    let flipped = SphereBubble::new(&center, 0.5, 1.0).unwrap();
    let mut separated = false;
    for _ in 0..20 {
        let xi = random_point(&mut rng, 4);
        let f = phi.conformal_factor(&xi).powf(1.0 / 6.0);
        assert!(rel(f, bubble.eval(&xi)) < 1e-13);
        separated |= rel(f, flipped.eval(&xi)) > 1e-3;
    }
    assert!(separated);
    // the centre itself is fixed and the dilation concentrates there
    assert!(geodesic(&phi.apply(&center), &center) < 1e-14);
    assert!(rel(phi.conformal_factor(&center), 8.0) < 1e-14);
}

#[test]
fn mobius_agrees_with_projection_route() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [2usize, 3, 5] {
        for &lambda in &[0.3, 2.0, 17.0] {
            let center = random_point(&mut rng, n + 1);
            let phi = MobiusMap::new(&center, lambda).unwrap();
            for _ in 0..10 {
                let xi = random_point(&mut rng, n + 1);
                let (eta, factor) = mobius_via_projection(&phi, &xi);
                assert!(geodesic(&phi.apply(&xi), &eta) < 1e-12);
                assert!(rel(phi.conformal_factor(&xi), factor) < 1e-11);
            }
        }
    }
}

#[test]
fn rotation_between_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for dim in [3usize, 4, 6] {
        let a = random_point(&mut rng, dim);
        let b = random_point(&mut rng, dim);
        let r = Rotation::between(&a, &b);
        assert!(geodesic(&r.apply(&a), &b) < 1e-14);
        let minus: Vec<f64> = a.iter().map(|v| -v).collect();
        let flip = Rotation::between(&a, &minus);
        assert!(geodesic(&flip.apply(&a), &minus) < 1e-14);
        let x = random_point(&mut rng, dim);
        let y = r.inverse().apply(&r.apply(&x));
        assert!(geodesic(&x, &y) < 1e-14);
    }
}

#[test]
fn t_phi_examples() {
    let g = Geometry::zonal(3, 16).unwrap();
    let grid = Grid::new(g).unwrap();
    let v = GridField::from_fn(&grid, |x| 1.0 + 0.2 * x[3]);
    let same = t_phi_transform(&v, &MobiusMap::identity(3), 1.0).unwrap();
    for (a, b) in same.values().iter().zip(v.values()) {
        assert!((a - b).abs() < 1e-13);
    }
    let phi = MobiusMap::new(&north_pole(3), 2.5).unwrap();
    let one = GridField::constant(&grid, 1.0);
    let t1 = t_phi_transform(&one, &phi, 1.0).unwrap();
    let b = bubble_sphere(&north_pole(3), 2.5, 1.0, &grid).unwrap();
    for (a, c) in t1.values().iter().zip(b.values()) {
        assert!(rel(*a, *c) < 1e-13);
    }
    let off_axis = MobiusMap::new(&[1.0, 0.0, 0.0, 0.0], 2.0).unwrap();
    assert!(t_phi_transform(&one, &off_axis, 1.0).is_err());
}

#[test]
fn bubble_sphere_examples() {
    let g = Geometry::zonal(3, 8).unwrap();
    let grid = Grid::new(g).unwrap();
    let one = bubble_sphere(&north_pole(3), 1.0, 1.0, &grid).unwrap();
    assert!(one.values().iter().all(|v| (v - 1.0).abs() < 1e-15));
    let b = SphereBubble::new(&north_pole(3), 4.0, 1.0).unwrap();
    assert!(rel(b.eval(&north_pole(3)), 2.0) < 1e-15);
    assert!(rel(b.eval(&south_pole(3)), 0.5) < 1e-15);
    assert!(bubble_sphere(&[1.0, 0.0, 0.0, 0.0], 2.0, 1.0, &grid).is_err());
    assert!(SphereBubble::new(&north_pole(3), 0.0, 1.0).is_err());
}

#[test]
fn bubble_plane_examples() {
    let (n, sigma) = (3usize, 1.0);
    let k0 = crate::specfun::gamma_ratio(n as f64 / 2.0 + sigma, sigma).unwrap() / PI.powf(1.5);
    let b = bubble_plane(&[0.0; 3], 1.0, k0, sigma).unwrap();
    assert!(rel(b.k, 1.0) < 1e-13);
    assert!(rel(b.eval(&[1.0, 0.0, 0.0]), 2f64.powf(-0.5)) < 1e-13);
    assert!(bubble_plane(&[0.0; 3], 1.0, 0.0, sigma).is_err());
    // λ-covariance u_λ(x) = λ^e u_1(λx)
    let lam = 3.7;
    let bl = bubble_plane(&[0.0; 3], lam, 2.0, sigma).unwrap();
    let b1 = bubble_plane(&[0.0; 3], 1.0, 2.0, sigma).unwrap();
    for r in [0.0, 0.3, 2.0] {
        assert!(rel(bl.eval_radial(r), lam.powf(0.5) * b1.eval_radial(lam * r)) < 1e-13);
    }
}

#[test]
fn bubble_plane_solves_the_integral_equation() {
    for &(n, sigma, k0) in &[(3usize, 1.0, 1.0), (3, 0.75, 0.4), (1, 0.25, 1.3)] {
        let b = bubble_plane(&vec![0.0; n], 1.0, k0, sigma).unwrap();
        let p = critical_exponent(n, sigma);
        let g = |s: f64| k0 * b.eval_radial(s).powf(p);
        let mut worst = 0.0f64;
        for i in 0..=16 {
            let r = 0.25 * i as f64;
            let rhs = radial_riesz_potential(n, sigma, &g, r, 0.0, f64::INFINITY).unwrap();
            worst = worst.max((rhs - b.eval_radial(r)).abs() / b.eval_radial(0.0));
        }
        assert!(worst < 1e-4, "n={n} σ={sigma}: {worst}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn mobius_group_law(seed in any::<u64>(), a in 0.1f64..10.0, b in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let center = random_point(&mut rng, 4);
        let pa = MobiusMap::new(&center, a).unwrap();
        let pb = MobiusMap::new(&center, b).unwrap();
        let pab = pa.compose(&pb).unwrap();
        let xi = random_point(&mut rng, 4);
        let chained = pa.apply(&pb.apply(&xi));
        prop_assert!(geodesic(&chained, &pab.apply(&xi)) < 1e-11);
        let product = pa.conformal_factor(&pb.apply(&xi)) * pb.conformal_factor(&xi);
        prop_assert!(rel(pab.conformal_factor(&xi), product) < 1e-12);
    }

    #[test]
    fn t_phi_closes_on_bubbles(seed in any::<u64>(), lam in 0.2f64..8.0, mu in 0.2f64..8.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma = 0.5;
        let center = random_point(&mut rng, 3);
        let v = SphereBubble::new(&center, lam, sigma).unwrap();
        let phi = MobiusMap::new(&center, mu).unwrap();
        let target = SphereBubble::new(&center, lam * mu, sigma).unwrap();
        for _ in 0..5 {
            let xi = random_point(&mut rng, 3);
            let got = v.eval(&phi.apply(&xi)) * phi.factor_power(&xi, sigma);
            prop_assert!(rel(got, target.eval(&xi)) < 1e-10);
        }
    }
}

#[test]
fn radial_potential_derivative_matches_differences() {
    let g = |s: f64| (1.0 + s * s).powf(-2.5);
    for &(n, sigma) in &[(1usize, 0.3), (3, 1.0), (3, 0.7), (4, 1.2), (5, 2.0)] {
        for &r in &[0.4, 1.1] {
            let d = radial_riesz_potential_derivative(n, sigma, &g, r, 1.5, f64::INFINITY)
                .unwrap_or_else(|e| panic!("n={n} σ={sigma} r={r}: {e}"));
            let h = 1e-4;
            let plus = radial_riesz_potential(n, sigma, &g, r + h, 1.5, f64::INFINITY).unwrap();
            let minus = radial_riesz_potential(n, sigma, &g, r - h, 1.5, f64::INFINITY).unwrap();
            let fd = (plus - minus) / (2.0 * h);
            assert!((d - fd).abs() <= 1e-6 * plus.abs().max(fd.abs()), "n={n} σ={sigma} r={r}: {d} vs {fd}");
        }
    }
}
