use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use proptest::prelude::*;

use super::*;
use crate::error::Error;

/// `∫_{B_3} |x − y|^{−1} dy` in the plane by integrating along rays from `x`.
fn planar_potential_oracle(x: &[f64]) -> f64 {
    let m = 4096;
    let sum: f64 = (0..m)
        .map(|k| {
            let phi = TAU * k as f64 / m as f64;
            let xd = x[0] * phi.cos() + x[1] * phi.sin();
            -xd + (xd * xd + 9.0 - x[0] * x[0] - x[1] * x[1]).sqrt()
        })
        .sum();
    sum * TAU / m as f64
}

fn neumann_sum(a: &KernelMatrix, v: &[f64], h: &[f64], terms: usize) -> Vec<f64> {
    let mut term = h.to_vec();
    let mut total = h.to_vec();
    for _ in 1..terms {
        let weighted: Vec<f64> = term.iter().zip(v).map(|(t, w)| t * w).collect();
        term = a.apply(&weighted);
        for (s, t) in total.iter_mut().zip(&term) {
            *s += t;
        }
    }
    total
}

#[test]
fn ball_measure_converges() {
    let area = 9.0 * PI;
    let coarse = BallGrid::new(2, 12).unwrap();
    let fine = BallGrid::new(2, 48).unwrap();
    let e0 = (coarse.total_measure() - area).abs() / area;
    let e1 = (fine.total_measure() - area).abs() / area;
    assert!(e0 < 0.01 && e1 < e0, "{e0} {e1}");
    assert!(coarse.centers().iter().all(|c| c[0].hypot(c[1]) <= 3.0));
    let line = BallGrid::new(1, 10).unwrap();
    assert!((line.total_measure() - 6.0).abs() < 1e-14);
    assert!(BallGrid::new(3, 10).is_err());
    assert!(BallGrid::new(2, 1).is_err());
}

#[test]
fn kernel_reciprocity_and_sign() {
    let g = BallGrid::new(2, 14).unwrap();
    let a = assemble_kernel(&g, 0.5).unwrap();
    let m = g.measures();
    for i in 0..g.len() {
        for j in 0..g.len() {
            let aij = a.matrix()[(i, j)];
            assert!(aij >= 0.0);
            let aji = a.matrix()[(j, i)];
            assert!((aij * m[i] - aji * m[j]).abs() <= 4.0 * f64::EPSILON * aij * m[i]);
        }
    }
}

#[test]
fn kernel_row_decreases_with_distance() {
    let g = BallGrid::new(2, 20).unwrap();
    let a = assemble_kernel(&g, 0.5).unwrap();
    let i = g.center_index();
    let x = &g.centers()[i];
    let mut row: Vec<(f64, f64)> = (0..g.len())
        .filter(|&j| j != i)
        .map(|j| {
            let c = &g.centers()[j];
            ((c[0] - x[0]).hypot(c[1] - x[1]), a.matrix()[(i, j)] / g.measures()[j])
        })
        .collect();
    row.sort_by(|p, q| p.0.total_cmp(&q.0));
    assert!(row.windows(2).all(|w| w[1].1 <= w[0].1 * (1.0 + 1e-14)));
}

#[test]
fn center_row_sum_matches_planar_potential() {
    let mut errors = Vec::new();
    for cells in [30, 60] {
        let g = BallGrid::new(2, cells).unwrap();
        let a = assemble_kernel(&g, 0.5).unwrap();
        let c = g.center_index();
        let row: f64 = a.matrix().row(c).iter().sum();
        let oracle = planar_potential_oracle(&g.centers()[c]);
        errors.push((row - oracle).abs() / oracle);
        if cells == 60 {
            assert!((row - 6.0 * PI).abs() / (6.0 * PI) < 0.02);
        }
    }
    assert!(errors[1] < 0.02);
    assert!(errors[1] <= 0.6 * errors[0], "{errors:?}");
}

#[test]
fn diagonal_is_the_equivalent_interval_integral() {
    let g = BallGrid::new(1, 12).unwrap();
    let sigma = 0.25;
    let a = assemble_kernel(&g, sigma).unwrap();
    let h: f64 = 0.5;
    // ∫_{−h/2}^{h/2} |y|^{−1/2} dy
    let exact = 4.0 * (h / 2.0).sqrt();
    for i in 0..g.len() {
        assert!((a.matrix()[(i, i)] - exact).abs() < 1e-14);
    }
    assert!(assemble_kernel(&g, 0.5).is_err());
    assert!(assemble_kernel(&BallGrid::new(2, 4).unwrap(), 1.0).is_err());
    assert!(assemble_kernel(&g, 0.0).is_err());
}

#[test]
fn zero_potential_returns_h() {
    let g = BallGrid::new(2, 10).unwrap();
    let a = assemble_kernel(&g, 0.5).unwrap();
    let h: Vec<f64> = g.centers().iter().map(|x| 1.0 + x[0]).collect();
    for method in [SolveMethod::Auto, SolveMethod::Direct, SolveMethod::Iterative] {
        let u = solve_linear_ie(&a, &vec![0.0; g.len()], &h, method).unwrap();
        assert!(u.iter().zip(&h).all(|(p, q)| (p - q).abs() < 1e-15));
    }
    let ones = vec![1.0; g.len()];
    assert!((harnack_ratio(&ones, &g).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn direct_solve_matches_neumann_series() {
    let g = BallGrid::new(2, 16).unwrap();
    let a = assemble_kernel(&g, 0.5).unwrap();
    let v = vec![0.005; g.len()];
    let h = vec![1.0; g.len()];
    assert!(spectral_radius(&a, &v) < 0.2);
    let direct = solve_linear_ie(&a, &v, &h, SolveMethod::Direct).unwrap();
    let iterative = solve_linear_ie(&a, &v, &h, SolveMethod::Iterative).unwrap();
    let series = neumann_sum(&a, &v, &h, 50);
    for ((d, i), s) in direct.iter().zip(&iterative).zip(&series) {
        assert!((d - s).abs() <= 1e-10 * s.abs());
        assert!((i - s).abs() <= 1e-10 * s.abs());
    }
}

#[test]
fn near_singular_system_is_reported() {
    let g = BallGrid::new(1, 40).unwrap();
    let a = assemble_kernel(&g, 0.25).unwrap();
    // equal cell measures make A symmetric
    let sym: DMatrix<f64> = a.matrix().clone();
    let top = sym.symmetric_eigenvalues().max();
    let v = vec![1.0 / top; g.len()];
    let h = vec![1.0; g.len()];
    assert!(matches!(solve_linear_ie(&a, &v, &h, SolveMethod::Direct), Err(Error::NearSingular(_))));
    assert!(matches!(solve_linear_ie(&a, &v, &h, SolveMethod::Iterative), Err(Error::NearSingular(_))));
    assert!(solve_linear_ie(&a, &[1.0], &h, SolveMethod::Auto).is_err());
    assert!(solve_linear_ie(&a, &vec![-1.0; g.len()], &h, SolveMethod::Auto).is_err());
}

#[test]
fn harnack_and_holder_examples() {
    let g = BallGrid::new(2, 20).unwrap();
    let c = vec![2.5; g.len()];
    assert_eq!(harnack_ratio(&c, &g).unwrap(), 1.0);
    assert_eq!(holder_seminorm(&c, &g, 0.5).unwrap(), 0.0);
    let r: Vec<f64> = g.centers().iter().map(|x| x[0].hypot(x[1])).collect();
    let s = holder_seminorm(&r, &g, 0.99).unwrap();
    assert!(s > 0.9 && s <= 2f64.powf(0.01), "{s}");
    assert!(holder_seminorm(&r, &g, 1.0).is_err());
    let mut bad = c.clone();
    bad[g.center_index()] = 0.0;
    assert!(harnack_ratio(&bad, &g).is_err());
    assert!(harnack_ratio(&c[1..], &g).is_err());
}

#[test]
fn random_potentials_are_reproducible_and_bounded() {
    let config = EnsembleConfig::default();
    let g = BallGrid::new(2, 16).unwrap();
    let a = assemble_kernel(&g, 0.5).unwrap();
    let v1 = random_potential(&g, &a, &config, 11);
    let v2 = random_potential(&g, &a, &config, 11);
    let v3 = random_potential(&g, &a, &config, 12);
    assert_eq!(v1, v2);
    assert_ne!(v1, v3);
    assert!(v1.iter().all(|v| *v >= 0.0));
    let lp = g.lq_norm(&v1, 4.0, 3.0);
    let bk = g.lq_norm(&v1, 2.0, 3.0);
    assert!(lp <= 0.1 * (1.0 + 1e-12) && bk <= 0.1 * (1.0 + 1e-12));
    assert!((lp.max(bk) - 0.1).abs() < 1e-12);
}

#[test]
fn ensemble_is_deterministic_and_stable() {
    let coarse = EnsembleConfig { cells_per_axis: 16, samples: 12, ..Default::default() };
    let a = run_ensemble(&coarse).unwrap();
    let b = run_ensemble(&coarse).unwrap();
    assert_eq!(a.rows, b.rows);
    assert!(a.min_positivity_margin >= -1e-12);
    assert!(a.rows.iter().all(|r| r.harnack_ratio.is_finite() && r.harnack_ratio >= 1.0 && r.norm_v <= 0.1 + 1e-12));
    let fine = run_ensemble(&EnsembleConfig { cells_per_axis: 32, ..coarse.clone() }).unwrap();
    let change = (fine.max_harnack_ratio - a.max_harnack_ratio).abs() / a.max_harnack_ratio;
    assert!(change < 0.2, "{change}");
    let bk = (fine.max_bk_ratio - a.max_bk_ratio).abs() / a.max_bk_ratio;
    assert!(bk < 0.2, "{bk}");

    let mut csv = Vec::new();
    write_ensemble_csv(&a.rows, &mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("seed,norm_V,harnack_ratio,holder_ratio,bk_ratio,grid_cells\n"));
    assert_eq!(text.lines().count(), 13);
}

#[test]
fn ensemble_on_the_line_and_with_varying_h() {
    let line = EnsembleConfig { n: 1, sigma: 0.25, cells_per_axis: 60, samples: 8, ..Default::default() };
    let r = run_ensemble(&line).unwrap();
    assert!(r.min_positivity_margin >= -1e-12 && r.max_harnack_ratio.is_finite());
    let tilted = EnsembleConfig { cells_per_axis: 12, samples: 4, harnack_c0: 3.0, ..Default::default() };
    let t = run_ensemble(&tilted).unwrap();
    let flat = run_ensemble(&EnsembleConfig { harnack_c0: 1.0, ..tilted.clone() }).unwrap();
    assert!(t.max_harnack_ratio > flat.max_harnack_ratio);
    assert!(run_ensemble(&EnsembleConfig { sigma: 1.0, ..Default::default() }).is_err());
    assert!(run_ensemble(&EnsembleConfig { lp_exponent: Some(1.5), ..Default::default() }).is_err());
    assert!(run_ensemble(&EnsembleConfig { harnack_c0: 0.5, ..Default::default() }).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn harnack_ratio_is_scale_invariant(t in 1e-3f64..1e3, seed in 0u64..1000) {
        let g = BallGrid::new(2, 10).unwrap();
        let a = assemble_kernel(&g, 0.5).unwrap();
        let v = random_potential(&g, &a, &EnsembleConfig::default(), seed);
        let u = solve_linear_ie(&a, &v, &vec![1.0; g.len()], SolveMethod::Auto).unwrap();
        let scaled: Vec<f64> = u.iter().map(|x| t * x).collect();
        let r0 = harnack_ratio(&u, &g).unwrap();
        let r1 = harnack_ratio(&scaled, &g).unwrap();
        prop_assert!((r0 - r1).abs() <= 1e-14 * r0);
    }

    #[test]
    fn nonnegative_data_give_u_above_h(seed in 0u64..1000, bound in 0.01f64..0.2) {
        let g = BallGrid::new(2, 10).unwrap();
        let a = assemble_kernel(&g, 0.5).unwrap();
        let config = EnsembleConfig { norm_bound: bound, ..Default::default() };
        let v = random_potential(&g, &a, &config, seed);
        prop_assume!(spectral_radius(&a, &v) < 1.0);
        let h: Vec<f64> = g.centers().iter().map(|x| 1.0 + 0.2 * x[1].sin()).collect();
        let u = solve_linear_ie(&a, &v, &h, SolveMethod::Direct).unwrap();
        let margin = u.iter().zip(&h).map(|(p, q)| p - q).fold(f64::INFINITY, f64::min);
        prop_assert!(margin >= -1e-12);
    }
}
