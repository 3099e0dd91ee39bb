use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::BallGrid;
use crate::error::{domain, Error, Result};
use crate::specfun::sphere_area;

const CONDITION_LIMIT: f64 = 1e12;
const ITERATIVE_RADIUS: f64 = 0.5;

/// Nyström matrix `A_ij = |x_i − x_j|^{2σ−n} m_j` of the Riesz kernel on a
/// [`BallGrid`], without the normalizing constant.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    matrix: DMatrix<f64>,
    measures: Vec<f64>,
    sigma: f64,
}

impl KernelMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    /// `A f`, the discrete potential of `f`.
    pub fn apply(&self, f: &[f64]) -> Vec<f64> {
        (&self.matrix * DVector::from_column_slice(f)).as_slice().to_vec()
    }

    fn apply_weighted(&self, v: &[f64], u: &[f64]) -> DVector<f64> {
        let vu = DVector::from_iterator(u.len(), v.iter().zip(u).map(|(a, b)| a * b));
        &self.matrix * vu
    }
}

/// Assemble the kernel by the midpoint rule off the diagonal. The diagonal
/// integrates `|y|^{2σ−n}` exactly over the ball with the cell's measure.
pub fn assemble_kernel(grid: &BallGrid, sigma: f64) -> Result<KernelMatrix> {
    let n = grid.n();
    let nf = n as f64;
    if !(sigma > 0.0 && sigma < nf / 2.0) {
        return domain(format!("need 0 < σ < n/2, got σ = {sigma} with n = {n}"));
    }
    let power = 2.0 * sigma - nf;
    let centers = grid.centers();
    let measures = grid.measures();
    let size = grid.len();
    // |B_r| = ω_{n−1} r^n / n and ∫_{B_r}|y|^{2σ−n} = ω_{n−1} r^{2σ} / (2σ)
    let shell = sphere_area(n - 1);
    let rows: Vec<Vec<f64>> = (0..size)
        .into_par_iter()
        .map(|i| {
            (0..size)
                .map(|j| {
                    if i == j {
                        let r0 = (nf * measures[j] / shell).powf(1.0 / nf);
                        shell * r0.powf(2.0 * sigma) / (2.0 * sigma)
                    } else {
                        let d2: f64 = centers[i].iter().zip(&centers[j]).map(|(a, b)| (a - b).powi(2)).sum();
                        d2.powf(0.5 * power) * measures[j]
                    }
                })
                .collect()
        })
        .collect();
    let matrix = DMatrix::from_fn(size, size, |i, j| rows[i][j]);
    Ok(KernelMatrix { matrix, measures: measures.to_vec(), sigma })
}

/// How [`solve_linear_ie`] treats `(I − A diag V) u = h`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SolveMethod {
    /// Fixed-point iteration when the spectral radius of `A diag V` is
    /// below 1/2, LU otherwise.
    #[default]
    Auto,
    Direct,
    Iterative,
}

/// Perron root of the nonnegative matrix `A diag V` by power iteration.
pub fn spectral_radius(a: &KernelMatrix, v: &[f64]) -> f64 {
    let mut x = DVector::from_element(a.len(), 1.0);
    let mut rho = 0.0;
    for _ in 0..200 {
        let y = a.apply_weighted(v, x.as_slice());
        let ny = y.norm();
        if ny == 0.0 {
            return 0.0;
        }
        let next = ny / x.norm();
        x = y / ny;
        if (next - rho).abs() <= 1e-8 * next {
            return next;
        }
        rho = next;
    }
    rho
}

/// Solve `u = A(V u) + h` on the grid.
pub fn solve_linear_ie(a: &KernelMatrix, v: &[f64], h: &[f64], method: SolveMethod) -> Result<Vec<f64>> {
    let size = a.len();
    if v.len() != size || h.len() != size {
        return Err(Error::GeometryMismatch(format!(
            "kernel has {size} nodes, V has {} and h has {}",
            v.len(),
            h.len()
        )));
    }
    if v.iter().any(|x| !(*x >= 0.0)) {
        return domain("the potential V must be nonnegative");
    }
    match method {
        SolveMethod::Direct => direct(a, v, h),
        SolveMethod::Iterative => fixed_point(a, v, h, spectral_radius(a, v)),
        SolveMethod::Auto => {
            let rho = spectral_radius(a, v);
            if rho < ITERATIVE_RADIUS {
                fixed_point(a, v, h, rho)
            } else {
                direct(a, v, h)
            }
        }
    }
}

fn fixed_point(a: &KernelMatrix, v: &[f64], h: &[f64], rho: f64) -> Result<Vec<f64>> {
    if rho >= 1.0 - 1e-6 {
        return Err(Error::NearSingular(format!("spectral radius {rho:.6} of A·diag(V) is not below 1")));
    }
    let hv = DVector::from_column_slice(h);
    let mut u = hv.clone();
    for _ in 0..10_000 {
        let next = a.apply_weighted(v, u.as_slice()) + &hv;
        let change = (&next - &u).amax();
        u = next;
        if change <= 1e-15 * u.amax().max(f64::MIN_POSITIVE) {
            return Ok(u.as_slice().to_vec());
        }
    }
    Err(Error::NonConvergence("fixed-point iteration stalled".into()))
}

fn direct(a: &KernelMatrix, v: &[f64], h: &[f64]) -> Result<Vec<f64>> {
    let size = a.len();
    let m = DMatrix::from_fn(size, size, |i, j| f64::from(i == j) - a.matrix[(i, j)] * v[j]);
    let norm1 = (0..size).map(|j| m.column(j).abs().sum()).fold(0.0, f64::max);
    let lu_t = m.transpose().lu();
    let lu = m.lu();
    let inverse_norm = inverse_norm1_estimate(&lu, &lu_t, size)
        .ok_or_else(|| Error::NearSingular("I − A·diag(V) is singular".into()))?;
    let condition = norm1 * inverse_norm;
    if !(condition < CONDITION_LIMIT) {
        return Err(Error::NearSingular(format!("condition estimate {condition:.3e}")));
    }
    let u = lu
        .solve(&DVector::from_column_slice(h))
        .ok_or_else(|| Error::NearSingular("I − A·diag(V) is singular".into()))?;
    Ok(u.as_slice().to_vec())
}

type Lu = nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>;

/// Hager's estimate of `‖M^{-1}‖_1` from factorizations of `M` and `Mᵀ`.
fn inverse_norm1_estimate(lu: &Lu, lu_t: &Lu, size: usize) -> Option<f64> {
    let mut x = DVector::from_element(size, 1.0 / size as f64);
    let mut estimate = 0.0;
    for _ in 0..5 {
        let y = lu.solve(&x)?;
        let norm = y.abs().sum();
        if !norm.is_finite() {
            return None;
        }
        if norm <= estimate {
            break;
        }
        estimate = norm;
        let signs = y.map(|v| if v >= 0.0 { 1.0 } else { -1.0 });
        let z = lu_t.solve(&signs)?;
        let (j, zmax) = z.iter().enumerate().fold((0, 0.0), |b, (i, v)| if v.abs() > b.1 { (i, v.abs()) } else { b });
        if zmax <= z.dot(&x) {
            break;
        }
        x = DVector::zeros(size);
        x[j] = 1.0;
    }
    Some(estimate)
}
