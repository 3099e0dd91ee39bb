//! Geometry of `S^n`, quadrature grids, spectral transforms and Funk–Hecke
//! multipliers.
//!
//! Two representations are supported. [`Mode::FullS2`] is the full real
//! spherical-harmonic basis on `S²`, sampled on Gauss–Legendre colatitudes
//! times equispaced longitudes. [`Mode::Zonal`] handles any `n ≥ 2` for
//! functions of `t = ξ_{n+1} = cos θ` alone, sampled on Gauss–Jacobi nodes
//! with weight `(1 − t²)^{(n−2)/2}`.
//!
//! Coefficients always refer to an orthonormal basis of `L²(S^n)`.

mod basis;
pub(crate) mod polar;

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::specfun::{gauss_jacobi, gegenbauer_unchecked, sphere_area};

pub(crate) use basis::{legendre_table, legendre_theta_derivative, s2_index, tri_index, ZonalBasis};
pub use polar::{integrate_polar, split_angle, REFINE_TOL, SPLIT_DELTA};
pub(crate) use polar::integrate_polar_with_floor;

/// Spectral representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    FullS2,
    Zonal,
}

/// Sphere dimension, representation and spectral degree cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Geometry {
    n: usize,
    mode: Mode,
    degree_cap: usize,
}

impl Geometry {
    pub fn new(n: usize, mode: Mode, degree_cap: usize) -> Result<Self> {
        if n < 2 {
            return domain(format!("sphere dimension must be at least 2, got {n}"));
        }
        if mode == Mode::FullS2 && n != 2 {
            return domain(format!("the full harmonic basis is only available on S², got n = {n}"));
        }
        if degree_cap == 0 {
            return domain("degree cap must be positive");
        }
        Ok(Self { n, mode, degree_cap })
    }

    pub fn zonal(n: usize, degree_cap: usize) -> Result<Self> {
        Self::new(n, Mode::Zonal, degree_cap)
    }

    pub fn full_s2(degree_cap: usize) -> Result<Self> {
        Self::new(2, Mode::FullS2, degree_cap)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn degree_cap(&self) -> usize {
        self.degree_cap
    }

    /// Same sphere and mode with a different cap.
    pub fn with_degree_cap(&self, degree_cap: usize) -> Result<Self> {
        Self::new(self.n, self.mode, degree_cap)
    }

    /// Ambient dimension `n + 1`.
    pub fn ambient(&self) -> usize {
        self.n + 1
    }

    /// `ω_n`, the area of the sphere.
    pub fn area(&self) -> f64 {
        sphere_area(self.n)
    }

    pub fn coefficient_count(&self) -> usize {
        match self.mode {
            Mode::Zonal => self.degree_cap + 1,
            Mode::FullS2 => (self.degree_cap + 1).pow(2),
        }
    }

    /// Degree of the basis function stored at `index`.
    pub fn degree_of(&self, index: usize) -> usize {
        match self.mode {
            Mode::Zonal => index,
            Mode::FullS2 => index.isqrt(),
        }
    }

    /// `(degree, order)` of the basis function stored at `index`.
    pub fn degree_order(&self, index: usize) -> (usize, i64) {
        let l = self.degree_of(index);
        match self.mode {
            Mode::Zonal => (l, 0),
            Mode::FullS2 => (l, index as i64 - (l * l + l) as i64),
        }
    }

    /// Whether the basis function at `index` is even under `ξ ↦ −ξ`.
    pub fn is_even(&self, index: usize) -> bool {
        self.degree_of(index).is_multiple_of(2)
    }

    fn check_point(&self, xi: &[f64]) -> Result<()> {
        if xi.len() != self.ambient() {
            return Err(Error::GeometryMismatch(format!(
                "point has {} coordinates, S^{} needs {}",
                xi.len(),
                self.n,
                self.ambient()
            )));
        }
        Ok(())
    }
}

#[derive(Debug)]
enum Layout {
    Zonal {
        t: Vec<f64>,
        bary: Vec<f64>,
        /// `table[i * (L+1) + k] = Y_k(t_i)`
        table: Vec<f64>,
    },
    FullS2 {
        nlon: usize,
        x: Vec<f64>,
        colat: Vec<f64>,
        phi: Vec<f64>,
        /// Packed `P̄_l^m(x_i)` per colatitude ring.
        legendre: Vec<Vec<f64>>,
    },
}

/// Quadrature nodes and weights on `S^n` supporting exact analysis up to the
/// geometry's degree cap.
#[derive(Debug)]
pub struct Grid {
    geometry: Geometry,
    points: Vec<Vec<f64>>,
    weights: Vec<f64>,
    layout: Layout,
}

impl Grid {
    /// The smallest grid that analyses degree `L` exactly: `L + 1` rings in
    /// either mode.
    pub fn new(geometry: Geometry) -> Result<Arc<Self>> {
        Self::with_rings(geometry, geometry.degree_cap + 1)
    }

    /// A grid with `rings ≥ L + 1` nodes in `t` (Zonal) or colatitudes
    /// (FullS2, with `2·rings − 1` longitudes). Extra rings reduce aliasing
    /// in nonlinear terms.
    pub fn with_rings(geometry: Geometry, rings: usize) -> Result<Arc<Self>> {
        let big_l = geometry.degree_cap;
        if rings < big_l + 1 {
            return Err(Error::GeometryMismatch(format!(
                "{rings} rings cannot resolve degree {big_l}"
            )));
        }
        let grid = match geometry.mode {
            Mode::Zonal => Self::zonal(geometry, rings)?,
            Mode::FullS2 => Self::full_s2(geometry, rings)?,
        };
        Ok(Arc::new(grid))
    }

    fn zonal(geometry: Geometry, rings: usize) -> Result<Self> {
        let n = geometry.n;
        let rule = gauss_jacobi(rings, (n as f64 - 2.0) / 2.0)?;
        let omega_lower = sphere_area(n - 1);
        let t = rule.nodes().to_vec();
        let weights: Vec<f64> = rule.weights().iter().map(|w| w * omega_lower).collect();
        let points = t
            .iter()
            .map(|&ti| {
                let mut p = vec![0.0; n + 1];
                p[0] = (1.0 - ti * ti).max(0.0).sqrt();
                p[n] = ti;
                p
            })
            .collect();
        let basis = ZonalBasis::new(n, geometry.degree_cap);
        let mut table = vec![0.0; rings * (geometry.degree_cap + 1)];
        for (i, row) in table.chunks_mut(geometry.degree_cap + 1).enumerate() {
            basis.eval_into(t[i], row);
        }
        let bary = barycentric_weights(&t);
        Ok(Self { geometry, points, weights, layout: Layout::Zonal { t, bary, table } })
    }

    fn full_s2(geometry: Geometry, nlat: usize) -> Result<Self> {
        let nlon = 2 * nlat - 1;
        let rule = gauss_jacobi(nlat, 0.0)?;
        // colatitudes run from the north pole (x = 1) southwards
        let x: Vec<f64> = rule.nodes().iter().rev().copied().collect();
        let wlat: Vec<f64> = rule.weights().iter().rev().copied().collect();
        let colat: Vec<f64> = x.iter().map(|v| v.acos()).collect();
        let phi: Vec<f64> = (0..nlon).map(|j| 2.0 * PI * j as f64 / nlon as f64).collect();
        let dphi = 2.0 * PI / nlon as f64;
        let mut points = Vec::with_capacity(nlat * nlon);
        let mut weights = Vec::with_capacity(nlat * nlon);
        for i in 0..nlat {
            let s = colat[i].sin();
            for &ph in &phi {
                points.push(vec![s * ph.cos(), s * ph.sin(), x[i]]);
                weights.push(wlat[i] * dphi);
            }
        }
        let legendre = (0..nlat)
            .map(|i| legendre_table(geometry.degree_cap, x[i], colat[i].sin()))
            .collect();
        Ok(Self {
            geometry,
            points,
            weights,
            layout: Layout::FullS2 { nlon, x, colat, phi, legendre },
        })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Node coordinates in `R^{n+1}`. In zonal mode each node stands for the
    /// whole `t`-level set and is represented by `(√(1 − t²), 0, …, 0, t)`.
    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Height coordinate `ξ_{n+1}` of node `i`.
    pub fn height(&self, i: usize) -> f64 {
        self.points[i][self.geometry.n]
    }

    /// Ring count (zonal nodes or colatitudes).
    pub fn rings(&self) -> usize {
        match &self.layout {
            Layout::Zonal { t, .. } => t.len(),
            Layout::FullS2 { x, .. } => x.len(),
        }
    }

    /// Barycentric interpolation in `t` on a zonal grid.
    pub(crate) fn zonal_interpolate(&self, values: &[f64], t: f64) -> f64 {
        match &self.layout {
            Layout::Zonal { t: nodes, bary, .. } => barycentric_eval(nodes, bary, values, t),
            Layout::FullS2 { .. } => panic!("zonal interpolation on a full S² grid"),
        }
    }

    /// Interpolate nodal values at an arbitrary point: barycentric Lagrange in
    /// `t` (Zonal) or bilinear in `(θ, φ)` (FullS2).
    pub fn interpolate(&self, values: &[f64], xi: &[f64]) -> f64 {
        match &self.layout {
            Layout::Zonal { t, bary, .. } => {
                barycentric_eval(t, bary, values, xi[self.geometry.n].clamp(-1.0, 1.0))
            }
            Layout::FullS2 { nlon, colat, phi, .. } => {
                let (theta, ph) = colat_lon(xi);
                bilinear(colat, phi, *nlon, values, theta, ph)
            }
        }
    }
}

/// Colatitude in `[0, π]` and longitude in `[0, 2π)` of a point of `S²`.
pub(crate) fn colat_lon(xi: &[f64]) -> (f64, f64) {
    let rho = xi[0].hypot(xi[1]);
    let theta = rho.atan2(xi[2]);
    let mut ph = xi[1].atan2(xi[0]);
    if ph < 0.0 {
        ph += 2.0 * PI;
    }
    (theta, ph)
}

fn bilinear(colat: &[f64], phi: &[f64], nlon: usize, values: &[f64], theta: f64, ph: f64) -> f64 {
    let nlat = colat.len();
    let dphi = 2.0 * PI / nlon as f64;
    let j0 = ((ph / dphi).floor() as usize).min(nlon - 1);
    let j1 = (j0 + 1) % nlon;
    let fphi = (ph - phi[j0]) / dphi;
    let ring = |i: usize| values[i * nlon + j0] * (1.0 - fphi) + values[i * nlon + j1] * fphi;
    if theta <= colat[0] {
        return ring(0);
    }
    if theta >= colat[nlat - 1] {
        return ring(nlat - 1);
    }
    let i0 = colat.partition_point(|&c| c <= theta) - 1;
    let f = (theta - colat[i0]) / (colat[i0 + 1] - colat[i0]);
    ring(i0) * (1.0 - f) + ring(i0 + 1) * f
}

/// Barycentric weights `1/Π_{j≠i}(t_i − t_j)`, formed in the log domain and
/// rescaled so that the largest has unit magnitude.
pub(crate) fn barycentric_weights(t: &[f64]) -> Vec<f64> {
    let m = t.len();
    let logs: Vec<f64> = (0..m)
        .map(|i| -(0..m).filter(|&j| j != i).map(|j| (t[i] - t[j]).abs().ln()).sum::<f64>())
        .collect();
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    logs.iter()
        .enumerate()
        .map(|(i, &l)| {
            // t ascending: the sign counts the nodes above t_i
            let sign = if (m - 1 - i).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * (l - top).exp()
        })
        .collect()
}

pub(crate) fn barycentric_eval(t: &[f64], bary: &[f64], values: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..t.len() {
        let d = x - t[i];
        if d == 0.0 {
            return values[i];
        }
        let c = bary[i] / d;
        num += c * values[i];
        den += c;
    }
    num / den
}

/// Real values sampled on a [`Grid`].
#[derive(Debug, Clone)]
pub struct GridField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl GridField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GeometryMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, values })
    }

    /// Sample `f` at every node.
    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = grid.points().iter().map(|p| f(p)).collect();
        Self { grid: Arc::clone(grid), values }
    }

    pub fn constant(grid: &Arc<Grid>, c: f64) -> Self {
        Self { grid: Arc::clone(grid), values: vec![c; grid.len()] }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { grid: Arc::clone(&self.grid), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Pointwise combination with a field on the same grid.
    pub fn zip_with(&self, other: &GridField, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !Arc::ptr_eq(&self.grid, &other.grid) && self.grid.len() != other.grid.len() {
            return Err(Error::GeometryMismatch("fields live on different grids".into()));
        }
        Ok(Self {
            grid: Arc::clone(&self.grid),
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Value at an arbitrary point, by the grid's interpolation rule.
    pub fn interpolate(&self, xi: &[f64]) -> f64 {
        self.grid.interpolate(&self.values, xi)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// CSV with columns `node_index, x1..x{n+1}, weight, value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let d = self.grid.geometry.ambient();
        let coords: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
        writeln!(w, "node_index,{},weight,value", coords.join(","))?;
        for (i, (p, (&wt, &v))) in self
            .grid
            .points
            .iter()
            .zip(self.grid.weights.iter().zip(&self.values))
            .enumerate()
        {
            let coords: Vec<String> = p.iter().map(|c| format!("{c:.16e}")).collect();
            writeln!(w, "{i},{},{wt:.16e},{v:.16e}", coords.join(","))?;
        }
        Ok(())
    }

    /// Read back a CSV written by [`GridField::write_csv`] onto `grid`.
    pub fn read_csv(grid: &Arc<Grid>, text: &str) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len());
        for line in text.lines().skip(1).filter(|l| !l.trim().is_empty()) {
            let last = line.rsplit(',').next().unwrap_or("");
            let v: f64 = last
                .trim()
                .parse()
                .map_err(|_| Error::InvalidConfig(format!("bad CSV value {last:?}")))?;
            values.push(v);
        }
        Self::new(Arc::clone(grid), values)
    }
}

/// Coefficients against the orthonormal basis of a [`Geometry`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    geometry: Geometry,
    coeffs: Vec<f64>,
}

impl SpectralField {
    pub fn new(geometry: Geometry, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != geometry.coefficient_count() {
            return Err(Error::GeometryMismatch(format!(
                "{} coefficients for a geometry needing {}",
                coeffs.len(),
                geometry.coefficient_count()
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return domain("spectral coefficients must be finite");
        }
        Ok(Self { geometry, coeffs })
    }

    pub fn zeros(geometry: Geometry) -> Self {
        Self { geometry, coeffs: vec![0.0; geometry.coefficient_count()] }
    }

    /// The field `c`: a degree-0 coefficient of `c·√ω_n`.
    pub fn constant(geometry: Geometry, c: f64) -> Self {
        let mut f = Self::zeros(geometry);
        f.coeffs[0] = c * geometry.area().sqrt();
        f
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Coefficient of degree `l`, order `m` (`m = 0` in zonal mode).
    pub fn coefficient(&self, l: usize, m: i64) -> f64 {
        if l > self.geometry.degree_cap || m.unsigned_abs() as usize > l {
            return 0.0;
        }
        match self.geometry.mode {
            Mode::Zonal if m == 0 => self.coeffs[l],
            Mode::Zonal => 0.0,
            Mode::FullS2 => self.coeffs[s2_index(l, m)],
        }
    }

    /// Multiply every coefficient by a function of its degree.
    pub fn scale_by_degree(&self, f: impl Fn(usize) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * f(self.geometry.degree_of(i)))
            .collect();
        Self { geometry: self.geometry, coeffs }
    }

    /// Spectral `L²` inner product.
    pub fn dot(&self, other: &SpectralField) -> f64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Truncate or zero-pad to another degree cap.
    pub fn resize(&self, degree_cap: usize) -> Result<Self> {
        let g = self.geometry.with_degree_cap(degree_cap)?;
        let mut out = Self::zeros(g);
        // both layouts store degree l before degree l + 1
        let keep = g.coefficient_count().min(self.coeffs.len());
        out.coeffs[..keep].copy_from_slice(&self.coeffs[..keep]);
        Ok(out)
    }

    /// Evaluate the truncated expansion at a point of `S^n`.
    pub fn evaluate(&self, xi: &[f64]) -> Result<f64> {
        self.geometry.check_point(xi)?;
        Ok(match self.geometry.mode {
            Mode::Zonal => {
                let basis = ZonalBasis::new(self.geometry.n, self.geometry.degree_cap);
                basis.sum(&self.coeffs, xi[self.geometry.n].clamp(-1.0, 1.0))
            }
            Mode::FullS2 => self.evaluate_s2(xi),
        })
    }

    fn evaluate_s2(&self, xi: &[f64]) -> f64 {
        let big_l = self.geometry.degree_cap;
        let (theta, ph) = colat_lon(xi);
        let p = legendre_table(big_l, theta.cos(), theta.sin());
        let mut acc = 0.0;
        for l in 0..=big_l {
            acc += self.coeffs[s2_index(l, 0)] * p[tri_index(l, 0)];
            for m in 1..=l {
                let mf = m as f64;
                let pm = std::f64::consts::SQRT_2 * p[tri_index(l, m)];
                acc += pm
                    * (self.coeffs[s2_index(l, m as i64)] * (mf * ph).cos()
                        + self.coeffs[s2_index(l, -(m as i64))] * (mf * ph).sin());
            }
        }
        acc
    }

    /// JSON object `{degree: {order: coefficient}}`.
    pub fn to_json(&self) -> serde_json::Value {
        let mut map: BTreeMap<usize, BTreeMap<i64, f64>> = BTreeMap::new();
        for (i, &c) in self.coeffs.iter().enumerate() {
            let (l, m) = self.geometry.degree_order(i);
            map.entry(l).or_default().insert(m, c);
        }
        serde_json::to_value(map).expect("coefficient map serialises")
    }

    /// Inverse of [`SpectralField::to_json`]. Fields with only order-0 entries
    /// are read as zonal; any nonzero order requires `n = 2`.
    pub fn from_json(n: usize, value: &serde_json::Value) -> Result<Self> {
        let map: BTreeMap<usize, BTreeMap<i64, f64>> = serde_json::from_value(value.clone())?;
        let degree_cap = map.keys().copied().max().unwrap_or(0).max(1);
        let full = map.values().any(|orders| orders.keys().any(|&m| m != 0));
        let geometry = if full {
            Geometry::full_s2(degree_cap)?
        } else {
            Geometry::zonal(n, degree_cap)?
        };
        if full && n != 2 {
            return Err(Error::GeometryMismatch("nonzero orders need n = 2".into()));
        }
        let mut out = Self::zeros(geometry);
        for (&l, orders) in &map {
            for (&m, &c) in orders {
                if m.unsigned_abs() as usize > l {
                    return domain(format!("order {m} exceeds degree {l}"));
                }
                let idx = match geometry.mode {
                    Mode::Zonal => l,
                    Mode::FullS2 => s2_index(l, m),
                };
                out.coeffs[idx] = c;
            }
        }
        Ok(out)
    }
}

/// Coefficients of `f` against the orthonormal basis, by quadrature.
pub fn analyze(f: &GridField) -> SpectralField {
    let grid = &f.grid;
    let g = grid.geometry;
    let big_l = g.degree_cap;
    let mut coeffs = vec![0.0; g.coefficient_count()];
    match &grid.layout {
        Layout::Zonal { table, .. } => {
            for (i, row) in table.chunks(big_l + 1).enumerate() {
                let wf = grid.weights[i] * f.values[i];
                for (c, y) in coeffs.iter_mut().zip(row) {
                    *c += wf * y;
                }
            }
        }
        Layout::FullS2 { nlon, phi, legendre, .. } => {
            let nlon = *nlon;
            let mut cosm = vec![0.0; big_l + 1];
            let mut sinm = vec![0.0; big_l + 1];
            for (i, p) in legendre.iter().enumerate() {
                cosm.iter_mut().for_each(|v| *v = 0.0);
                sinm.iter_mut().for_each(|v| *v = 0.0);
                let w = grid.weights[i * nlon];
                for (j, &ph) in phi.iter().enumerate() {
                    let v = f.values[i * nlon + j] * w;
                    for m in 0..=big_l {
                        let a = m as f64 * ph;
                        cosm[m] += v * a.cos();
                        sinm[m] += v * a.sin();
                    }
                }
                for l in 0..=big_l {
                    coeffs[s2_index(l, 0)] += p[tri_index(l, 0)] * cosm[0];
                    for m in 1..=l {
                        let pm = std::f64::consts::SQRT_2 * p[tri_index(l, m)];
                        coeffs[s2_index(l, m as i64)] += pm * cosm[m];
                        coeffs[s2_index(l, -(m as i64))] += pm * sinm[m];
                    }
                }
            }
        }
    }
    SpectralField { geometry: g, coeffs }
}

/// Evaluate a spectral field at every node of `grid`.
pub fn synthesize(c: &SpectralField, grid: &Arc<Grid>) -> Result<GridField> {
    if c.geometry != grid.geometry {
        return Err(Error::GeometryMismatch(format!(
            "spectral geometry {:?} does not match grid geometry {:?}",
            c.geometry, grid.geometry
        )));
    }
    let big_l = c.geometry.degree_cap;
    let mut values = vec![0.0; grid.len()];
    match &grid.layout {
        Layout::Zonal { table, .. } => {
            for (v, row) in values.iter_mut().zip(table.chunks(big_l + 1)) {
                *v = row.iter().zip(&c.coeffs).map(|(y, a)| y * a).sum();
            }
        }
        Layout::FullS2 { nlon, phi, legendre, .. } => {
            let nlon = *nlon;
            let mut am = vec![0.0; big_l + 1];
            let mut bm = vec![0.0; big_l + 1];
            for (i, p) in legendre.iter().enumerate() {
                for m in 0..=big_l {
                    let (mut a, mut b) = (0.0, 0.0);
                    for l in m..=big_l {
                        let pl = p[tri_index(l, m)];
                        if m == 0 {
                            a += c.coeffs[s2_index(l, 0)] * pl;
                        } else {
                            a += c.coeffs[s2_index(l, m as i64)] * pl;
                            b += c.coeffs[s2_index(l, -(m as i64))] * pl;
                        }
                    }
                    let scale = if m == 0 { 1.0 } else { std::f64::consts::SQRT_2 };
                    am[m] = a * scale;
                    bm[m] = b * scale;
                }
                for (j, &ph) in phi.iter().enumerate() {
                    let mut acc = am[0];
                    for m in 1..=big_l {
                        let ang = m as f64 * ph;
                        acc += am[m] * ang.cos() + bm[m] * ang.sin();
                    }
                    values[i * nlon + j] = acc;
                }
            }
        }
    }
    Ok(GridField { grid: Arc::clone(grid), values })
}

/// `Σ weights · values`.
pub fn integrate(f: &GridField) -> f64 {
    f.grid.weights.iter().zip(&f.values).map(|(w, v)| w * v).sum()
}

/// Anything that can be evaluated at a point of `S^n`.
pub trait SphereFunction: Sync {
    fn value_at(&self, xi: &[f64]) -> f64;
}

impl SphereFunction for GridField {
    fn value_at(&self, xi: &[f64]) -> f64 {
        self.interpolate(xi)
    }
}

impl SphereFunction for SpectralField {
    fn value_at(&self, xi: &[f64]) -> f64 {
        self.evaluate(xi).unwrap_or(f64::NAN)
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> SphereFunction for F {
    fn value_at(&self, xi: &[f64]) -> f64 {
        self(xi)
    }
}

/// A zonal kernel `k(t)`, `t = ⟨ξ, ζ⟩`, possibly singular at `t = 1`.
pub trait ZonalKernel: Sync {
    /// Kernel value; `gap = 1 − t` is passed separately so that it stays
    /// accurate near the diagonal.
    fn eval(&self, t: f64, gap: f64) -> f64;

    /// Exponent `s` with `k ~ θ^s` as the geodesic distance `θ → 0`.
    fn singular_exponent(&self) -> f64 {
        0.0
    }
}

impl<F: Fn(f64) -> f64 + Sync> ZonalKernel for F {
    fn eval(&self, t: f64, _gap: f64) -> f64 {
        self(t)
    }
}

/// `c·|ξ − ζ|^s = c·(2 − 2t)^{s/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RieszKernel {
    pub exponent: f64,
    pub scale: f64,
}

impl RieszKernel {
    pub fn new(exponent: f64) -> Self {
        Self { exponent, scale: 1.0 }
    }
}

impl ZonalKernel for RieszKernel {
    fn eval(&self, _t: f64, gap: f64) -> f64 {
        self.scale * (2.0 * gap).powf(0.5 * self.exponent)
    }

    fn singular_exponent(&self) -> f64 {
        self.exponent
    }
}

/// The Funk–Hecke multiplier of a zonal kernel at degree `k`:
/// `μ_k = ω_{n−1} ∫₋₁¹ K(t) C_k^λ(t)/C_k^λ(1) (1 − t²)^{(n−2)/2} dt`,
/// `λ = (n − 1)/2`, evaluated in the polar angle with grading at `t = 1`.
pub fn funk_hecke_multiplier(kernel: &dyn ZonalKernel, k: usize, geometry: &Geometry) -> Result<f64> {
    let n = geometry.n;
    let lambda = (n as f64 - 1.0) / 2.0;
    let c1 = gegenbauer_unchecked(k, lambda, 1.0);
    let power = n as i32 - 1;
    let beta = kernel.singular_exponent() + power as f64;
    let integral = integrate_polar(
        |theta, gap| {
            let t = 1.0 - gap;
            kernel.eval(t, gap) * gegenbauer_unchecked(k, lambda, t) / c1 * theta.sin().powi(power)
        },
        beta,
        PI,
    )?;
    Ok(sphere_area(n - 1) * integral)
}
