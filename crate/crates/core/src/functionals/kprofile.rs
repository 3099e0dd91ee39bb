//! Prescribed curvature functions `K` on `S^n` and their declared critical
//! point metadata.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::sphere::{
    legendre_table, legendre_theta_derivative, s2_index, tri_index, Grid, Mode, SpectralField,
    ZonalBasis,
};

/// How `K` is specified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KKind {
    Constant { value: f64 },
    /// `a + b ξ_{n+1}`.
    AffineHeight { a: f64, b: f64 },
    /// Spectral coefficients in the JSON layout of [`SpectralField::to_json`].
    SpectralFile {
        path: PathBuf,
        #[serde(skip)]
        field: Option<SpectralField>,
    },
    /// `Σ_j c_j (cos θ)^j` with `cos θ = ξ_{n+1}`.
    ZonalPolynomial { coeffs: Vec<f64> },
}

/// A declared critical point `ξ` with `K(y) = K(ξ) + Σ a_j |y_j|^β + R(y)` in
/// normal coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub xi: Vec<f64>,
    pub beta: f64,
    pub a: Vec<f64>,
}

/// `K` together with optional metadata. The regularity condition on `R` and
/// the flatness order are recorded as declared, never verified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KProfile {
    #[serde(flatten)]
    pub kind: KKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub critical_points: Vec<CriticalPoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flatness_order: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition_star: Option<bool>,
}

impl KProfile {
    pub fn from_kind(kind: KKind) -> Self {
        Self { kind, critical_points: Vec::new(), flatness_order: None, condition_star: None }
    }

    pub fn constant(value: f64) -> Self {
        Self::from_kind(KKind::Constant { value })
    }

    pub fn affine_height(a: f64, b: f64) -> Self {
        Self::from_kind(KKind::AffineHeight { a, b })
    }

    pub fn zonal_polynomial(coeffs: Vec<f64>) -> Self {
        Self::from_kind(KKind::ZonalPolynomial { coeffs })
    }

    pub fn spectral(field: SpectralField) -> Self {
        Self::from_kind(KKind::SpectralFile { path: PathBuf::new(), field: Some(field) })
    }

    pub fn with_critical_points(mut self, points: Vec<CriticalPoint>) -> Self {
        self.critical_points = points;
        self
    }

    /// Parse either a JSON object or one of the inline forms
    /// `3`, `const:3`, `2+height`, `a+b*height`, `height`, `zonal:c0,c1,...`.
    pub fn parse(text: &str) -> Result<Self> {
        let s = text.trim();
        if s.starts_with('{') {
            return Ok(serde_json::from_str(s)?);
        }
        let bad = || Error::InvalidConfig(format!("cannot parse K profile {text:?}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        if let Some(rest) = s.strip_prefix("const:") {
            return Ok(Self::constant(num(rest)?));
        }
        if let Some(rest) = s.strip_prefix("zonal:") {
            let coeffs = rest.split(',').map(num).collect::<Result<Vec<_>>>()?;
            return Ok(Self::zonal_polynomial(coeffs));
        }
        if let Some(rest) = s.strip_prefix("file:") {
            return Ok(Self::from_kind(KKind::SpectralFile { path: rest.into(), field: None }));
        }
        if s == "height" {
            return Ok(Self::affine_height(0.0, 1.0));
        }
        if let Some(head) = s.strip_suffix("height") {
            let head = head.trim_end().trim_end_matches('*').trim_end();
            // split "a+b" or "a-b" at the last sign that is not a leading one
            let split = head
                .char_indices()
                .rev()
                .find(|&(i, c)| (c == '+' || c == '-') && i > 0 && !head[..i].ends_with(['e', 'E']))
                .map(|(i, _)| i);
            return match split {
                Some(i) => {
                    let a = num(&head[..i])?;
                    let b_text: String = head[i..].chars().filter(|c| !c.is_whitespace()).collect();
                    let b = match b_text.as_str() {
                        "+" => 1.0,
                        "-" => -1.0,
                        _ => num(&b_text)?,
                    };
                    Ok(Self::affine_height(a, b))
                }
                None => Ok(Self::affine_height(0.0, num(head)?)),
            };
        }
        Ok(Self::constant(num(s)?))
    }

    /// Read a JSON profile from disk, resolving a spectral file path relative
    /// to the profile's directory.
    pub fn from_file(path: &Path, n: usize) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut k = Self::parse(&text)?;
        if let KKind::SpectralFile { path: p, .. } = &mut k.kind {
            if p.is_relative() {
                if let Some(dir) = path.parent() {
                    *p = dir.join(&*p);
                }
            }
        }
        k.resolve(n)?;
        Ok(k)
    }

    /// Load any referenced spectral file and validate metadata for `S^n`.
    pub fn resolve(&mut self, n: usize) -> Result<()> {
        if let KKind::SpectralFile { path, field } = &mut self.kind {
            if field.is_none() {
                let text = std::fs::read_to_string(&*path)?;
                let value: serde_json::Value = serde_json::from_str(&text)?;
                *field = Some(SpectralField::from_json(n, &value)?);
            }
            if let Some(f) = field {
                if f.geometry().n() != n {
                    return Err(Error::GeometryMismatch(format!(
                        "spectral K lives on S^{}, problem is on S^{n}",
                        f.geometry().n()
                    )));
                }
            }
        }
        for cp in &self.critical_points {
            if cp.xi.len() != n + 1 {
                return Err(Error::Metadata(format!(
                    "critical point {:?} is not a point of S^{n}",
                    cp.xi
                )));
            }
            if !cp.a.is_empty() && (cp.a.len() != n || cp.a.contains(&0.0)) {
                return Err(Error::Metadata(format!(
                    "critical point coefficients {:?} must be {n} nonzero numbers",
                    cp.a
                )));
            }
        }
        Ok(())
    }

    fn field(&self) -> &SpectralField {
        match &self.kind {
            KKind::SpectralFile { field: Some(f), .. } => f,
            _ => panic!("spectral K used before resolve()"),
        }
    }

    /// `K(ξ)`.
    pub fn value(&self, xi: &[f64]) -> f64 {
        let t = xi[xi.len() - 1];
        match &self.kind {
            KKind::Constant { value } => *value,
            KKind::AffineHeight { a, b } => a + b * t,
            KKind::ZonalPolynomial { coeffs } => coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c),
            KKind::SpectralFile { .. } => self.field().evaluate(xi).unwrap_or(f64::NAN),
        }
    }

    /// Tangential gradient of `K` at `ξ`, as a vector of `R^{n+1}`.
    pub fn gradient(&self, xi: &[f64]) -> Vec<f64> {
        let n = xi.len() - 1;
        let t = xi[n];
        let zonal = |dk: f64| -> Vec<f64> {
            // dK/dt times the gradient of the height, e_{n+1} − t ξ
            let mut g: Vec<f64> = xi.iter().map(|x| -dk * t * x).collect();
            g[n] += dk;
            g
        };
        match &self.kind {
            KKind::Constant { .. } => vec![0.0; n + 1],
            KKind::AffineHeight { b, .. } => zonal(*b),
            KKind::ZonalPolynomial { coeffs } => {
                let dk = coeffs
                    .iter()
                    .enumerate()
                    .skip(1)
                    .rev()
                    .fold(0.0, |acc, (j, c)| acc * t + j as f64 * c);
                zonal(dk)
            }
            KKind::SpectralFile { .. } => {
                let f = self.field();
                let g = f.geometry();
                match g.mode() {
                    Mode::Zonal => {
                        let basis = ZonalBasis::new(g.n(), g.degree_cap());
                        zonal(basis.sum_with_derivative(f.coeffs(), t.clamp(-1.0, 1.0)).1)
                    }
                    Mode::FullS2 => s2_gradient(f, xi),
                }
            }
        }
    }

    /// Whether `K` depends on `ξ_{n+1}` alone.
    pub fn is_zonal(&self) -> bool {
        match &self.kind {
            KKind::SpectralFile { field: Some(f), .. } => f.geometry().mode() == Mode::Zonal,
            KKind::SpectralFile { field: None, .. } => false,
            _ => true,
        }
    }

    /// Whether `K(−ξ) = K(ξ)`.
    pub fn is_antipodal(&self) -> bool {
        match &self.kind {
            KKind::Constant { .. } => true,
            KKind::AffineHeight { b, .. } => *b == 0.0,
            KKind::ZonalPolynomial { coeffs } => coeffs.iter().skip(1).step_by(2).all(|&c| c == 0.0),
            KKind::SpectralFile { field: Some(f), .. } => f
                .coeffs()
                .iter()
                .enumerate()
                .all(|(i, &c)| f.geometry().is_even(i) || c == 0.0),
            KKind::SpectralFile { field: None, .. } => false,
        }
    }

    /// `K` at every node, checked to be finite and positive.
    pub fn positive_values_on(&self, grid: &Grid) -> Result<Vec<f64>> {
        if !self.is_zonal() && grid.geometry().mode() == Mode::Zonal {
            return Err(Error::GeometryMismatch("non-zonal K on a zonal grid".into()));
        }
        let vals: Vec<f64> = grid.points().iter().map(|p| self.value(p)).collect();
        if let Some(bad) = vals.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
            return domain(format!("K must be positive on the grid, found {bad}"));
        }
        Ok(vals)
    }

    /// `sup |∇K|` over the grid nodes.
    pub fn gradient_sup(&self, grid: &Grid) -> f64 {
        grid.points()
            .iter()
            .map(|p| crate::vecmath::norm(&self.gradient(p)))
            .fold(0.0, f64::max)
    }
}

fn s2_gradient(f: &SpectralField, xi: &[f64]) -> Vec<f64> {
    let big_l = f.geometry().degree_cap();
    let (theta, ph) = crate::sphere::colat_lon(xi);
    let (st, ct) = theta.sin_cos();
    let st = st.max(1e-300);
    let p = legendre_table(big_l, ct, st);
    let dp = legendre_theta_derivative(big_l, ct, st, &p);
    let (mut d_theta, mut d_phi) = (0.0, 0.0);
    let c = f.coeffs();
    for l in 0..=big_l {
        d_theta += c[s2_index(l, 0)] * dp[tri_index(l, 0)];
        for m in 1..=l {
            let mf = m as f64;
            let (sm, cm) = (mf * ph).sin_cos();
            let a = c[s2_index(l, m as i64)];
            let b = c[s2_index(l, -(m as i64))];
            let r2 = std::f64::consts::SQRT_2;
            d_theta += r2 * dp[tri_index(l, m)] * (a * cm + b * sm);
            d_phi += r2 * p[tri_index(l, m)] * mf * (-a * sm + b * cm);
        }
    }
    let (sp, cp) = ph.sin_cos();
    let e_theta = [ct * cp, ct * sp, -st];
    let e_phi = [-sp, cp, 0.0];
    (0..3).map(|i| d_theta * e_theta[i] + d_phi / st * e_phi[i]).collect()
}
