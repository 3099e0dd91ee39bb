//! Orthonormal real bases on `S^n`.
//!
//! Zonal harmonics are `Y_k(t) = p_k(t) / √ω_{n−1}` where `p_k` are the
//! Gegenbauer polynomials `C_k^λ`, `λ = (n − 1)/2`, normalised in
//! `L²((1 − t²)^{λ − 1/2} dt)`. On `S²` the real harmonics are built from fully
//! normalised associated Legendre functions `P̄_l^m` (so that
//! `P̄_l^m(cos θ) e^{imφ}` has unit `L²(S²)` norm):
//! `Y_{l,0} = P̄_l^0`, `Y_{l,m} = √2 P̄_l^m cos mφ` and
//! `Y_{l,−m} = √2 P̄_l^m sin mφ` for `m > 0`.

use std::f64::consts::PI;

use crate::specfun::sphere_area;

/// Three-term recurrence for the orthonormal zonal harmonics of degree `0..=L`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ZonalBasis {
    y0: f64,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl ZonalBasis {
    pub(crate) fn new(n: usize, degree_cap: usize) -> Self {
        let lambda = (n as f64 - 1.0) / 2.0;
        // r_k = h_k / h_{k−1} for the unnormalised C_k^λ
        let r = |k: f64| (k + 2.0 * lambda - 1.0) * (k - 1.0 + lambda) / (k * (k + lambda));
        let mut a = Vec::with_capacity(degree_cap);
        let mut b = Vec::with_capacity(degree_cap);
        for k in 0..degree_cap {
            let kf = k as f64;
            let r1 = r(kf + 1.0);
            a.push(2.0 * (kf + lambda) / ((kf + 1.0) * r1.sqrt()));
            b.push(if k == 0 {
                0.0
            } else {
                (kf + 2.0 * lambda - 1.0) / ((kf + 1.0) * (r(kf) * r1).sqrt())
            });
        }
        Self { y0: 1.0 / sphere_area(n).sqrt(), a, b }
    }

    pub(crate) fn degree_cap(&self) -> usize {
        self.a.len()
    }

    /// `out[k] = Y_k(t)` for `k = 0..=L`.
    pub(crate) fn eval_into(&self, t: f64, out: &mut [f64]) {
        out[0] = self.y0;
        if out.len() == 1 {
            return;
        }
        out[1] = self.a[0] * t * self.y0;
        for k in 1..out.len() - 1 {
            out[k + 1] = self.a[k] * t * out[k] - self.b[k] * out[k - 1];
        }
    }

    #[cfg(test)]
    pub(crate) fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.degree_cap() + 1];
        self.eval_into(t, &mut out);
        out
    }

    /// Values and `t`-derivatives.
    pub(crate) fn eval_with_derivative(&self, t: f64) -> (Vec<f64>, Vec<f64>) {
        let len = self.degree_cap() + 1;
        let mut y = vec![0.0; len];
        let mut dy = vec![0.0; len];
        y[0] = self.y0;
        if len > 1 {
            y[1] = self.a[0] * t * self.y0;
            dy[1] = self.a[0] * self.y0;
        }
        for k in 1..len.saturating_sub(1) {
            y[k + 1] = self.a[k] * t * y[k] - self.b[k] * y[k - 1];
            dy[k + 1] = self.a[k] * (y[k] + t * dy[k]) - self.b[k] * dy[k - 1];
        }
        (y, dy)
    }

    /// `Σ_k c_k Y_k(t)` for `c.len() ≤ L + 1`.
    pub(crate) fn sum(&self, coeffs: &[f64], t: f64) -> f64 {
        if coeffs.is_empty() {
            return 0.0;
        }
        let (mut prev, mut cur) = (0.0, self.y0);
        let mut acc = coeffs[0] * cur;
        for k in 0..coeffs.len() - 1 {
            let next = self.a[k] * t * cur - self.b[k] * prev;
            prev = cur;
            cur = next;
            acc += coeffs[k + 1] * cur;
        }
        acc
    }

    /// Sum and its `t`-derivative.
    pub(crate) fn sum_with_derivative(&self, coeffs: &[f64], t: f64) -> (f64, f64) {
        let (y, dy) = self.eval_with_derivative(t);
        coeffs
            .iter()
            .zip(y.iter().zip(&dy))
            .fold((0.0, 0.0), |(s, ds), (c, (v, d))| (s + c * v, ds + c * d))
    }
}

/// Index of `P̄_l^m` (`0 ≤ m ≤ l`) in a packed triangular table.
#[inline]
pub(crate) fn tri_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// Packed table of `P̄_l^m(x)` for `0 ≤ m ≤ l ≤ L`, with `s = √(1 − x²)`.
pub(crate) fn legendre_table(degree_cap: usize, x: f64, s: f64) -> Vec<f64> {
    let big_l = degree_cap;
    let mut p = vec![0.0; tri_index(big_l, big_l) + 1];
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    for m in 0..=big_l {
        if m > 0 {
            let mf = m as f64;
            pmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * s;
        }
        p[tri_index(m, m)] = pmm;
        if m < big_l {
            p[tri_index(m + 1, m)] = x * (2.0 * m as f64 + 3.0).sqrt() * pmm;
        }
        for l in m + 2..=big_l {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let l1 = lf - 1.0;
            let b = ((l1 * l1 - mf * mf) / (4.0 * l1 * l1 - 1.0)).sqrt();
            p[tri_index(l, m)] = a * (x * p[tri_index(l - 1, m)] - b * p[tri_index(l - 2, m)]);
        }
    }
    p
}

/// `dP̄_l^m(cos θ)/dθ` for the packed table, valid for `sin θ > 0`.
pub(crate) fn legendre_theta_derivative(degree_cap: usize, x: f64, s: f64, p: &[f64]) -> Vec<f64> {
    let mut d = vec![0.0; p.len()];
    for l in 1..=degree_cap {
        for m in 0..=l {
            let (lf, mf) = (l as f64, m as f64);
            let lower = if m < l {
                ((2.0 * lf + 1.0) * (lf * lf - mf * mf) / (2.0 * lf - 1.0)).sqrt()
                    * p[tri_index(l - 1, m)]
            } else {
                0.0
            };
            d[tri_index(l, m)] = (lf * x * p[tri_index(l, m)] - lower) / s;
        }
    }
    d
}

/// Coefficient position of the real harmonic `(l, m)`, `−l ≤ m ≤ l`.
#[inline]
pub(crate) fn s2_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}
