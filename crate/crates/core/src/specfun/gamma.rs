//! Log-Gamma and Gamma ratios.
//!
//! `ln Γ` is evaluated piecewise:
//!
//! * on `[0.5, 2.5]` by the Taylor series of `ln Γ(1 + z)` around `z = 0`,
//!   written with `ζ(k) − 1` so that it converges like `(z/2)^k`. This keeps
//!   full relative accuracy near the zeros of `ln Γ` at 1 and 2;
//! * below 0.5 through `ln Γ(x) = ln Γ(x + 1) − ln x`;
//! * above 2.5 by the Lanczos approximation with `r = 10.900511` and the
//!   eleven-term coefficient set of G. R. Pugh (2004, p. 116), the same set
//!   shipped by `statrs`.

use std::f64::consts::{E, PI};
use std::sync::OnceLock;

use crate::error::{domain, Result};

const LANCZOS_R: f64 = 10.900511;

const LANCZOS_DK: [f64; 11] = [
    2.485_740_891_387_535_5e-5,
    1.051_423_785_817_219_7,
    -3.456_870_972_220_162_5,
    4.512_277_094_668_948,
    -2.982_852_253_235_766_4,
    1.056_397_115_771_267,
    -1.954_287_731_916_458_7e-1,
    1.709_705_434_044_412e-2,
    -5.719_261_174_043_057e-4,
    4.633_994_733_599_057e-6,
    -2.719_949_084_886_077_2e-9,
];

/// ln(2·√(e/π))
const LN_2_SQRT_E_OVER_PI: f64 = 0.620_782_237_635_245_2;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Terms kept in the `ζ(k) − 1` series; `(1/4)^40` is far below an ulp.
const SERIES_TERMS: usize = 40;

/// `ζ(k) − 1` for `k = 2..SERIES_TERMS+2`, by Euler–Maclaurin with the tail
/// started at `N = 10`.
fn zeta_minus_one_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| (2..SERIES_TERMS + 2).map(zeta_minus_one).collect())
}

fn zeta_minus_one(k: usize) -> f64 {
    const N: f64 = 10.0;
    // B_2, B_4, ..., B_12 divided by (2i)!
    const BERNOULLI_OVER_FACT: [f64; 6] = [
        1.0 / 6.0 / 2.0,
        -1.0 / 30.0 / 24.0,
        1.0 / 42.0 / 720.0,
        -1.0 / 30.0 / 40320.0,
        5.0 / 66.0 / 3628800.0,
        -691.0 / 2730.0 / 479001600.0,
    ];
    let s = k as f64;
    let mut head = 0.0;
    for j in (2..10).rev() {
        head += (j as f64).powf(-s);
    }
    let mut tail = N.powf(1.0 - s) / (s - 1.0) + 0.5 * N.powf(-s);
    // rising factorial (s)_{2i-1}
    let mut rising = s;
    let mut power = N.powf(-s - 1.0);
    for (i, coeff) in BERNOULLI_OVER_FACT.iter().enumerate() {
        tail += coeff * rising * power;
        let a = s + (2 * i + 1) as f64;
        rising *= a * (a + 1.0);
        power /= N * N;
    }
    head + tail
}

/// `ln Γ(2 + z) = z(1 − γ) + Σ_{k≥2} (−1)^k (ζ(k) − 1) z^k / k`, |z| ≤ 1/2.
fn ln_gamma_two_plus(z: f64) -> f64 {
    let table = zeta_minus_one_table();
    let mut sum = 0.0;
    // sum from the smallest term up
    for (i, zm1) in table.iter().enumerate().rev() {
        let k = (i + 2) as i32;
        let term = zm1 * z.powi(k) / k as f64;
        sum += if k % 2 == 0 { term } else { -term };
    }
    z * (1.0 - EULER_GAMMA) + sum
}

fn ln_gamma_lanczos(x: f64) -> f64 {
    let s = LANCZOS_DK
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_DK[0], |s, (i, &dk)| s + dk / (x + i as f64 - 1.0));
    s.ln() + LN_2_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + LANCZOS_R) / E).ln()
}

/// `ln Γ(x)` for `x > 0` without argument checking (NaN otherwise).
pub(crate) fn lgamma(x: f64) -> f64 {
    if !(x > 0.0) {
        return f64::NAN;
    }
    if x < 0.5 {
        // ln Γ(x) = ln Γ(2 + x) − ln(1 + x) − ln x
        return ln_gamma_two_plus(x) - x.ln_1p() - x.ln();
    }
    if x <= 1.5 {
        let z = x - 1.0;
        return ln_gamma_two_plus(z) - z.ln_1p();
    }
    if x <= 2.5 {
        return ln_gamma_two_plus(x - 2.0);
    }
    ln_gamma_lanczos(x)
}

/// Natural logarithm of the Gamma function, `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("log_gamma requires a finite x > 0, got {x}"));
    }
    Ok(lgamma(x))
}

/// Largest integer gap `a − b` handled by the Gamma recurrence.
const RECURRENCE_GAP: f64 = 64.0;

pub(crate) fn gamma_ratio_unchecked(a: f64, b: f64) -> f64 {
    let gap = a - b;
    let m = gap.round();
    if m.abs() <= RECURRENCE_GAP && (gap - m).abs() <= 1e-13 * a.abs().max(b.abs()).max(1.0) {
        let steps = m.abs() as usize;
        let (lo, invert) = if m >= 0.0 { (b, false) } else { (a, true) };
        let prod: f64 = (0..steps).map(|j| lo + j as f64).product();
        return if invert { 1.0 / prod } else { prod };
    }
    (lgamma(a) - lgamma(b)).exp()
}

/// `Γ(a) / Γ(b)` for `a, b > 0`.
///
/// When `a − b` is an integer of magnitude at most 64 the ratio is formed with
/// `Γ(z + 1) = z Γ(z)`, which makes the half-integer ratios behind the
/// eigenvalues of the intertwining operator exact to rounding.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return domain(format!("gamma_ratio requires a, b > 0, got ({a}, {b})"));
    }
    Ok(gamma_ratio_unchecked(a, b))
}

/// Surface area of the unit sphere `S^n ⊂ R^{n+1}`: `2 π^{(n+1)/2} / Γ((n+1)/2)`.
pub fn sphere_area(n: usize) -> f64 {
    // ω_0 = 2, ω_1 = 2π, ω_n = 2π ω_{n−2} / (n − 1)
    let mut even = 2.0;
    let mut odd = 2.0 * PI;
    let mut k = 0;
    while k + 2 <= n {
        k += 2;
        even *= 2.0 * PI / (k as f64 - 1.0);
        odd *= 2.0 * PI / k as f64;
    }
    if n.is_multiple_of(2) {
        even
    } else {
        odd
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    /// Stirling series for ln Γ at a shifted argument, brought back by the
    /// recurrence. Independent of every branch above.
    fn stirling_oracle(x: f64) -> f64 {
        let mut shift = 0.0;
        let mut y = x;
        while y < 40.0 {
            shift += y.ln();
            y += 1.0;
        }
        let inv = 1.0 / y;
        let inv2 = inv * inv;
        let series = inv
            * (1.0 / 12.0
                + inv2
                    * (-1.0 / 360.0
                        + inv2 * (1.0 / 1260.0 + inv2 * (-1.0 / 1680.0 + inv2 * (1.0 / 1188.0)))));
        (y - 0.5) * y.ln() - y + 0.5 * (2.0 * PI).ln() + series - shift
    }

    #[test]
    fn integer_and_half_integer_values() {
        assert_eq!(log_gamma(1.0).unwrap(), 0.0);
        assert!(log_gamma(2.0).unwrap().abs() < 1e-17);
        assert!(rel(log_gamma(5.0).unwrap(), 24f64.ln()) < 1e-14);
        let half = log_gamma(0.5).unwrap();
        assert!(rel(half, 0.5 * PI.ln()) < 1e-14);
        assert!((half - 0.572_364_942_9).abs() < 1e-10);
    }

    #[test]
    fn agrees_with_stirling_oracle_away_from_zeros() {
        for &x in &[1e-3, 0.01, 0.1, 0.3, 0.7, 3.0, 3.7, 7.25, 12.5, 50.0, 333.3, 1e4, 1e6] {
            let got = log_gamma(x).unwrap();
            let want = stirling_oracle(x);
            assert!(rel(got, want) < 1e-13, "x={x}: {got} vs {want}");
        }
    }

    #[test]
    fn relative_accuracy_near_the_zeros() {
        // ln Γ(1 + z) ≈ −γ z + ζ(2) z²/2 and ln Γ(2 + z) ≈ (1 − γ) z + (ζ(2) − 1) z²/2
        let z2 = PI * PI / 6.0;
        for &z in &[1e-9, -1e-9, 1e-7] {
            let want1 = -EULER_GAMMA * z + z2 * z * z / 2.0;
            let want2 = (1.0 - EULER_GAMMA) * z + (z2 - 1.0) * z * z / 2.0;
            assert!(rel(lgamma(1.0 + z), want1) < 1e-6);
            assert!(rel(lgamma(2.0 + z), want2) < 1e-6);
        }
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-1.5).is_err());
        assert!(log_gamma(f64::NAN).is_err());
        assert!(gamma_ratio(0.0, 1.0).is_err());
        assert!(gamma_ratio(1.0, -2.0).is_err());
    }

    #[test]
    fn gamma_ratio_examples() {
        assert!(rel(gamma_ratio(2.5, 0.5).unwrap(), 0.75) < 1e-15);
        assert!(rel(gamma_ratio(1.5, 0.5).unwrap(), 0.5) < 1e-15);
        assert!(rel(gamma_ratio(0.5, 2.5).unwrap(), 4.0 / 3.0) < 1e-15);
        for &x in &[0.1, 1.0, 3.3, 77.0] {
            assert_eq!(gamma_ratio(x, x).unwrap(), 1.0);
        }
        // non-integer gap goes through the logarithms
        let g = gamma_ratio(3.0, 1.5).unwrap();
        assert!(rel(g, 2.0 / (0.5 * PI.sqrt())) < 1e-14);
    }

    #[test]
    fn zeta_table_matches_closed_forms() {
        let t = zeta_minus_one_table();
        assert!(rel(t[0], PI.powi(2) / 6.0 - 1.0) < 1e-14);
        assert!(rel(t[2], PI.powi(4) / 90.0 - 1.0) < 1e-14);
        assert!(rel(t[4], PI.powi(6) / 945.0 - 1.0) < 1e-13);
    }

    #[test]
    fn sphere_areas() {
        assert!(rel(sphere_area(1), 2.0 * PI) < 1e-15);
        assert!(rel(sphere_area(2), 4.0 * PI) < 1e-15);
        assert!(rel(sphere_area(3), 2.0 * PI * PI) < 1e-15);
        for n in 1..9 {
            let want = 2.0 * PI.powf((n as f64 + 1.0) / 2.0) / lgamma((n as f64 + 1.0) / 2.0).exp();
            assert!(rel(sphere_area(n), want) < 1e-13);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn recurrence_ratio(a in 0.1f64..100.0) {
                prop_assert!(rel(gamma_ratio(a + 1.0, a).unwrap(), a) < 1e-13);
            }

            #[test]
            fn shift_identity(x in 0.01f64..200.0) {
                // ln Γ(x + 1) − ln Γ(x) = ln x, checked in absolute terms
                let lhs = lgamma(x + 1.0) - lgamma(x);
                prop_assert!((lhs - x.ln()).abs() < 1e-13 * (1.0 + lgamma(x).abs()));
            }

            #[test]
            fn duplication_formula(x in 0.05f64..300.0) {
                let lhs = lgamma(2.0 * x);
                let rhs = (2.0 * x - 1.0) * 2f64.ln() + lgamma(x) + lgamma(x + 0.5) - 0.5 * PI.ln();
                prop_assert!((lhs - rhs).abs() < 1e-13 * (1.0 + lhs.abs()));
            }
        }
    }
}
