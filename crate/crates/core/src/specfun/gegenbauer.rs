//! Gegenbauer polynomials `C_k^α`.
//!
//! For `α = 0` the classical family degenerates (`C_k^0 ≡ 0` for `k ≥ 1`), so
//! the limit `lim_{α→0} C_k^α / α = (2/k) T_k` is returned instead, with
//! `C_0^0 = 1`. This is the usual convention that keeps the generating
//! function `−ln(1 − 2tr + r²)` intact.

use crate::error::{domain, Result};

pub(crate) fn gegenbauer_unchecked(k: usize, alpha: f64, t: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if alpha == 0.0 {
        // T_k by its own recurrence
        let (mut prev, mut cur) = (1.0, t);
        for _ in 1..k {
            let next = 2.0 * t * cur - prev;
            prev = cur;
            cur = next;
        }
        return 2.0 * cur / k as f64;
    }
    let (mut prev, mut cur) = (1.0, 2.0 * alpha * t);
    for j in 1..k {
        let jf = j as f64;
        let next = (2.0 * t * (jf + alpha) * cur - (jf + 2.0 * alpha - 1.0) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Value of `C_k^α(t)` from the three-term recurrence.
pub fn gegenbauer(k: usize, alpha: f64, t: f64) -> Result<f64> {
    if !(alpha > -0.5) {
        return domain(format!("gegenbauer requires α > −1/2, got {alpha}"));
    }
    if !(t.abs() <= 1.0) {
        return domain(format!("gegenbauer requires |t| ≤ 1, got {t}"));
    }
    Ok(gegenbauer_unchecked(k, alpha, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gauss_jacobi;

    #[test]
    fn low_degrees() {
        for &a in &[0.25, 0.5, 1.0, 2.5] {
            for &t in &[-1.0, -0.3, 0.0, 0.7, 1.0] {
                assert_eq!(gegenbauer(0, a, t).unwrap(), 1.0);
                assert!((gegenbauer(1, a, t).unwrap() - 2.0 * a * t).abs() < 1e-15);
            }
        }
        for &t in &[-0.9, 0.1, 0.55] {
            let p2 = (3.0 * t * t - 1.0) / 2.0;
            assert!((gegenbauer(2, 0.5, t).unwrap() - p2).abs() < 1e-15);
            // C_2^1 = U_2 = 4t² − 1
            assert!((gegenbauer(2, 1.0, t).unwrap() - (4.0 * t * t - 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn chebyshev_convention_at_zero() {
        let t: f64 = 0.3;
        let theta = t.acos();
        for k in 1..8 {
            let want = 2.0 * (k as f64 * theta).cos() / k as f64;
            assert!((gegenbauer(k, 0.0, t).unwrap() - want).abs() < 1e-14);
        }
    }

    #[test]
    fn value_at_one() {
        // C_k^α(1) = (2α)_k / k!
        for &a in &[0.5, 1.0, 1.5] {
            let mut want = 1.0;
            for k in 0..12 {
                let got = gegenbauer(k, a, 1.0).unwrap();
                assert!((got - want).abs() < 1e-12 * want);
                want *= (2.0 * a + k as f64) / (k as f64 + 1.0);
            }
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(gegenbauer(2, 0.5, 1.5).is_err());
        assert!(gegenbauer(2, -0.5, 0.0).is_err());
    }

    #[test]
    fn orthogonality() {
        for &a in &[0.5, 1.0, 1.5, 2.0, 3.5] {
            let rule = gauss_jacobi(40, a - 0.5).unwrap();
            let norm = |k: usize| {
                rule.integrate(|t| gegenbauer_unchecked(k, a, t).powi(2)).sqrt()
            };
            for j in 0..12 {
                for k in 0..j {
                    let ip = rule.integrate(|t| {
                        gegenbauer_unchecked(j, a, t) * gegenbauer_unchecked(k, a, t)
                    });
                    assert!((ip / (norm(j) * norm(k))).abs() < 1e-10, "a={a} j={j} k={k}");
                }
            }
        }
    }
}
