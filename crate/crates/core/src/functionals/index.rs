use serde::Serialize;

use super::KProfile;
use crate::error::{Error, Result};

/// Outcome of the index-count hypothesis `Σ (−1)^{i(ξ)} ≠ (−1)^n`, the sum
/// running over declared critical points with `Σ a_j < 0` and
/// `i(ξ) = #{a_j < 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IndexCount {
    pub hypothesis_holds: bool,
    pub sum: i64,
}

pub fn index_count_check(k: &KProfile, n: usize) -> Result<IndexCount> {
    if k.critical_points.is_empty() {
        return Err(Error::Metadata("K declares no critical points".into()));
    }
    let mut sum = 0i64;
    for cp in &k.critical_points {
        if cp.a.len() != n {
            return Err(Error::Metadata(format!(
                "critical point {:?} carries {} coefficients, expected {n}",
                cp.xi,
                cp.a.len()
            )));
        }
        if cp.a.iter().any(|&a| a == 0.0 || !a.is_finite()) {
            return Err(Error::Metadata(format!("coefficients {:?} must be finite and nonzero", cp.a)));
        }
        let total: f64 = cp.a.iter().sum();
        if total == 0.0 {
            return Err(Error::Metadata(format!("coefficients {:?} sum to zero", cp.a)));
        }
        if total < 0.0 {
            let i = cp.a.iter().filter(|&&a| a < 0.0).count();
            sum += if i % 2 == 0 { 1 } else { -1 };
        }
    }
    let parity = if n.is_multiple_of(2) { 1 } else { -1 };
    Ok(IndexCount { hypothesis_holds: sum != parity, sum })
}
