//! Small dense-vector helpers for points of `R^{n+1}`.

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn normalized(a: &[f64]) -> Vec<f64> {
    let r = norm(a);
    a.iter().map(|x| x / r).collect()
}

/// Geodesic distance on the unit sphere, accurate near 0 and π.
pub(crate) fn geodesic(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x + y).powi(2)).sum::<f64>().sqrt();
    2.0 * diff.atan2(sum)
}

/// `e_{n+1}` in `R^{n+1}`.
pub(crate) fn north_pole(n: usize) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[n] = 1.0;
    p
}

pub(crate) fn south_pole(n: usize) -> Vec<f64> {
    let mut p = vec![0.0; n + 1];
    p[n] = -1.0;
    p
}
