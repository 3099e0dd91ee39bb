use crate::error::{domain, Result};

const SUBSAMPLES: usize = 16;

/// Uniform Cartesian cells on `[-R, R]^n` clipped to the ball `B_R`.
///
/// Interior cells keep their centre and full measure. A cell cut by the
/// sphere is represented by the centroid and measure of its intersection
/// with the ball, both taken from a `16^n` sub-sample.
#[derive(Debug, Clone)]
pub struct BallGrid {
    n: usize,
    radius: f64,
    cells_per_axis: usize,
    centers: Vec<Vec<f64>>,
    measures: Vec<f64>,
}

impl BallGrid {
    /// `cells_per_axis` cells across the diameter of `B_3`.
    pub fn new(n: usize, cells_per_axis: usize) -> Result<Self> {
        Self::with_radius(n, 3.0, cells_per_axis)
    }

    pub fn with_radius(n: usize, radius: f64, cells_per_axis: usize) -> Result<Self> {
        if !(1..=2).contains(&n) {
            return domain(format!("ball grids are built for n = 1 or 2, got {n}"));
        }
        if cells_per_axis < 2 || !(radius > 0.0) {
            return domain("need a positive radius and at least two cells per axis");
        }
        let h = 2.0 * radius / cells_per_axis as f64;
        let corner = |i: usize| -radius + i as f64 * h;
        let mut centers = Vec::new();
        let mut measures = Vec::new();
        if n == 1 {
            for i in 0..cells_per_axis {
                centers.push(vec![corner(i) + 0.5 * h]);
                measures.push(h);
            }
        } else {
            let r2 = radius * radius;
            let sub = h / SUBSAMPLES as f64;
            for i in 0..cells_per_axis {
                for j in 0..cells_per_axis {
                    let (x0, y0) = (corner(i), corner(j));
                    let far = (x0.abs().max((x0 + h).abs())).powi(2) + (y0.abs().max((y0 + h).abs())).powi(2);
                    if far <= r2 {
                        centers.push(vec![x0 + 0.5 * h, y0 + 0.5 * h]);
                        measures.push(h * h);
                        continue;
                    }
                    let (mut count, mut sx, mut sy) = (0usize, 0.0, 0.0);
                    for a in 0..SUBSAMPLES {
                        for b in 0..SUBSAMPLES {
                            let x = x0 + (a as f64 + 0.5) * sub;
                            let y = y0 + (b as f64 + 0.5) * sub;
                            if x * x + y * y <= r2 {
                                count += 1;
                                sx += x;
                                sy += y;
                            }
                        }
                    }
                    if count > 0 {
                        centers.push(vec![sx / count as f64, sy / count as f64]);
                        measures.push(count as f64 * sub * sub);
                    }
                }
            }
        }
        Ok(Self { n, radius, cells_per_axis, centers, measures })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn measures(&self) -> &[f64] {
        &self.measures
    }

    pub fn total_measure(&self) -> f64 {
        self.measures.iter().sum()
    }

    /// Index of the cell whose centre is closest to the origin.
    pub fn center_index(&self) -> usize {
        let r2 = |c: &Vec<f64>| c.iter().map(|v| v * v).sum::<f64>();
        (0..self.len()).min_by(|&a, &b| r2(&self.centers[a]).total_cmp(&r2(&self.centers[b]))).unwrap_or(0)
    }

    /// Cells whose centre lies in the closed ball of radius `r`.
    pub fn indices_within(&self, r: f64) -> Vec<usize> {
        let r2 = r * r * (1.0 + 1e-12);
        (0..self.len()).filter(|&i| self.centers[i].iter().map(|v| v * v).sum::<f64>() <= r2).collect()
    }

    /// `(Σ_{|x_i| ≤ r} m_i |u_i|^q)^{1/q}`.
    pub fn lq_norm(&self, u: &[f64], q: f64, r: f64) -> f64 {
        self.indices_within(r).iter().map(|&i| self.measures[i] * u[i].abs().powf(q)).sum::<f64>().powf(1.0 / q)
    }
}
