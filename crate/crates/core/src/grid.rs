//! Spatial grids and sampled paths.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ordered sample points inside a parameter interval `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    points: Vec<f64>,
    interval: (f64, f64),
}

impl SpatialGrid {
    pub fn new(points: Vec<f64>, interval: (f64, f64)) -> Result<Self> {
        let (lo, hi) = interval;
        if !(lo.is_finite() && hi.is_finite()) || lo > hi {
            return Err(Error::InvalidGrid(format!("bad interval ({lo}, {hi})")));
        }
        if points.is_empty() {
            return Err(Error::InvalidGrid("grid has no points".into()));
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("points must be strictly increasing".into()));
        }
        if points.iter().any(|p| !p.is_finite() || *p < lo || *p > hi) {
            return Err(Error::InvalidGrid(format!("points must lie inside [{lo}, {hi}]")));
        }
        Ok(Self { points, interval })
    }

    /// `n` equally spaced points covering `[lo, hi]`, endpoints included.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n < 2 || !(hi > lo) {
            return Err(Error::InvalidGrid(format!(
                "uniform grid needs n >= 2 and hi > lo (n = {n}, [{lo}, {hi}])"
            )));
        }
        let h = (hi - lo) / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| lo + i as f64 * h).collect();
        points[n - 1] = hi;
        Self::new(points, (lo, hi))
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_spacing(&self) -> f64 {
        self.points.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Spacing if the grid is uniform to 1e-9 relative.
    pub fn uniform_spacing(&self) -> Option<f64> {
        if self.points.len() < 2 {
            return None;
        }
        let h = (self.points[self.points.len() - 1] - self.points[0]) / (self.points.len() - 1) as f64;
        let uniform = self.points.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
        uniform.then_some(h)
    }

    /// Trapezoid weights over the grid points.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let n = self.points.len();
        let mut w = vec![0.0; n];
        for i in 0..n.saturating_sub(1) {
            let h = self.points[i + 1] - self.points[i];
            w[i] += 0.5 * h;
            w[i + 1] += 0.5 * h;
        }
        w
    }
}

/// One realization of a process on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub grid: SpatialGrid,
    pub values: Vec<f64>,
}

impl PathSample {
    pub fn new(grid: SpatialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("path values must be finite".into()));
        }
        Ok(Self { grid, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(SpatialGrid::new(vec![], (0.0, 1.0)).is_err());
        assert!(SpatialGrid::new(vec![0.5, 0.5], (0.0, 1.0)).is_err());
        assert!(SpatialGrid::new(vec![0.5, 1.5], (0.0, 1.0)).is_err());
        assert!(SpatialGrid::uniform(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn trapezoid_weights_sum_to_length() {
        let g = SpatialGrid::uniform(0.0, 2.0, 17).unwrap();
        let s: f64 = g.trapezoid_weights().iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        assert_eq!(g.uniform_spacing(), Some(0.125));
        let g = SpatialGrid::new(vec![0.0, 0.1, 1.0], (0.0, 1.0)).unwrap();
        assert!(g.uniform_spacing().is_none());
        assert!((g.max_spacing() - 0.9).abs() < 1e-15);
    }
}
