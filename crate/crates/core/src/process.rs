//! The three path families whose local times are estimated: the heat
//! solution increment `x(u) - x(U1)` over a spatial interval, the Brownian
//! bridge on `[0, 1]` and Brownian motion on `[0, T]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::heat_model::{increment_covariance, increment_variance, CirculantHeatSampler, HeatCholeskySampler};
use crate::sampling::{brownian_bridge_from_normals, brownian_motion_from_normals, fill_standard_normal, SeedSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProcessKind {
    Heat,
    Bridge,
    Motion,
}

impl ProcessKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProcessKind::Heat => "heat",
            ProcessKind::Bridge => "bridge",
            ProcessKind::Motion => "motion",
        }
    }
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProcessKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heat" => Ok(ProcessKind::Heat),
            "bridge" => Ok(ProcessKind::Bridge),
            "motion" => Ok(ProcessKind::Motion),
            other => Err(Error::UnknownProcess(other.to_string())),
        }
    }
}

/// A process family together with its parameter interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub kind: ProcessKind,
    pub interval: (f64, f64),
}

impl ProcessSpec {
    /// Bridge requires `(0, 1)`, motion `(0, T)`; the heat interval is free.
    pub fn new(kind: ProcessKind, interval: (f64, f64)) -> Result<Self> {
        let (a, b) = interval;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidGrid(format!("interval ({a}, {b}) is empty")));
        }
        match kind {
            ProcessKind::Bridge if (a, b) != (0.0, 1.0) => Err(Error::InvalidGrid("the bridge lives on (0, 1)".into())),
            ProcessKind::Motion if a != 0.0 => Err(Error::InvalidGrid("Brownian motion starts at 0".into())),
            _ => Ok(Self { kind, interval }),
        }
    }

    pub fn heat(lo: f64, hi: f64) -> Result<Self> {
        Self::new(ProcessKind::Heat, (lo, hi))
    }

    pub fn bridge() -> Self {
        Self {
            kind: ProcessKind::Bridge,
            interval: (0.0, 1.0),
        }
    }

    pub fn motion(horizon: f64) -> Result<Self> {
        Self::new(ProcessKind::Motion, (0.0, horizon))
    }

    pub fn length(&self) -> f64 {
        self.interval.1 - self.interval.0
    }

    /// Variance of the path at parameter `s`.
    pub fn marginal_variance(&self, s: f64) -> f64 {
        match self.kind {
            ProcessKind::Heat => increment_variance(s, self.interval.0),
            ProcessKind::Bridge => (s * (1.0 - s)).max(0.0),
            ProcessKind::Motion => s.max(0.0),
        }
    }

    pub fn covariance(&self, s: f64, t: f64) -> f64 {
        match self.kind {
            ProcessKind::Heat => increment_covariance(s, t, self.interval.0),
            ProcessKind::Bridge => (s.min(t) * (1.0 - s.max(t))).max(0.0),
            ProcessKind::Motion => s.min(t).max(0.0),
        }
    }

    /// Uniform grid of `n` points covering the interval.
    pub fn grid(&self, n: usize) -> Result<SpatialGrid> {
        SpatialGrid::uniform(self.interval.0, self.interval.1, n)
    }
}

enum Engine {
    Circulant(CirculantHeatSampler),
    Cholesky(Box<HeatCholeskySampler>),
    Bridge,
    Motion,
}

/// Path generator for a process on a fixed grid, reused across replicates.
pub struct PathSampler {
    spec: ProcessSpec,
    grid: SpatialGrid,
    engine: Engine,
}

impl fmt::Debug for PathSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let engine = match self.engine {
            Engine::Circulant(_) => "circulant",
            Engine::Cholesky(_) => "cholesky",
            Engine::Bridge => "bridge",
            Engine::Motion => "motion",
        };
        f.debug_struct("PathSampler")
            .field("spec", &self.spec)
            .field("points", &self.grid.len())
            .field("engine", &engine)
            .finish()
    }
}

impl PathSampler {
    /// Heat paths on uniform grids starting at `U1` use circulant embedding;
    /// other heat grids fall back to a dense Cholesky factor.
    pub fn new(spec: ProcessSpec, grid: SpatialGrid) -> Result<Self> {
        if grid.interval() != spec.interval {
            return Err(Error::InvalidGrid(format!(
                "grid interval {:?} differs from process interval {:?}",
                grid.interval(),
                spec.interval
            )));
        }
        let engine = match spec.kind {
            ProcessKind::Heat => {
                if grid.uniform_spacing().is_some() && grid.points()[0] == spec.interval.0 && grid.len() > 2 {
                    Engine::Circulant(CirculantHeatSampler::new(&grid)?)
                } else {
                    Engine::Cholesky(Box::new(HeatCholeskySampler::new(&grid)?))
                }
            }
            ProcessKind::Bridge => Engine::Bridge,
            ProcessKind::Motion => Engine::Motion,
        };
        Ok(Self { spec, grid, engine })
    }

    pub fn uniform(spec: ProcessSpec, points: usize) -> Result<Self> {
        Self::new(spec, spec.grid(points)?)
    }

    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    /// Writes one path into `out` (length = grid size).
    pub fn sample_into(&self, seed: SeedSpec, out: &mut [f64]) -> Result<()> {
        match &self.engine {
            Engine::Circulant(c) => c.sample_into(seed, out),
            Engine::Cholesky(c) => out.copy_from_slice(&c.sample(seed)?.values),
            Engine::Bridge | Engine::Motion => {
                let mut z = vec![0.0; self.grid.len()];
                fill_standard_normal(&mut seed.rng(), &mut z);
                let path = if matches!(self.engine, Engine::Bridge) {
                    brownian_bridge_from_normals(self.grid.points(), &z)
                } else {
                    brownian_motion_from_normals(self.grid.points(), &z)
                };
                out.copy_from_slice(&path);
            }
        }
        Ok(())
    }

    pub fn sample(&self, seed: SeedSpec) -> Result<Vec<f64>> {
        let mut v = vec![0.0; self.grid.len()];
        self.sample_into(seed, &mut v)?;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for k in [ProcessKind::Heat, ProcessKind::Bridge, ProcessKind::Motion] {
            assert_eq!(k.as_str().parse::<ProcessKind>().unwrap(), k);
        }
        assert!(matches!("sheet".parse::<ProcessKind>(), Err(Error::UnknownProcess(_))));
    }

    #[test]
    fn interval_rules() {
        assert!(ProcessSpec::new(ProcessKind::Bridge, (0.0, 2.0)).is_err());
        assert!(ProcessSpec::new(ProcessKind::Motion, (1.0, 2.0)).is_err());
        assert!(ProcessSpec::heat(1.0, 1.0).is_err());
        assert!(ProcessSpec::heat(-1.0, 3.0).is_ok());
    }

    #[test]
    fn marginal_matches_covariance_diagonal() {
        for spec in [
            ProcessSpec::bridge(),
            ProcessSpec::motion(2.0).unwrap(),
            ProcessSpec::heat(0.0, 5.0).unwrap(),
        ] {
            for s in [0.1, 0.5, 0.9] {
                assert!((spec.marginal_variance(s) - spec.covariance(s, s)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn engines_and_pinned_points() {
        let heat = PathSampler::uniform(ProcessSpec::heat(0.0, 2.0).unwrap(), 64).unwrap();
        assert!(format!("{heat:?}").contains("circulant"));
        let p = heat.sample(SeedSpec::new(1, 0)).unwrap();
        assert_eq!(p[0], 0.0);
        let odd = SpatialGrid::new(vec![0.0, 0.3, 1.1, 2.0], (0.0, 2.0)).unwrap();
        let chol = PathSampler::new(ProcessSpec::heat(0.0, 2.0).unwrap(), odd).unwrap();
        assert!(format!("{chol:?}").contains("cholesky"));
        let b = PathSampler::uniform(ProcessSpec::bridge(), 33)
            .unwrap()
            .sample(SeedSpec::new(1, 0))
            .unwrap();
        assert_eq!((b[0], b[32]), (0.0, 0.0));
        assert!(PathSampler::new(ProcessSpec::bridge(), SpatialGrid::uniform(0.0, 2.0, 8).unwrap()).is_err());
    }
}
