//! Reproducible random streams and exact Gaussian samplers.
//!
//! Every replicate owns a ChaCha8 stream keyed by `(master_seed,
//! replicate_index)`: the master seed is expanded into the cipher key and
//! the replicate index selects the stream. Streams never depend on call
//! order or on how replicates are scheduled across workers.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{PathSample, SpatialGrid};

pub type StreamRng = ChaCha8Rng;

/// Identifies one replicate's random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub replicate_index: u64,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeedSpec {
    pub fn new(master_seed: u64, replicate_index: u64) -> Self {
        Self {
            master_seed,
            replicate_index,
        }
    }

    pub fn rng(&self) -> StreamRng {
        let mut state = self.master_seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.replicate_index);
        rng
    }

    /// A new master seed for an independent family of replicates, keyed by
    /// `tag` (FNV-1a hashed and mixed into the master seed).
    pub fn derive_master(master_seed: u64, tag: &str) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in tag.bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        let mut state = master_seed ^ h;
        splitmix64(&mut state)
    }
}

/// Fills `out` with i.i.d. standard normal draws.
pub fn fill_standard_normal<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    for v in out.iter_mut() {
        *v = rng.sample(StandardNormal);
    }
}

const JITTER_START: f64 = 1e-14;
const JITTER_MAX: f64 = 1e-8;

/// Symmetric covariance matrix validated for Gaussian sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    entries: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::InvalidCovariance(format!(
                "not square: {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let n = entries.nrows();
        let scale = entries.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for i in 0..n {
            if !(entries[(i, i)] >= 0.0) {
                return Err(Error::InvalidCovariance(format!(
                    "negative diagonal entry {} at {i}",
                    entries[(i, i)]
                )));
            }
            for j in 0..i {
                let (a, b) = (entries[(i, j)], entries[(j, i)]);
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::InvalidCovariance("non-finite entry".into()));
                }
                if (a - b).abs() > 1e-12 * scale.max(f64::MIN_POSITIVE) {
                    return Err(Error::InvalidCovariance(format!(
                        "asymmetric at ({i}, {j}): {a} vs {b}"
                    )));
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Result<Self> {
        Self::new(DMatrix::from_fn(n, n, |i, j| if i <= j { f(i, j) } else { f(j, i) }))
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    /// Cholesky factor with the escalating jitter policy: try no jitter,
    /// then `delta * I` for `delta = 1e-14, 1e-13, ..., 1e-8` times the
    /// largest diagonal entry. Coordinates with exactly zero variance are
    /// pinned at zero and excluded from the factorization.
    pub fn factor(&self) -> Result<GaussianFactor> {
        let n = self.dim();
        let active: Vec<usize> = (0..n).filter(|&i| self.entries[(i, i)] > 0.0).collect();
        let max_diag = active.iter().map(|&i| self.entries[(i, i)]).fold(0.0, f64::max);
        let sub = DMatrix::from_fn(active.len(), active.len(), |i, j| {
            let (a, b) = (active[i], active[j]);
            0.5 * (self.entries[(a, b)] + self.entries[(b, a)])
        });
        if active.is_empty() {
            return Ok(GaussianFactor {
                dim: n,
                active,
                lower: DMatrix::zeros(0, 0),
                jitter_applied: 0.0,
            });
        }
        let mut rel = 0.0;
        loop {
            let delta = rel * max_diag;
            let mut m = sub.clone();
            for i in 0..m.nrows() {
                m[(i, i)] += delta;
            }
            if let Some(ch) = nalgebra::Cholesky::new(m) {
                let lower = ch.unpack();
                if lower.iter().all(|v| v.is_finite()) {
                    return Ok(GaussianFactor {
                        dim: n,
                        active,
                        lower,
                        jitter_applied: delta,
                    });
                }
            }
            rel = if rel == 0.0 { JITTER_START } else { rel * 10.0 };
            if rel > JITTER_MAX * (1.0 + 1e-9) {
                return Err(Error::NonPsd {
                    jitter: JITTER_MAX * max_diag,
                });
            }
        }
    }
}

/// Lower-triangular factor `L` with `L L^T` equal to the (jittered)
/// covariance restricted to its nonzero-variance coordinates.
#[derive(Debug, Clone)]
pub struct GaussianFactor {
    dim: usize,
    active: Vec<usize>,
    lower: DMatrix<f64>,
    jitter_applied: f64,
}

impl GaussianFactor {
    pub fn jitter_applied(&self) -> f64 {
        self.jitter_applied
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Maps standard normal draws (one per nonzero-variance coordinate) to
    /// a sample.
    pub fn transform(&self, normals: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        if self.active.is_empty() {
            return out;
        }
        let z = DVector::from_column_slice(normals);
        let x = &self.lower * z;
        for (k, &i) in self.active.iter().enumerate() {
            out[i] = x[k];
        }
        out
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        let mut z = vec![0.0; self.active.len()];
        fill_standard_normal(rng, &mut z);
        self.transform(&z)
    }

    /// `L L^T` expanded back to full dimension.
    pub fn reconstructed(&self) -> DMatrix<f64> {
        let mut full = DMatrix::zeros(self.dim, self.dim);
        let llt = &self.lower * self.lower.transpose();
        for (a, &i) in self.active.iter().enumerate() {
            for (b, &j) in self.active.iter().enumerate() {
                full[(i, j)] = llt[(a, b)];
            }
        }
        full
    }
}

/// `L z` with `L` the (jittered) Cholesky factor of `cov` and `z` drawn
/// from the replicate stream.
pub fn sample_gaussian_vector(cov: &CovarianceMatrix, seed: SeedSpec) -> Result<Vec<f64>> {
    let factor = cov.factor()?;
    Ok(factor.sample(&mut seed.rng()))
}

fn check_unit_interval(grid: &SpatialGrid) -> Result<()> {
    let pts = grid.points();
    if pts[0] < 0.0 || pts[pts.len() - 1] > 1.0 {
        return Err(Error::InvalidGrid("bridge grid must lie in [0, 1]".into()));
    }
    Ok(())
}

/// Brownian motion from i.i.d. normals: one draw per grid point, cumulative
/// sums of `sqrt(dt) z`.
pub fn brownian_motion_from_normals(points: &[f64], normals: &[f64]) -> Vec<f64> {
    let mut prev_t = 0.0;
    let mut x = 0.0;
    points
        .iter()
        .zip(normals)
        .map(|(&t, &z)| {
            let dt = t - prev_t;
            if dt > 0.0 {
                x += dt.sqrt() * z;
            }
            prev_t = t;
            x
        })
        .collect()
}

/// Brownian bridge by sequential conditioning, which is the Cholesky factor
/// of `min(s,t) - s t` applied in O(n).
pub fn brownian_bridge_from_normals(points: &[f64], normals: &[f64]) -> Vec<f64> {
    let mut prev_t = 0.0;
    let mut prev_x = 0.0;
    points
        .iter()
        .zip(normals)
        .map(|(&t, &z)| {
            let x = if t <= 0.0 || t >= 1.0 {
                0.0
            } else {
                let rest = 1.0 - prev_t;
                let mean = prev_x * (1.0 - t) / rest;
                let var = (t - prev_t) * (1.0 - t) / rest;
                mean + var.max(0.0).sqrt() * z
            };
            prev_t = t;
            prev_x = x;
            x
        })
        .collect()
}

pub fn sample_brownian_motion(grid: &SpatialGrid, seed: SeedSpec) -> Result<PathSample> {
    if grid.points()[0] < 0.0 {
        return Err(Error::InvalidGrid("Brownian motion grid must be >= 0".into()));
    }
    let mut z = vec![0.0; grid.len()];
    fill_standard_normal(&mut seed.rng(), &mut z);
    let values = brownian_motion_from_normals(grid.points(), &z);
    PathSample::new(grid.clone(), values)
}

pub fn sample_brownian_bridge(grid: &SpatialGrid, seed: SeedSpec) -> Result<PathSample> {
    check_unit_interval(grid)?;
    let mut z = vec![0.0; grid.len()];
    fill_standard_normal(&mut seed.rng(), &mut z);
    let values = brownian_bridge_from_normals(grid.points(), &z);
    PathSample::new(grid.clone(), values)
}

pub fn bridge_covariance(s: f64, t: f64) -> f64 {
    s.min(t) * (1.0 - s.max(t))
}

pub fn motion_covariance(s: f64, t: f64) -> f64 {
    s.min(t)
}

/// Bridge through the dense covariance matrix `s(1 - t)`.
pub fn sample_brownian_bridge_dense(grid: &SpatialGrid, seed: SeedSpec) -> Result<PathSample> {
    check_unit_interval(grid)?;
    let p = grid.points();
    let cov = CovarianceMatrix::from_fn(p.len(), |i, j| bridge_covariance(p[i], p[j]))?;
    let values = sample_gaussian_vector(&cov, seed)?;
    PathSample::new(grid.clone(), values)
}

/// Bridge through `w(t) - t w(1)` with `w` sampled on the grid plus `t = 1`.
pub fn sample_brownian_bridge_from_motion(grid: &SpatialGrid, seed: SeedSpec) -> Result<PathSample> {
    check_unit_interval(grid)?;
    let mut pts = grid.points().to_vec();
    let has_one = pts[pts.len() - 1] == 1.0;
    if !has_one {
        pts.push(1.0);
    }
    let mut z = vec![0.0; pts.len()];
    fill_standard_normal(&mut seed.rng(), &mut z);
    let w = brownian_motion_from_normals(&pts, &z);
    let w1 = w[w.len() - 1];
    let values = grid
        .points()
        .iter()
        .zip(&w)
        .map(|(&t, &x)| if t == 1.0 { 0.0 } else { x - t * w1 })
        .collect();
    PathSample::new(grid.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn zero_variance_is_exactly_zero() {
        let cov = CovarianceMatrix::new(DMatrix::from_element(1, 1, 0.0)).unwrap();
        for r in 0..10 {
            let x = sample_gaussian_vector(&cov, SeedSpec::new(3, r)).unwrap();
            assert_eq!(x, vec![0.0]);
        }
    }

    #[test]
    fn rank_one_coordinates_coincide() {
        let cov = CovarianceMatrix::new(DMatrix::from_element(2, 2, 1.0)).unwrap();
        let f = cov.factor().unwrap();
        assert!(f.jitter_applied() > 0.0 && f.jitter_applied() <= 1e-8);
        for r in 0..100 {
            let x = f.sample(&mut SeedSpec::new(11, r).rng());
            assert!((x[0] - x[1]).abs() < 1e-5, "{x:?}");
        }
    }

    #[test]
    fn indefinite_matrix_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let cov = CovarianceMatrix::new(m).unwrap();
        assert!(matches!(cov.factor(), Err(Error::NonPsd { .. })));
    }

    #[test]
    fn asymmetric_matrix_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.4, 1.0]);
        assert!(CovarianceMatrix::new(m).is_err());
    }

    #[test]
    fn same_seed_same_stream_distinct_index_distinct_stream() {
        let a: Vec<u64> = {
            let mut r = SeedSpec::new(42, 7).rng();
            (0..64).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = SeedSpec::new(42, 7).rng();
            (0..64).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        for other in [0u64, 6, 8, u64::MAX] {
            let mut r = SeedSpec::new(42, other).rng();
            let c: Vec<u64> = (0..64).map(|_| r.next_u64()).collect();
            assert_ne!(a[0], c[0]);
            assert!(a.iter().zip(&c).all(|(x, y)| x != y));
        }
    }

    #[test]
    fn bridge_recursion_is_a_cholesky_factor() {
        let pts = [0.0, 0.1, 0.25, 0.5, 0.8, 0.95, 1.0];
        let n = pts.len();
        // column k of the linear map = response to the k-th unit vector
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            let col = brownian_bridge_from_normals(&pts, &e);
            for i in 0..n {
                m[(i, k)] = col[i];
            }
        }
        let cov = &m * m.transpose();
        for i in 0..n {
            for j in 0..n {
                assert!((cov[(i, j)] - bridge_covariance(pts[i], pts[j])).abs() < 1e-14);
            }
            for j in (i + 1)..n {
                assert_eq!(m[(i, j)], 0.0, "factor must be lower triangular");
            }
        }
    }

    #[test]
    fn motion_recursion_is_a_cholesky_factor() {
        let pts = [0.0, 0.2, 0.3, 0.7, 1.0, 1.5];
        let n = pts.len();
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            let col = brownian_motion_from_normals(&pts, &e);
            for i in 0..n {
                m[(i, k)] = col[i];
            }
        }
        let cov = &m * m.transpose();
        for i in 0..n {
            for j in 0..n {
                assert!((cov[(i, j)] - motion_covariance(pts[i], pts[j])).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn pinned_endpoints() {
        let g = SpatialGrid::new(vec![0.0, 1.0], (0.0, 1.0)).unwrap();
        for r in 0..5 {
            let s = SeedSpec::new(1, r);
            assert_eq!(sample_brownian_bridge(&g, s).unwrap().values, vec![0.0, 0.0]);
            assert_eq!(sample_brownian_bridge_dense(&g, s).unwrap().values, vec![0.0, 0.0]);
            assert_eq!(
                sample_brownian_bridge_from_motion(&g, s).unwrap().values,
                vec![0.0, 0.0]
            );
        }
        let g0 = SpatialGrid::new(vec![0.0], (0.0, 0.0)).unwrap();
        assert_eq!(
            sample_brownian_motion(&g0, SeedSpec::new(1, 0)).unwrap().values,
            vec![0.0]
        );
    }

    #[test]
    fn bridge_rejects_grid_outside_unit_interval() {
        let g = SpatialGrid::uniform(0.0, 2.0, 5).unwrap();
        assert!(sample_brownian_bridge(&g, SeedSpec::new(0, 0)).is_err());
    }
}
