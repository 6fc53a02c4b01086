//! Law of the fixed-time (`t = 1`) solution of the heat equation driven by
//! space-time white noise, started from zero:
//!
//! ```text
//! x(u) = int_0^1 int_R p_{1-s}(u - v) W(dv, ds)
//! ```
//!
//! The field is stationary in `u` with covariance
//! `R(d) = int_0^1 p_{2(1-s)}(d) ds = e^{-d^2/4}/sqrt(pi) - (|d|/2) erfc(|d|/2)`.
//! Paths are reported as increments `x(u) - x(U1)` from the left end of the
//! grid interval.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::grid::{PathSample, SpatialGrid};
use crate::quadrature::{self, Tolerance};
use crate::sampling::{fill_standard_normal, CovarianceMatrix, GaussianFactor, SeedSpec};

/// Gaussian density with variance `t` at `u`.
pub fn heat_kernel(t: f64, u: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    Ok(gaussian_density(t, u))
}

/// `p_t(u)` without argument checks.
#[inline]
pub fn gaussian_density(variance: f64, u: f64) -> f64 {
    (-0.5 * u * u / variance).exp() / (2.0 * PI * variance).sqrt()
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Stationary covariance `E x(u) x(u + d)` of the solution field.
pub fn covariance_r(d: f64) -> f64 {
    let a = d.abs();
    (-0.25 * a * a).exp() / PI.sqrt() - 0.5 * a * erfc(0.5 * a)
}

/// Brute-force `R(d)` straight from the stochastic-integral isometry:
/// `int_0^1 int_R p_{1-s}(u - v) p_{1-s}(u' - v) dv ds` with `u - u' = d`,
/// both integrals by adaptive quadrature.
pub fn covariance_r_by_isometry(d: f64) -> Result<f64> {
    let half = 0.5 * d.abs();
    let inner_tol = Tolerance::new(1e-15, 1e-13);
    let mut failure = None;
    let outer = quadrature::adaptive_endpoint_singular(
        |tau| {
            if tau <= 0.0 {
                return 0.0;
            }
            let width = 12.0 * tau.sqrt();
            let res = quadrature::adaptive_with_breaks(
                |v| gaussian_density(tau, half - v) * gaussian_density(tau, -half - v),
                -half - width,
                half + width,
                &[-half, 0.0, half],
                inner_tol,
            );
            match res {
                Ok(e) => e.value,
                Err(err) => {
                    failure.get_or_insert(err);
                    0.0
                }
            }
        },
        0.0,
        1.0,
        Tolerance::new(1e-14, 1e-12),
    )?;
    if let Some(err) = failure {
        return Err(err);
    }
    Ok(outer.value)
}

/// `E (x(u) - x(U1)) (x(v) - x(U1))`.
pub fn increment_covariance(u: f64, v: f64, base: f64) -> f64 {
    covariance_r(u - v) - covariance_r(u - base) - covariance_r(v - base) + covariance_r(0.0)
}

/// Variance of the increment `x(u) - x(U1)`.
pub fn increment_variance(u: f64, base: f64) -> f64 {
    2.0 * (covariance_r(0.0) - covariance_r(u - base))
}

pub fn increment_covariance_matrix(grid: &SpatialGrid) -> Result<CovarianceMatrix> {
    let base = grid.interval().0;
    let p = grid.points();
    CovarianceMatrix::from_fn(p.len(), |i, j| increment_covariance(p[i], p[j], base))
}

/// Cholesky-route sampler of the increment process; factorizes once.
#[derive(Debug, Clone)]
pub struct HeatCholeskySampler {
    grid: SpatialGrid,
    factor: GaussianFactor,
}

impl HeatCholeskySampler {
    pub fn new(grid: &SpatialGrid) -> Result<Self> {
        let factor = increment_covariance_matrix(grid)?.factor()?;
        Ok(Self {
            grid: grid.clone(),
            factor,
        })
    }

    pub fn jitter_applied(&self) -> f64 {
        self.factor.jitter_applied()
    }

    pub fn sample(&self, seed: SeedSpec) -> Result<PathSample> {
        let values = self.factor.sample(&mut seed.rng());
        PathSample::new(self.grid.clone(), values)
    }
}

/// Increment path with covariance [`increment_covariance`], sampled through
/// the Cholesky factor of the full covariance matrix.
pub fn simulate_solution_path(grid: &SpatialGrid, seed: SeedSpec) -> Result<PathSample> {
    HeatCholeskySampler::new(grid)?.sample(seed)
}

/// Exact sampler for uniform grids starting at `U1`, by circulant
/// embedding of the stationary covariance `R` (FFT of size the next power
/// of two above `2(n - 1)`).
pub struct CirculantHeatSampler {
    grid: SpatialGrid,
    sqrt_eigen: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
    min_eigenvalue: f64,
}

impl std::fmt::Debug for CirculantHeatSampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CirculantHeatSampler")
            .field("points", &self.grid.len())
            .field("embedding", &self.sqrt_eigen.len())
            .field("min_eigenvalue", &self.min_eigenvalue)
            .finish()
    }
}

impl CirculantHeatSampler {
    pub fn new(grid: &SpatialGrid) -> Result<Self> {
        let h = grid
            .uniform_spacing()
            .ok_or_else(|| Error::InvalidGrid("circulant sampler needs a uniform grid".into()))?;
        if grid.points()[0] != grid.interval().0 {
            return Err(Error::InvalidGrid(
                "circulant sampler needs the grid to start at U1".into(),
            ));
        }
        let n = grid.len();
        let m = (2 * (n - 1)).max(2).next_power_of_two();
        let mut row: Vec<Complex64> = (0..m)
            .map(|j| Complex64::new(covariance_r(j.min(m - j) as f64 * h), 0.0))
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(m);
        fft.process(&mut row);
        let max = row.iter().map(|c| c.re).fold(f64::MIN, f64::max);
        let min = row.iter().map(|c| c.re).fold(f64::MAX, f64::min);
        if min < -1e-10 * max {
            return Err(Error::NonPsd { jitter: 0.0 });
        }
        let sqrt_eigen = row.iter().map(|c| (c.re.max(0.0) / m as f64).sqrt()).collect();
        Ok(Self {
            grid: grid.clone(),
            sqrt_eigen,
            fft,
            min_eigenvalue: min,
        })
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    /// Writes the increment path into `out` (length = grid size).
    pub fn sample_into(&self, seed: SeedSpec, out: &mut [f64]) {
        let m = self.sqrt_eigen.len();
        let mut rng = seed.rng();
        let mut z = vec![0.0; 2 * m];
        fill_standard_normal(&mut rng, &mut z);
        let mut buf: Vec<Complex64> = self
            .sqrt_eigen
            .iter()
            .zip(z.chunks_exact(2))
            .map(|(s, c)| Complex64::new(s * c[0], s * c[1]))
            .collect();
        self.fft.process(&mut buf);
        let origin = buf[0].re;
        for (o, b) in out.iter_mut().zip(&buf) {
            *o = b.re - origin;
        }
        out[0] = 0.0;
    }

    pub fn sample(&self, seed: SeedSpec) -> Result<PathSample> {
        let mut v = vec![0.0; self.grid.len()];
        self.sample_into(seed, &mut v);
        PathSample::new(self.grid.clone(), v)
    }
}

/// Discretization of the white-noise sheet.
///
/// Time is cut at `1 - time_cutoff`; the remaining `tau = 1 - s` range
/// `[time_cutoff, 1]` is split into `time_layers` geometric layers. Inside a
/// layer with representative `tau_m` the spatial cells have width
/// `sqrt(tau_m) / cells_per_width` and extend `min(spatial_cutoff,
/// 10 sqrt(tau))` beyond the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SheetConfig {
    pub time_cutoff: f64,
    pub spatial_cutoff: f64,
    pub time_layers: usize,
    pub cells_per_width: usize,
    /// Reject configurations whose predicted increment-variance bias
    /// `2 sqrt(delta / pi)` exceeds this.
    pub bias_tolerance: Option<f64>,
}

impl Default for SheetConfig {
    fn default() -> Self {
        Self::for_target_standard_error(0.01)
    }
}

impl SheetConfig {
    /// Time cutoff chosen so that `sqrt(delta / pi)` is a tenth of `se`.
    pub fn for_target_standard_error(se: f64) -> Self {
        let delta = (0.1 * se * PI.sqrt()).powi(2);
        Self::with_time_cutoff(delta)
    }

    pub fn with_time_cutoff(delta: f64) -> Self {
        let layers = (12.0 * (1.0 / delta).ln()).ceil().max(8.0) as usize;
        Self {
            time_cutoff: delta,
            spatial_cutoff: 6.0 * std::f64::consts::SQRT_2,
            time_layers: layers,
            cells_per_width: 1,
            bias_tolerance: None,
        }
    }

    /// Variance missing from `x(u)` because of the time cutoff:
    /// `int_{1-delta}^1 (2 sqrt(pi (1-s)))^{-1} ds = sqrt(delta / pi)`.
    pub fn predicted_field_variance_bias(&self) -> f64 {
        (self.time_cutoff / PI).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.time_cutoff > 0.0 && self.time_cutoff < 1.0) {
            return Err(Error::Config(format!(
                "time cutoff must lie in (0, 1), got {}",
                self.time_cutoff
            )));
        }
        if !(self.spatial_cutoff >= 4.0) {
            return Err(Error::Config(format!(
                "spatial cutoff {} must cover at least 4 kernel widths",
                self.spatial_cutoff
            )));
        }
        if self.time_layers == 0 || self.cells_per_width == 0 {
            return Err(Error::Config("sheet resolution must be positive".into()));
        }
        if let Some(tol) = self.bias_tolerance {
            let bias = 2.0 * self.predicted_field_variance_bias();
            if bias > tol {
                return Err(Error::CutoffTooCoarse { bias, tolerance: tol });
            }
        }
        Ok(())
    }

    fn layers(&self) -> Vec<SheetLayer> {
        let ln_lo = self.time_cutoff.ln();
        let step = -ln_lo / self.time_layers as f64;
        (0..self.time_layers)
            .map(|k| {
                let a = (ln_lo + k as f64 * step).exp();
                let b = if k + 1 == self.time_layers {
                    1.0
                } else {
                    (ln_lo + (k + 1) as f64 * step).exp()
                };
                // Representative time that makes the layer's on-diagonal
                // variance exact: tau_m^{-1/2} (b - a) = 2 (sqrt b - sqrt a).
                let mid = 0.5 * (a.sqrt() + b.sqrt());
                SheetLayer {
                    tau_mid: mid * mid,
                    tau_hi: b,
                    width: b - a,
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct SheetLayer {
    tau_mid: f64,
    tau_hi: f64,
    width: f64,
}

/// The undifferenced field `x(u)` at `points` from one discretized sheet.
pub fn simulate_field_via_sheet(points: &[f64], seed: SeedSpec, cfg: &SheetConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if points.is_empty() {
        return Ok(Vec::new());
    }
    let lo = points.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = points.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut rng = seed.rng();
    let mut out = vec![0.0; points.len()];
    let mut noise = Vec::new();
    for layer in cfg.layers() {
        let sd = layer.tau_mid.sqrt();
        let reach = (10.0 * layer.tau_hi.sqrt()).min(cfg.spatial_cutoff);
        let h = sd / cfg.cells_per_width as f64;
        let start = lo - reach;
        let cells = ((hi - lo + 2.0 * reach) / h).ceil() as usize;
        noise.resize(cells, 0.0);
        fill_standard_normal(&mut rng, &mut noise);
        let amp = (h * layer.width).sqrt();
        let inv_two_var = 0.5 / layer.tau_mid;
        let norm = 1.0 / (2.0 * PI * layer.tau_mid).sqrt();
        let kernel_reach = 10.0 * sd;
        for (x, &u) in out.iter_mut().zip(points) {
            // only cells within 10 standard deviations of u contribute
            let first = (((u - kernel_reach - start) / h).floor().max(0.0)) as usize;
            let last = ((((u + kernel_reach - start) / h).ceil()) as usize).min(cells);
            let mut acc = 0.0;
            for (i, z) in noise.iter().enumerate().take(last).skip(first) {
                let v = start + (i as f64 + 0.5) * h;
                let d = u - v;
                acc += (-d * d * inv_two_var).exp() * z;
            }
            *x += acc * norm * amp;
        }
    }
    Ok(out)
}

/// Increment path `x(u) - x(U1)` from the discretized sheet.
pub fn simulate_via_sheet(grid: &SpatialGrid, seed: SeedSpec, cfg: &SheetConfig) -> Result<PathSample> {
    let base = grid.interval().0;
    let mut pts = Vec::with_capacity(grid.len() + 1);
    pts.push(base);
    pts.extend_from_slice(grid.points());
    let field = simulate_field_via_sheet(&pts, seed, cfg)?;
    let origin = field[0];
    let values = grid
        .points()
        .iter()
        .zip(&field[1..])
        .map(|(&u, &x)| if u == base { 0.0 } else { x - origin })
        .collect();
    PathSample::new(grid.clone(), values)
}

/// Dense increment covariance matrix, exposed for diagnostics.
pub fn increment_covariance_dense(points: &[f64], base: f64) -> DMatrix<f64> {
    DMatrix::from_fn(points.len(), points.len(), |i, j| {
        increment_covariance(points[i], points[j], base)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kernel_values() {
        assert_relative_eq!(heat_kernel(1.0, 0.0).unwrap(), 1.0 / (2.0 * PI).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(heat_kernel(2.0, 0.0).unwrap(), 1.0 / (2.0 * PI.sqrt()), epsilon = 1e-15);
        assert_eq!(heat_kernel(0.0, 1.0), Err(Error::NonPositiveTime(0.0)));
        assert!(heat_kernel(-1.0, 1.0).is_err());
    }

    #[test]
    fn kernel_integrates_to_one() {
        let e = quadrature::adaptive(|u| gaussian_density(1.0, u), -8.0, 8.0, Tolerance::default()).unwrap();
        // mass outside [-8, 8] is 2 Phi(-8) ~ 1.2e-15
        assert!((e.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn covariance_basic_shape() {
        assert_relative_eq!(covariance_r(0.0), 1.0 / PI.sqrt(), epsilon = 1e-15);
        assert!(covariance_r(8.0) < 2e-9);
        assert!(covariance_r(9.0) < 1e-10);
        for d in [0.1, 0.7, 2.3, 5.0] {
            assert_eq!(covariance_r(d), covariance_r(-d));
            assert!(covariance_r(d) < covariance_r(d * 0.9));
        }
    }

    #[test]
    fn increment_covariance_at_base_and_diagonal() {
        assert_eq!(increment_covariance(0.3, 0.3, 0.3), 0.0);
        for u in [0.1, 0.5, 1.7] {
            let v = increment_covariance(u, u, 0.0);
            assert_relative_eq!(v, 2.0 * (covariance_r(0.0) - covariance_r(u)), epsilon = 1e-15);
            assert!(v >= 0.0);
        }
    }

    #[test]
    fn sheet_config_validation() {
        let mut c = SheetConfig::with_time_cutoff(1e-4);
        assert!(c.validate().is_ok());
        c.bias_tolerance = Some(1e-3);
        assert!(matches!(c.validate(), Err(Error::CutoffTooCoarse { .. })));
        let mut c = SheetConfig::with_time_cutoff(1e-4);
        c.spatial_cutoff = 1.0;
        assert!(c.validate().is_err());
        assert!(SheetConfig::with_time_cutoff(1.5).validate().is_err());
    }

    #[test]
    fn single_point_grid_at_base_is_zero() {
        let g = SpatialGrid::new(vec![0.0], (0.0, 1.0)).unwrap();
        let s = SeedSpec::new(5, 0);
        assert_eq!(simulate_solution_path(&g, s).unwrap().values, vec![0.0]);
        let cfg = SheetConfig::with_time_cutoff(1e-3);
        assert_eq!(simulate_via_sheet(&g, s, &cfg).unwrap().values, vec![0.0]);
    }

    #[test]
    fn circulant_sampler_is_an_exact_factorization() {
        // averaged outer products against the increment covariance
        let g = SpatialGrid::uniform(0.0, 2.0, 5).unwrap();
        let s = CirculantHeatSampler::new(&g).unwrap();
        assert!(s.min_eigenvalue() > 0.0);
        let n = 40_000;
        let mut acc = DMatrix::<f64>::zeros(5, 5);
        let mut buf = vec![0.0; 5];
        for r in 0..n {
            s.sample_into(SeedSpec::new(9, r), &mut buf);
            for i in 0..5 {
                for j in 0..5 {
                    acc[(i, j)] += buf[i] * buf[j];
                }
            }
        }
        acc /= n as f64;
        let target = increment_covariance_dense(g.points(), 0.0);
        for i in 1..5 {
            for j in 1..5 {
                let se = ((target[(i, i)] * target[(j, j)] + target[(i, j)].powi(2)) / n as f64).sqrt();
                assert!(
                    (acc[(i, j)] - target[(i, j)]).abs() < 4.5 * se,
                    "({i},{j}) {} vs {}",
                    acc[(i, j)],
                    target[(i, j)]
                );
            }
        }
    }

    #[test]
    fn circulant_rejects_nonuniform_grid() {
        let g = SpatialGrid::new(vec![0.0, 0.1, 1.0], (0.0, 1.0)).unwrap();
        assert!(CirculantHeatSampler::new(&g).is_err());
    }
}
