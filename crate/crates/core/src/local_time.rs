//! Kernel-smoothed local times `V_eps = int p_eps(y(s) - z) ds`, their exact
//! means and second moments, and the closed-form Brownian local-time laws
//! used as ground truth.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::grid::{PathSample, SpatialGrid};
use crate::mc::{run_replicates, McPlan};
use crate::process::{PathSampler, ProcessKind, ProcessSpec};
use crate::quadrature::{
    adaptive, adaptive_endpoint_singular, adaptive_semi_infinite, adaptive_with_breaks, Tolerance,
};
use crate::sampling::{brownian_bridge_from_normals, brownian_motion_from_normals, fill_standard_normal, SeedSpec};

/// Smallest admissible bandwidth is this multiple of the largest spacing.
pub const BANDWIDTH_FLOOR_FACTOR: f64 = 4.0;

pub fn bandwidth_floor(grid: &SpatialGrid) -> f64 {
    BANDWIDTH_FLOOR_FACTOR * grid.max_spacing()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalTimeEstimate {
    pub value: f64,
    pub epsilon: f64,
    pub z: f64,
    pub grid_size: usize,
    pub process: Option<ProcessKind>,
}

impl LocalTimeEstimate {
    pub fn with_process(mut self, kind: ProcessKind) -> Self {
        self.process = Some(kind);
        self
    }
}

fn check_bandwidth(grid: &SpatialGrid, epsilon: f64) -> Result<()> {
    let floor = bandwidth_floor(grid);
    if !(epsilon > 0.0) || epsilon < floor * (1.0 - 1e-12) {
        return Err(Error::BandwidthTooSmall { epsilon, floor });
    }
    Ok(())
}

/// Trapezoid rule for `int p_eps(path(u) - z) du` over the grid.
pub fn smoothed_occupation(path: &PathSample, z: f64, epsilon: f64) -> Result<LocalTimeEstimate> {
    let kernel = OccupationKernel::new(&path.grid, z, &[epsilon])?;
    Ok(LocalTimeEstimate {
        value: kernel.evaluate(&path.values)[0],
        epsilon,
        z,
        grid_size: path.grid.len(),
        process: None,
    })
}

/// Evaluates `V_eps` for a whole bandwidth schedule in one pass over a path.
///
/// When a bandwidth is exactly half of the previous one the Gaussian factor
/// is the square of the previous factor, which saves the exponential.
#[derive(Debug, Clone)]
pub struct OccupationKernel {
    weights: Vec<f64>,
    schedule: Vec<f64>,
    halves_previous: Vec<bool>,
    z: f64,
}

impl OccupationKernel {
    pub fn new(grid: &SpatialGrid, z: f64, schedule: &[f64]) -> Result<Self> {
        if schedule.is_empty() {
            return Err(Error::Config("empty bandwidth schedule".into()));
        }
        for &e in schedule {
            check_bandwidth(grid, e)?;
        }
        let halves_previous = (0..schedule.len())
            .map(|i| i > 0 && schedule[i] * 2.0 == schedule[i - 1])
            .collect();
        Ok(Self {
            weights: grid.trapezoid_weights(),
            schedule: schedule.to_vec(),
            halves_previous,
            z,
        })
    }

    pub fn schedule(&self) -> &[f64] {
        &self.schedule
    }

    pub fn evaluate(&self, values: &[f64]) -> Vec<f64> {
        let m = self.schedule.len();
        let inv: Vec<f64> = self.schedule.iter().map(|e| 0.5 / e).collect();
        let cutoff = 745.0 / inv.iter().copied().fold(f64::INFINITY, f64::min);
        let mut acc = vec![0.0; m];
        for (&w, &y) in self.weights.iter().zip(values) {
            let d = (y - self.z) * (y - self.z);
            if d > cutoff {
                continue;
            }
            let mut g = 0.0;
            for j in 0..m {
                g = if self.halves_previous[j] {
                    g * g
                } else {
                    (-d * inv[j]).exp()
                };
                acc[j] += w * g;
            }
        }
        acc.iter()
            .zip(&self.schedule)
            .map(|(a, e)| a / (2.0 * PI * e).sqrt())
            .collect()
    }
}

/// `int p_{sigma^2(s) + eps}(z) ds` over the process interval: the exact
/// mean of the smoothed occupation functional (the local-time mean at
/// `eps = 0`).
pub fn expected_smoothed_local_time(spec: &ProcessSpec, z: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon >= 0.0) {
        return Err(Error::BandwidthTooSmall { epsilon, floor: 0.0 });
    }
    let (a, b) = spec.interval;
    let tol = Tolerance::new(1e-13, 1e-11);
    let f = |s: f64| {
        let v = spec.marginal_variance(s) + epsilon;
        if v <= 0.0 {
            return 0.0;
        }
        (-z * z / (2.0 * v)).exp() / (2.0 * PI * v).sqrt()
    };
    Ok(adaptive_endpoint_singular(f, a, b, tol)?.value)
}

/// `E V_eps1 V_eps2 = int int phi_{Sigma(v1,v2) + diag(eps1, eps2)}(z, z)`
/// over `interval^2`, integrated with a break on the diagonal.
pub fn second_moment_via_density(
    spec: &ProcessSpec,
    z: f64,
    eps1: f64,
    eps2: f64,
    interval: (f64, f64),
) -> Result<f64> {
    let (a, b) = interval;
    if !(b > a) {
        return Ok(0.0);
    }
    if a < spec.interval.0 || b > spec.interval.1 {
        return Err(Error::InvalidGrid(format!("{interval:?} outside {:?}", spec.interval)));
    }
    let inner_tol = Tolerance::new(1e-14, 1e-11);
    let outer_tol = Tolerance::new(1e-12, 1e-9);
    let mut failure: Option<Error> = None;
    let outer = adaptive(
        |v1| {
            if failure.is_some() {
                return 0.0;
            }
            let c11 = spec.marginal_variance(v1) + eps1;
            let inner = adaptive_with_breaks(
                |v2| {
                    let c22 = spec.marginal_variance(v2) + eps2;
                    let c12 = spec.covariance(v1, v2);
                    let det = c11 * c22 - c12 * c12;
                    if !(det >= 1e-14) {
                        failure.get_or_insert(Error::SingularCovariance { det, v1, v2 });
                        return 0.0;
                    }
                    let q = z * z * (c11 + c22 - 2.0 * c12) / det;
                    (-0.5 * q).exp() / (2.0 * PI * det.sqrt())
                },
                a,
                b,
                &[v1],
                inner_tol,
            );
            match inner {
                Ok(e) => e.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        a,
        b,
        outer_tol,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(outer?.value)
}

/// `E (l^w~)^k = 2^{k/2} Gamma(k/2 + 1)` for the bridge local time at zero.
pub fn bridge_moment_exact(k: usize) -> Result<f64> {
    if !(1..=12).contains(&k) {
        return Err(Error::OrderOutOfRange(k));
    }
    let h = k as f64 / 2.0;
    Ok(2f64.powf(h) * gamma(h + 1.0))
}

/// Joint density of Brownian local time at zero up to time 1 and `w(1)`:
/// `(2 pi)^{-1/2} (|b| + a) exp(-(|b| + a)^2 / 2)`.
pub fn levy_joint_density(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) {
        return Err(Error::NonPositiveA(a));
    }
    let s = b.abs() + a;
    Ok(s * (-0.5 * s * s).exp() / (2.0 * PI).sqrt())
}

/// `int_0^inf int_R p(a, b) db da`.
pub fn levy_density_mass() -> Result<f64> {
    let tol = Tolerance::new(1e-14, 1e-12);
    let mut failure = None;
    let outer = adaptive_semi_infinite(
        |a| {
            if a <= 0.0 {
                return 0.0;
            }
            let half = adaptive_semi_infinite(|b| levy_joint_density(a, b).unwrap_or(0.0), 0.0, tol);
            match half {
                Ok(e) => 2.0 * e.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        tol,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(outer.value)
}

/// `E((l^w)^k | w(1) = 0) = int y^k p(y, 0) dy / int p(y, 0) dy`.
pub fn conditional_moment(k: usize) -> Result<f64> {
    if !(1..=12).contains(&k) {
        return Err(Error::OrderOutOfRange(k));
    }
    let tol = Tolerance::new(1e-15, 1e-12);
    let weight = |y: f64| {
        if y > 0.0 {
            levy_joint_density(y, 0.0).unwrap_or(0.0)
        } else {
            0.0
        }
    };
    let num = adaptive_semi_infinite(|y| y.powi(k as i32) * weight(y), 0.0, tol)?;
    let den = adaptive_semi_infinite(weight, 0.0, tol)?;
    Ok(num.value / den.value)
}

/// MC moment rescaled by the smoothing bias of the mean:
/// `m_k / (E V_eps / E l)^k` for the bridge at level zero.
pub fn bias_normalized_moment(k: usize, mc_moment: f64, epsilon: f64) -> Result<f64> {
    let ratio = expected_smoothed_local_time(&ProcessSpec::bridge(), 0.0, epsilon)? / bridge_moment_exact(1)?;
    Ok(mc_moment / ratio.powi(k as i32))
}

/// Monte Carlo statistics of `V_eps` along a bandwidth schedule, all
/// bandwidths evaluated on the same paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleStatistics {
    pub process: ProcessSpec,
    pub grid_points: usize,
    pub z: f64,
    pub schedule: Vec<f64>,
    pub replicates: u64,
    pub mean: Vec<f64>,
    pub mean_se: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub second_moment_se: Vec<f64>,
    /// `E (V_{eps_i} - V_{eps_{i+1}})^2`.
    pub gaps: Vec<f64>,
    pub gaps_se: Vec<f64>,
    /// `E V^k`, `k = 1..=4`, per bandwidth.
    pub raw_moments: Vec<[f64; 4]>,
}

pub fn run_schedule(
    spec: &ProcessSpec,
    grid_points: usize,
    z: f64,
    schedule: &[f64],
    plan: &McPlan,
) -> Result<ScheduleStatistics> {
    let sampler = PathSampler::uniform(*spec, grid_points)?;
    let kernel = OccupationKernel::new(sampler.grid(), z, schedule)?;
    let m = schedule.len();
    let summary = run_replicates(plan, |seed| {
        let path = sampler.sample(seed)?;
        let v = kernel.evaluate(&path);
        let mut out = Vec::with_capacity(3 * m);
        out.extend_from_slice(&v);
        out.extend(v.iter().map(|x| x * x));
        out.extend(v.windows(2).map(|w| (w[0] - w[1]) * (w[0] - w[1])));
        Ok(out)
    })?;
    Ok(ScheduleStatistics {
        process: *spec,
        grid_points,
        z,
        schedule: schedule.to_vec(),
        replicates: summary.replicates,
        mean: summary.mean[..m].to_vec(),
        mean_se: summary.standard_error[..m].to_vec(),
        second_moment: summary.mean[m..2 * m].to_vec(),
        second_moment_se: summary.standard_error[m..2 * m].to_vec(),
        gaps: summary.mean[2 * m..].to_vec(),
        gaps_se: summary.standard_error[2 * m..].to_vec(),
        raw_moments: summary.raw_moments[..m].to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyDiagnostic {
    pub epsilon_pairs: Vec<(f64, f64)>,
    pub second_moment_gaps: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub replicates: u64,
}

impl CauchyDiagnostic {
    pub fn from_statistics(stats: &ScheduleStatistics) -> Self {
        Self {
            epsilon_pairs: stats.schedule.windows(2).map(|w| (w[0], w[1])).collect(),
            second_moment_gaps: stats.gaps.clone(),
            standard_errors: stats.gaps_se.clone(),
            replicates: stats.replicates,
        }
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.second_moment_gaps.windows(2).all(|w| w[1] < w[0])
    }
}

/// Paired estimates of `E (V_{eps_i} - V_{eps_{i+1}})^2` on identical paths.
pub fn cauchy_diagnostic(
    spec: &ProcessSpec,
    grid_points: usize,
    z: f64,
    schedule: &[f64],
    plan: &McPlan,
) -> Result<CauchyDiagnostic> {
    if schedule.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::Config("bandwidth schedule must be non-increasing".into()));
    }
    Ok(CauchyDiagnostic::from_statistics(&run_schedule(
        spec,
        grid_points,
        z,
        schedule,
        plan,
    )?))
}

/// Smoothed local time at zero of Brownian motion on `[0, 1]` conditioned
/// on `|w(1)| < window`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyConditional {
    pub epsilon: f64,
    pub window: f64,
    pub replicates: u64,
    pub mean: f64,
    pub standard_error: f64,
    /// Fraction of endpoint draws inside the window.
    pub acceptance: f64,
}

/// The endpoint is drawn first and rejected outside the window; the path is
/// then `bridge(t) + t w(1)`, which has the law of Brownian motion given `w(1)`.
pub fn levy_conditional_mc(grid_points: usize, epsilon: f64, window: f64, plan: &McPlan) -> Result<LevyConditional> {
    let grid = SpatialGrid::uniform(0.0, 1.0, grid_points)?;
    let kernel = OccupationKernel::new(&grid, 0.0, &[epsilon])?;
    let summary = run_replicates(plan, |seed| {
        let mut rng = seed.rng();
        let mut draws = 0u64;
        let w1 = loop {
            let mut one = [0.0];
            fill_standard_normal(&mut rng, &mut one);
            draws += 1;
            if one[0].abs() < window {
                break one[0];
            }
        };
        let mut z = vec![0.0; grid.len()];
        fill_standard_normal(&mut rng, &mut z);
        let mut path = brownian_bridge_from_normals(grid.points(), &z);
        for (x, t) in path.iter_mut().zip(grid.points()) {
            *x += t * w1;
        }
        Ok(vec![kernel.evaluate(&path)[0], draws as f64])
    })?;
    Ok(LevyConditional {
        epsilon,
        window,
        replicates: summary.replicates,
        mean: summary.mean[0],
        standard_error: summary.standard_error[0],
        acceptance: 1.0 / summary.mean[1],
    })
}

/// Mean and variance of `w(1)` from full Brownian paths built by cumulative
/// increments, with standard errors.
pub fn motion_endpoint_moments(grid_points: usize, plan: &McPlan) -> Result<([f64; 2], [f64; 2])> {
    let grid = SpatialGrid::uniform(0.0, 1.0, grid_points)?;
    let summary = run_replicates(plan, |seed| {
        let mut z = vec![0.0; grid.len()];
        fill_standard_normal(&mut seed.rng(), &mut z);
        let w = brownian_motion_from_normals(grid.points(), &z);
        let end = w[w.len() - 1];
        Ok(vec![end, end * end])
    })?;
    Ok((
        [summary.mean[0], summary.mean[1]],
        [summary.standard_error[0], summary.standard_error[1]],
    ))
}

/// One smoothed local time from a single sampled path (CLI `localtime`).
pub fn sample_local_time(sampler: &PathSampler, z: f64, epsilon: f64, seed: SeedSpec) -> Result<LocalTimeEstimate> {
    let path = PathSample::new(sampler.grid().clone(), sampler.sample(seed)?)?;
    Ok(smoothed_occupation(&path, z, epsilon)?.with_process(sampler.spec().kind))
}
