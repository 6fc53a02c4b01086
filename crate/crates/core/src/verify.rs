//! The claim-by-claim verification suite.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::gram::{
    bridge_moment_via_simplex, check_invertible_gram_bound, check_projection_identity, gram_det, gram_indicators,
    hadamard_bound, probe_basis_extension_ratio, simplex_partition, CellGrid, VectorFamily, PROJECTION_FLOOR,
};
use crate::grid::SpatialGrid;
use crate::heat_model::{covariance_r, covariance_r_by_isometry, simulate_via_sheet, HeatCholeskySampler, SheetConfig};
use crate::local_time::{
    bias_normalized_moment, bridge_moment_exact, conditional_moment, expected_smoothed_local_time, levy_conditional_mc,
    levy_density_mass, motion_endpoint_moments, run_schedule, second_moment_via_density, ScheduleStatistics,
};
use crate::mc::run_replicates;
use crate::process::ProcessSpec;
use crate::report::{Status, SuiteReport};
use crate::sampling::{SeedSpec, StreamRng};
use crate::spectral::{
    critical_length, quadratic_form, quadratic_form_from_covariance, smallest_form_eigenvalue, smoothed_norm_sq,
    StepFunction, INEQUALITY_SLACK,
};

const STEP_FUNCTIONS: usize = 1000;
const GRAM_INSTANCES: usize = 500;
const INDICATOR_INSTANCES: usize = 100;
const PROBE_TUPLES: usize = 200;
const CELLS: usize = 1024;
const CHOLESKY_REPLICATES: u64 = 200_000;
const SHEET_REPLICATES: u64 = 10_000;
const LEVY_MARGINAL_REPLICATES: u64 = 10_000;
const LEVY_CONDITIONAL_REPLICATES: u64 = 4_000;
const LEVY_EPSILON: f64 = 5e-4;
const LEVY_WINDOW: f64 = 0.05;

fn sweep_rng(cfg: &RunConfig, tag: &str) -> StreamRng {
    SeedSpec::new(SeedSpec::derive_master(cfg.master_seed, tag), 0).rng()
}

fn normal(rng: &mut StreamRng) -> f64 {
    rng.sample(StandardNormal)
}

fn random_vector(rng: &mut StreamRng, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| normal(rng))
}

/// Step function with 1 to 8 cells, widths on one of three scales so that
/// supports fall on both sides of `2 sqrt(pi)`.
pub fn random_step_function(rng: &mut StreamRng) -> StepFunction {
    let cells = rng.random_range(1..=8usize);
    let scale = [0.05, 0.3, 1.0][rng.random_range(0..3usize)];
    let mut u = rng.random_range(-2.0..2.0);
    let mut breakpoints = vec![u];
    for _ in 0..cells {
        u += scale * rng.random_range(0.05..1.0);
        breakpoints.push(u);
    }
    let coefficients = (0..cells).map(|_| normal(rng)).collect();
    StepFunction::new(breakpoints, coefficients).expect("increasing breakpoints")
}

fn timed(record: bool, f: impl FnOnce() -> Result<Vec<SuiteReport>>) -> Result<Vec<SuiteReport>> {
    let start = Instant::now();
    let mut reports = f()?;
    if record {
        let ms = start.elapsed().as_millis() as u64;
        for r in &mut reports {
            r.runtime_ms = ms;
        }
    }
    Ok(reports)
}

/// Replicate count for a check whose default-size run uses `at_default`
/// paths, scaled with the configured replicate count.
fn scaled_replicates(cfg: &RunConfig, at_default: u64) -> u64 {
    if cfg.replicates < 2 {
        return cfg.replicates;
    }
    let default = RunConfig::default().replicates as u128;
    ((at_default as u128 * cfg.replicates as u128 / default) as u64).max(2)
}

fn underpowered(cfg: &RunConfig) -> bool {
    cfg.replicates < 2
}

fn mark_power(r: SuiteReport, replicates: u64) -> SuiteReport {
    if replicates < 2 {
        r.with_status(Status::InsufficientPower)
    } else {
        r
    }
}

/// Integrator inequality, lower bound, convolution bound and the smallest
/// eigenvalue of the form on a 16-cell partition of `[0, 1]`.
pub fn spectral_reports(cfg: &RunConfig) -> Result<Vec<SuiteReport>> {
    let mut rng = sweep_rng(cfg, "spectral-sweep");
    let factor = if cfg.corrupt_covariance { 2.0 } else { 1.0 };
    let cov = |d: f64| factor * covariance_r(d);
    let mut worst_upper = f64::NEG_INFINITY;
    let mut worst_lower = f64::INFINITY;
    let mut worst_conv = f64::NEG_INFINITY;
    let mut route_gap = 0.0f64;
    let mut short = 0;
    for _ in 0..STEP_FUNCTIONS {
        let f = random_step_function(&mut rng);
        let norm = f.norm_sq();
        let q = quadratic_form(&f);
        let q_cov = quadratic_form_from_covariance(&f, cov);
        route_gap = route_gap.max((q - q_cov).abs());
        worst_upper = worst_upper.max(q.max(q_cov) - norm);
        let length = f.support_length();
        if length < critical_length() {
            short += 1;
            worst_lower = worst_lower.min(q - (1.0 - length / critical_length()) * norm);
        }
        worst_conv = worst_conv.max(smoothed_norm_sq(&f) - norm * length / critical_length());
    }
    let floor = 1.0 - 1.0 / critical_length();
    let lambda = smallest_form_eigenvalue(&SpatialGrid::uniform(0.0, 1.0, 17)?)?;
    Ok(vec![
        SuiteReport::upper_bound("integrator-inequality", "Theorem 2.1", worst_upper, 0.0, INEQUALITY_SLACK)
            .with_detail(format!(
                "max Q(f) - |f|^2 over {STEP_FUNCTIONS} step functions (spectral and covariance routes); route gap {route_gap:.3e}"
            )),
        SuiteReport::lower_bound("lower-bound", "Lemma 2.1", worst_lower, 0.0, INEQUALITY_SLACK)
            .with_detail(format!("min Q(f) - (1 - L/(2 sqrt pi))|f|^2 over {short} supports shorter than 2 sqrt pi")),
        SuiteReport::upper_bound("convolution-bound", "Eq. (10)", worst_conv, 0.0, INEQUALITY_SLACK)
            .with_detail("max |f*p_1|^2 - L |f|^2/(2 sqrt pi)"),
        SuiteReport::lower_bound("form-eigenvalue-floor", "Lemma 2.1", lambda, floor, INEQUALITY_SLACK)
            .with_detail("smallest Q(f)/|f|^2 over step functions on 16 cells of [0, 1]"),
    ])
}

fn random_orthonormal(rng: &mut StreamRng, dim: usize, n: usize) -> VectorFamily {
    loop {
        let fam =
            VectorFamily::with_dim(dim, (0..n).map(|_| random_vector(rng, dim)).collect()).expect("common dimension");
        if let Ok(q) = fam.orthonormalized() {
            return q;
        }
    }
}

fn projection_sweep(rng: &mut StreamRng) -> Result<SuiteReport> {
    let mut worst = 0.0f64;
    for _ in 0..GRAM_INSTANCES {
        let dim = rng.random_range(2..=8usize);
        let n = rng.random_range(1..=dim.min(5));
        let k = rng.random_range(1..=(6 - n));
        let basis = random_orthonormal(rng, dim, n);
        // Some g vectors are drawn inside span(basis) to reach the dependent case.
        let g: Vec<DVector<f64>> = (0..k)
            .map(|_| {
                if rng.random_bool(0.2) {
                    basis
                        .vectors()
                        .iter()
                        .fold(DVector::zeros(dim), |acc, e| acc + e * normal(rng))
                } else {
                    random_vector(rng, dim)
                }
            })
            .collect();
        let g = VectorFamily::with_dim(dim, g)?;
        let r = check_projection_identity(&g, &basis)?;
        let (lhs, rhs) = (r.observed[0], r.expected[0]);
        let scale = lhs.abs().max(rhs.abs()).max(PROJECTION_FLOOR * hadamard_bound(&g));
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    Ok(
        SuiteReport::upper_bound("projection-identity", "Lemma 2.2 (Gram projection)", worst, 0.0, 1e-8).with_detail(
            format!("max relative gap over {GRAM_INSTANCES} instances, dim <= 8, k + n <= 6"),
        ),
    )
}

fn invertible_sweep(rng: &mut StreamRng) -> Result<SuiteReport> {
    let mut worst = f64::INFINITY;
    let mut done = 0;
    while done < GRAM_INSTANCES {
        let dim = rng.random_range(1..=6usize);
        let n = rng.random_range(1..=dim);
        let a = DMatrix::from_fn(dim, dim, |_, _| normal(rng));
        let fam = VectorFamily::with_dim(dim, (0..n).map(|_| random_vector(rng, dim)).collect())?;
        match check_invertible_gram_bound(&a, &fam) {
            Ok(r) => {
                worst = worst.min(r.observed[0] - r.expected[0]);
                done += 1;
            }
            Err(Error::NearSingular { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(
        SuiteReport::lower_bound("invertible-gram-bound", "Theorem 2.3", worst, 0.0, 1e-10).with_detail(format!(
            "min G(Ae) - sigma_min^2n G(e) over {GRAM_INSTANCES} instances, dim <= 6"
        )),
    )
}

fn random_edges(rng: &mut StreamRng, grid: &CellGrid, k: usize) -> Vec<f64> {
    let mut idx: Vec<usize> = sample(rng, CELLS, k).into_iter().map(|i| i + 1).collect();
    idx.sort_unstable();
    idx.iter().map(|&i| grid.edges()[i]).collect()
}

fn indicator_sweep(rng: &mut StreamRng) -> Result<SuiteReport> {
    let grid = CellGrid::uniform(0.0, 1.0, CELLS)?;
    let mut worst = 0.0f64;
    for _ in 0..INDICATOR_INSTANCES {
        let k = rng.random_range(1..=6usize);
        let times = random_edges(rng, &grid, k);
        let exact = gram_indicators(&times, 0.0)?;
        let numeric = gram_det(&grid.indicator_family(&times, 0.0));
        worst = worst.max((exact - numeric).abs());
    }
    Ok(
        SuiteReport::upper_bound("gram-indicators", "Eq. (23)", worst, 0.0, 1e-6).with_detail(format!(
            "max |prod(t_i - t_(i-1)) - G(1_[0,t_i])| over {INDICATOR_INSTANCES} instances on {CELLS} cells"
        )),
    )
}

/// Haar function `f` and the orthonormalized residual of `t - 1/2`.
pub fn probe_families(grid: &CellGrid) -> Result<(VectorFamily, VectorFamily)> {
    let haar = grid.embed_cell_averages(|a, b| {
        let left = (0.5f64.min(b) - a).max(0.0);
        let right = (b - 0.5f64.max(a)).max(0.0);
        (left - right) / (b - a)
    });
    let f = VectorFamily::new(vec![haar])?.orthonormalized()?;
    let linear = grid.embed_cell_averages(|a, b| 0.5 * (a + b) - 0.5);
    let e = VectorFamily::new(vec![linear])?.project_out(&f)?.orthonormalized()?;
    Ok((f, e))
}

fn probe_sweep(rng: &mut StreamRng) -> Result<SuiteReport> {
    let grid = CellGrid::uniform(0.0, 1.0, CELLS)?;
    let (f, e) = probe_families(&grid)?;
    let mut families = Vec::with_capacity(PROBE_TUPLES);
    let mut skipped = 0;
    while families.len() < PROBE_TUPLES {
        let k = rng.random_range(1..=3usize);
        let ind = grid.indicator_family(&random_edges(rng, &grid, k), 0.0);
        if gram_det(&ind.chain(&f)?) < 1e-14 {
            skipped += 1;
            continue;
        }
        families.push(ind);
    }
    let probe = probe_basis_extension_ratio(&f, &e, &families)?;
    Ok(
        SuiteReport::lower_bound("basis-extension-probe", "Lemmas 2.3-2.4", probe.min_ratio, 1e-12, 0.0)
            .with_detail(format!(
                "min G(ind, f, e)/G(ind, f) over {PROBE_TUPLES} tuples (k <= 3), {skipped} degenerate tuples redrawn; positivity only"
            )),
    )
}

/// Projection identity, invertible-operator bound, indicator determinants,
/// basis-extension probe, simplex partition and the simplex/moment identity.
pub fn gram_reports(cfg: &RunConfig) -> Result<Vec<SuiteReport>> {
    let mut rng = sweep_rng(cfg, "gram-sweep");
    let mut out = vec![
        projection_sweep(&mut rng)?,
        invertible_sweep(&mut rng)?,
        indicator_sweep(&mut rng)?,
        probe_sweep(&mut rng)?,
    ];

    let splits = [(0.0, 0.37, 1.0), (0.2, 0.9, 1.7)];
    let mut sums = Vec::new();
    let mut wholes = Vec::new();
    for (a, s, b) in splits {
        let p = simplex_partition(a, s, b)?;
        sums.push(p.blocks.iter().sum::<f64>());
        wholes.push(p.whole);
    }
    out.push(
        SuiteReport::closeness("simplex-partition", "Eq. (21)", sums, wholes, 1e-8).with_detail(
            "I_20 + I_11 + I_02 against the whole of Delta_2(a, b) for (a, s, b) = (0, .37, 1), (.2, .9, 1.7)",
        ),
    );

    for (k, rel) in [(1usize, 1e-6), (2, 1e-4)] {
        let v = bridge_moment_via_simplex(k)?;
        let exact = bridge_moment_exact(k)?;
        out.push(
            SuiteReport::closeness(
                &format!("simplex-moment-k{k}"),
                "Eq. (23)",
                vec![v.value],
                vec![exact],
                rel * exact,
            )
            .with_detail(format!(
                "k! (2 pi)^(-k/2) D_k by iterated quadrature, error estimate {:.1e}",
                v.error
            )),
        );
    }
    let exact3 = bridge_moment_exact(3)?;
    out.push(if underpowered(cfg) {
        SuiteReport::statistical_at(
            "simplex-moment-k3",
            "Eq. (23)",
            vec![],
            vec![exact3],
            &[f64::INFINITY],
            0.0,
            1,
            3.0,
        )
    } else {
        let v = bridge_moment_via_simplex(3)?;
        SuiteReport::statistical_at(
            "simplex-moment-k3",
            "Eq. (23)",
            vec![v.value],
            vec![exact3],
            &[v.error],
            0.0,
            10_000_000,
            3.0,
        )
        .with_detail("k! (2 pi)^(-k/2) D_k by importance-sampled Monte Carlo, 1e7 points, 3 standard errors")
    });
    Ok(out)
}

/// Conditional-moment identity, Levy density mass and the Monte Carlo
/// checks of the Levy joint law.
pub fn exact_reports(cfg: &RunConfig) -> Result<Vec<SuiteReport>> {
    let mut rel = Vec::new();
    for k in 1..=12 {
        let exact = bridge_moment_exact(k)?;
        rel.push((conditional_moment(k)? - exact).abs() / exact);
    }
    let mass = levy_density_mass()?;
    let mut out = vec![
        SuiteReport::closeness(
            "conditional-moment",
            "end of proof: 2^(k/2) Gamma(k/2+1)",
            rel,
            vec![0.0; 12],
            1e-6,
        )
        .with_detail("relative error of E(l^k | w(1) = 0) for k = 1..12"),
        SuiteReport::closeness(
            "levy-normalization",
            "end of proof: joint density p(a, b)",
            vec![mass],
            vec![1.0],
            1e-8,
        ),
    ];

    let marginal_plan = cfg
        .plan()
        .tagged("levy-marginal")
        .with_replicates(scaled_replicates(cfg, LEVY_MARGINAL_REPLICATES));
    let (m, se) = motion_endpoint_moments(cfg.grid_points, &marginal_plan)?;
    out.push(
        SuiteReport::statistical(
            "levy-endpoint-marginal",
            "end of proof: joint density p(a, b)",
            m.to_vec(),
            vec![0.0, 1.0],
            &se,
            0.0,
            marginal_plan.replicates,
        )
        .with_detail("mean and second moment of w(1) from full Brownian paths"),
    );

    let floor = 4.0 / (cfg.grid_points - 1) as f64;
    let eps = LEVY_EPSILON.max(floor);
    let cond_plan = cfg
        .plan()
        .tagged("levy-conditional")
        .with_replicates(scaled_replicates(cfg, LEVY_CONDITIONAL_REPLICATES));
    let lc = levy_conditional_mc(cfg.grid_points, eps, LEVY_WINDOW, &cond_plan)?;
    let target = conditional_moment(1)?;
    let mut r = SuiteReport::closeness(
        "levy-conditional-mean",
        "end of proof: E(l^k | w(1) = 0)",
        vec![lc.mean],
        vec![target],
        0.05 * target,
    )
    .with_detail(format!(
        "E[V_eps | |w(1)| < {LEVY_WINDOW}] at eps = {eps}, acceptance {:.4}; 5% relative",
        lc.acceptance
    ));
    r.standard_error = Some(lc.standard_error);
    out.push(mark_power(r, lc.replicates));
    Ok(out)
}

/// Closed-form covariance against the isometry oracle, and the Cholesky
/// path simulator against the discretized white-noise sheet.
pub fn covariance_reports(cfg: &RunConfig) -> Result<Vec<SuiteReport>> {
    let ds: Vec<f64> = (0..20).map(|i| 0.35 * i as f64).collect();
    let closed: Vec<f64> = ds.iter().map(|&d| covariance_r(d)).collect();
    let oracle = ds
        .iter()
        .map(|&d| covariance_r_by_isometry(d))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![
        SuiteReport::closeness("covariance-closed-form", "Eq. (3)", closed, oracle, 1e-8)
            .with_detail("closed-form R(d) against 2D quadrature of the isometry, d = 0, 0.35, ..., 6.65"),
    ];

    let (u1, u2) = cfg.interval;
    let pts: Vec<f64> = [0.1, 0.25, 0.4, 0.6, 0.8, 1.0]
        .iter()
        .map(|t| u1 + t * (u2 - u1))
        .collect();
    let grid = SpatialGrid::new(pts, cfg.interval)?;
    let n = grid.len();
    let moments = move |x: &[f64]| {
        let mut o = x.to_vec();
        for i in 0..n {
            for j in i..n {
                o.push(x[i] * x[j]);
            }
        }
        o
    };
    let chol = HeatCholeskySampler::new(&grid)?;
    let chol_plan = cfg
        .plan()
        .tagged("cov-cholesky")
        .with_replicates(scaled_replicates(cfg, CHOLESKY_REPLICATES));
    let a = run_replicates(&chol_plan, |s| Ok(moments(&chol.sample(s)?.values)))?;
    let sheet_cfg = SheetConfig::default();
    let sheet_plan = cfg
        .plan()
        .tagged("cov-sheet")
        .with_replicates(scaled_replicates(cfg, SHEET_REPLICATES));
    let b = run_replicates(&sheet_plan, |s| {
        Ok(moments(&simulate_via_sheet(&grid, s, &sheet_cfg)?.values))
    })?;
    let se: Vec<f64> = a
        .standard_error
        .iter()
        .zip(&b.standard_error)
        .map(|(x, y)| (x * x + y * y).sqrt())
        .collect();
    out.push(
        SuiteReport::statistical(
            "covariance-simulators",
            "Eq. (2)",
            b.mean.clone(),
            a.mean.clone(),
            &se,
            0.0,
            a.replicates.min(b.replicates),
        )
        .with_detail(format!(
            "sheet ({} paths, delta = {:.2e}) vs Cholesky ({} paths): 6 means then 21 second moments",
            b.replicates, sheet_cfg.time_cutoff, a.replicates
        )),
    );
    Ok(out)
}

fn quadrature_means(spec: &ProcessSpec, z: f64, schedule: &[f64]) -> Result<Vec<f64>> {
    schedule
        .iter()
        .map(|&e| expected_smoothed_local_time(spec, z, e))
        .collect()
}

fn mean_report(id: &str, stats: &ScheduleStatistics) -> Result<SuiteReport> {
    let expected = quadrature_means(&stats.process, stats.z, &stats.schedule)?;
    Ok(SuiteReport::statistical(
        id,
        "Definition 1.2",
        stats.mean.clone(),
        expected,
        &stats.mean_se,
        0.0,
        stats.replicates,
    )
    .with_detail(format!(
        "{} on {:?}, {} points, eps = {:?}",
        stats.process.kind, stats.process.interval, stats.grid_points, stats.schedule
    )))
}

fn cauchy_report(id: &str, stats: &ScheduleStatistics) -> SuiteReport {
    SuiteReport::strictly_decreasing(id, "Eq. (11)", stats.gaps.clone(), &stats.gaps_se, stats.replicates)
        .with_detail(format!("E(V_eps_i - V_eps_i+1)^2 along {:?}", stats.schedule))
}

/// Mean, second moment, normalized moments and Cauchy gaps of the smoothed
/// bridge local time.
pub fn bridge_reports(cfg: &RunConfig) -> Result<Vec<SuiteReport>> {
    let spec = ProcessSpec::bridge();
    let stats = run_schedule(
        &spec,
        cfg.grid_points,
        cfg.z,
        &cfg.epsilon_schedule,
        &cfg.plan().tagged("bridge"),
    )?;
    let density = cfg
        .epsilon_schedule
        .iter()
        .map(|&e| second_moment_via_density(&spec, cfg.z, e, e, spec.interval))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![
        mean_report("smoothed-mean-bridge", &stats)?,
        SuiteReport::statistical(
            "bridge-second-moment",
            "Eqs. (12)-(15)",
            stats.second_moment.clone(),
            density,
            &stats.second_moment_se,
            0.0,
            stats.replicates,
        )
        .with_detail("E V_eps^2: Monte Carlo vs bivariate-density quadrature"),
    ];
    let last = stats.schedule.len() - 1;
    let eps = stats.schedule[last];
    for (k, rel) in [(1usize, 0.05), (2, 0.10)] {
        let id = format!("bridge-moment-k{k}-normalized");
        let anchor = "end of proof: 2^(k/2) Gamma(k/2+1)";
        let exact = bridge_moment_exact(k)?;
        if cfg.z != 0.0 {
            out.push(
                SuiteReport::closeness(&id, anchor, vec![], vec![exact], rel * exact)
                    .with_status(Status::InsufficientPower)
                    .with_detail("exact moments refer to level 0"),
            );
            continue;
        }
        let raw = stats.raw_moments[last][k - 1];
        let normalized = bias_normalized_moment(k, raw, eps)?;
        let se = if k == 1 {
            stats.mean_se[last]
        } else {
            stats.second_moment_se[last]
        };
        let mut r =
            SuiteReport::closeness(&id, anchor, vec![normalized], vec![exact], rel * exact).with_detail(format!(
                "E V_eps^{k} = {raw:.5} at eps = {eps}, divided by (E V_eps / E l)^{k}; {:.0}% relative",
                rel * 100.0
            ));
        r.standard_error = Some(se * normalized / raw);
        out.push(mark_power(r, stats.replicates));
    }
    out.push(cauchy_report("cauchy-bridge", &stats));
    Ok(out)
}

/// Mean identity and Cauchy gaps for the heat process on one interval.
pub fn heat_reports(cfg: &RunConfig, interval: (f64, f64), suffix: &str) -> Result<Vec<SuiteReport>> {
    let spec = ProcessSpec::heat(interval.0, interval.1)?;
    let stats = run_schedule(
        &spec,
        cfg.grid_points,
        cfg.z,
        &cfg.epsilon_schedule,
        &cfg.plan().tagged(&format!("heat{suffix}")),
    )?;
    Ok(vec![
        mean_report(&format!("smoothed-mean-heat{suffix}"), &stats)?,
        cauchy_report(&format!("cauchy-heat{suffix}"), &stats),
    ])
}

pub fn motion_reports(cfg: &RunConfig) -> Result<Vec<SuiteReport>> {
    let spec = ProcessSpec::motion(1.0)?;
    let stats = run_schedule(
        &spec,
        cfg.grid_points,
        cfg.z,
        &cfg.epsilon_schedule,
        &cfg.plan().tagged("motion"),
    )?;
    Ok(vec![mean_report("smoothed-mean-motion", &stats)?])
}

/// Runs every check in order. Statistical checks draw from streams derived
/// from `master_seed` and a per-check tag.
pub fn verify_all(cfg: &RunConfig) -> Result<Vec<SuiteReport>> {
    cfg.validate()?;
    let t = cfg.record_timings;
    let mut out = Vec::new();
    out.extend(timed(t, || spectral_reports(cfg))?);
    out.extend(timed(t, || gram_reports(cfg))?);
    out.extend(timed(t, || exact_reports(cfg))?);
    out.extend(timed(t, || covariance_reports(cfg))?);
    out.extend(timed(t, || bridge_reports(cfg))?);
    out.extend(timed(t, || heat_reports(cfg, cfg.interval, ""))?);
    out.extend(timed(t, || heat_reports(cfg, cfg.long_interval, "-long"))?);
    out.extend(timed(t, || motion_reports(cfg))?);
    Ok(out)
}

/// First failing report, if any.
pub fn first_failure(reports: &[SuiteReport]) -> Option<&SuiteReport> {
    reports.iter().find(|r| r.status == Status::Fail)
}
