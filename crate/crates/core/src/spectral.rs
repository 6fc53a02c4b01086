//! Spectral quadratic form of the increment process.
//!
//! For a step function `f = sum a_k 1_[u_k, u_{k+1}]` the variance of
//! `sum a_k (x(u_{k+1}) - x(u_k))` is
//!
//! ```text
//! Q(f) = int |f^(lambda)|^2 (1 - e^{-lambda^2}) d lambda = ||f||^2 - ||f * p_1||^2
//! ```
//!
//! with the unitary Fourier transform `f^`. `Q` is evaluated through the
//! smoothed norm (the integrand `(f * p_1)^2` is smooth with Gaussian
//! tails); the oscillatory lambda-side integral is kept as an independent
//! route for verification.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;
use crate::heat_model::{covariance_r, gaussian_density, normal_cdf};
use crate::quadrature::{sine_integral, CompositeGaussLegendre};
use crate::report::SuiteReport;

/// Slack allowed in the inequality checks.
pub const INEQUALITY_SLACK: f64 = 1e-8;

/// Window padding on each side of the support for the smoothed norm.
const SMOOTHING_PAD: f64 = 10.0;
const SMOOTHING_PANEL: f64 = 0.5;
/// Beyond this frequency `e^{-lambda^2}` is below 1e-62.
const SPECTRAL_CUTOFF: f64 = 12.0;

/// `2 sqrt(pi)`: the support length at which the lower bound degenerates.
pub fn critical_length() -> f64 {
    2.0 * PI.sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    breakpoints: Vec<f64>,
    coefficients: Vec<f64>,
}

impl StepFunction {
    pub fn new(breakpoints: Vec<f64>, coefficients: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidStepFunction("need at least two breakpoints".into()));
        }
        if coefficients.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidStepFunction(format!(
                "{} coefficients for {} breakpoints",
                coefficients.len(),
                breakpoints.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) || breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidStepFunction(
                "breakpoints must be finite and strictly increasing".into(),
            ));
        }
        if coefficients.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidStepFunction("coefficients must be finite".into()));
        }
        Ok(Self {
            breakpoints,
            coefficients,
        })
    }

    /// Indicator of `[lo, hi]`.
    pub fn indicator(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo, hi], vec![1.0])
    }

    /// Step function on a grid partition with the given cell values.
    pub fn on_grid(grid: &SpatialGrid, coefficients: Vec<f64>) -> Result<Self> {
        Self::new(grid.points().to_vec(), coefficients)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `sum a_k^2 (u_{k+1} - u_k)`, exact.
    pub fn norm_sq(&self) -> f64 {
        self.coefficients
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(a, w)| a * a * (w[1] - w[0]))
            .sum()
    }

    pub fn support_length(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1] - self.breakpoints[0]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            breakpoints: self.breakpoints.clone(),
            coefficients: self.coefficients.iter().map(|a| c * a).collect(),
        }
    }

    /// Jump sizes `c_j` with `f = sum_j c_j 1[u >= u_j]`.
    fn jumps(&self) -> Vec<f64> {
        let n = self.coefficients.len();
        let mut c = Vec::with_capacity(n + 1);
        c.push(self.coefficients[0]);
        for k in 1..n {
            c.push(self.coefficients[k] - self.coefficients[k - 1]);
        }
        c.push(-self.coefficients[n - 1]);
        c
    }

    /// `(f * p_1)(u) = sum a_k (Phi(u - u_k) - Phi(u - u_{k+1}))`.
    pub fn smoothed(&self, u: f64) -> f64 {
        self.coefficients
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(a, w)| a * cdf_difference(u - w[0], u - w[1]))
            .sum()
    }
}

/// `Phi(x) - Phi(y)` for `x >= y`, computed on the side of the smaller tail.
fn cdf_difference(x: f64, y: f64) -> f64 {
    if y > 0.0 {
        normal_cdf(-y) - normal_cdf(-x)
    } else {
        normal_cdf(x) - normal_cdf(y)
    }
}

/// `|f^(lambda)|^2` for the unitary transform `(2 pi)^{-1/2} int f e^{-i lambda u}`.
///
/// Each cell contributes `a_k e^{-i lambda m_k} Delta_k sinc(lambda Delta_k / 2)`
/// (`m_k` the cell midpoint), which is stable for small `lambda` and equals
/// the removable-singularity limit at `lambda = 0`.
pub fn fourier_sq_modulus(f: &StepFunction, lambda: f64) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (a, w) in f.coefficients.iter().zip(f.breakpoints.windows(2)) {
        let width = w[1] - w[0];
        let mid = 0.5 * (w[0] + w[1]);
        let amp = a * width * sinc(0.5 * lambda * width);
        re += amp * (lambda * mid).cos();
        im -= amp * (lambda * mid).sin();
    }
    (re * re + im * im) / (2.0 * PI)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-6 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// `||f * p_1||^2` by composite Gauss-Legendre over
/// `[u_0 - 10, u_n + 10]` with panels of width 0.5.
pub fn smoothed_norm_sq(f: &StepFunction) -> f64 {
    let rule = CompositeGaussLegendre::new(12, SMOOTHING_PANEL);
    let lo = f.breakpoints[0] - SMOOTHING_PAD;
    let hi = f.breakpoints[f.breakpoints.len() - 1] + SMOOTHING_PAD;
    rule.integrate(
        |u| {
            let g = f.smoothed(u);
            g * g
        },
        lo,
        hi,
    )
}

/// Upper bound on the mass of `(f * p_1)^2` outside the integration window:
/// with `A = sum |a_k|`, `|f * p_1(u)| <= A Phi(-d)` at distance `d` from the
/// support, and `int_10^inf Phi(-t)^2 dt <= Phi(-10) phi(10) / 100`.
pub fn smoothed_norm_tail_bound(f: &StepFunction) -> f64 {
    let a: f64 = f.coefficients.iter().map(|c| c.abs()).sum();
    2.0 * a * a * normal_cdf(-SMOOTHING_PAD) * gaussian_density(1.0, SMOOTHING_PAD) / (SMOOTHING_PAD * SMOOTHING_PAD)
}

/// `Q(f) = ||f||^2 - ||f * p_1||^2`.
pub fn quadratic_form(f: &StepFunction) -> f64 {
    (f.norm_sq() - smoothed_norm_sq(f)).max(0.0)
}

/// `int_{|lambda| > L} |f^|^2 d lambda` in closed form via the sine integral:
/// `|f^|^2 = (2 pi lambda^2)^{-1} sum_{j,k} c_j c_k cos(lambda (u_j - u_k))` and
/// `int_L^inf cos(a l)/l^2 dl = cos(a L)/L - a (pi/2 - Si(a L))`.
fn spectral_tail(f: &StepFunction, cutoff: f64) -> f64 {
    let c = f.jumps();
    let u = &f.breakpoints;
    let mut total = 0.0;
    for j in 0..c.len() {
        for k in 0..c.len() {
            let a = (u[j] - u[k]).abs();
            let t = if a == 0.0 {
                1.0 / cutoff
            } else {
                (a * cutoff).cos() / cutoff - a * (0.5 * PI - sine_integral(a * cutoff))
            };
            total += c[j] * c[k] * t;
        }
    }
    total / PI
}

fn spectral_integral(f: &StepFunction, weight: impl Fn(f64) -> f64) -> f64 {
    // Oscillation period ~ 2 pi / support; resolve it with many nodes per panel.
    let panel = (0.5 / f.support_length().max(1.0)).min(0.25);
    let rule = CompositeGaussLegendre::new(16, panel);
    let core = 2.0 * rule.integrate(|l| fourier_sq_modulus(f, l) * weight(l), 0.0, SPECTRAL_CUTOFF);
    core + spectral_tail(f, SPECTRAL_CUTOFF)
}

/// `int |f^|^2 d lambda` by frequency-side quadrature (Parseval oracle).
pub fn spectral_norm_sq(f: &StepFunction) -> f64 {
    spectral_integral(f, |_| 1.0)
}

/// `Q(f)` by frequency-side quadrature of `|f^|^2 (1 - e^{-lambda^2})`.
pub fn quadratic_form_spectral(f: &StepFunction) -> f64 {
    spectral_integral(f, |l| -(-l * l).exp_m1())
}

/// `E (sum a_k (x(u_{k+1}) - x(u_k)))^2` from a stationary covariance
/// function of the field.
pub fn quadratic_form_from_covariance(f: &StepFunction, cov: impl Fn(f64) -> f64) -> f64 {
    let u = &f.breakpoints;
    let a = &f.coefficients;
    let mut total = 0.0;
    for j in 0..a.len() {
        for k in 0..a.len() {
            let c = cov(u[j + 1] - u[k + 1]) - cov(u[j + 1] - u[k]) - cov(u[j] - u[k + 1]) + cov(u[j] - u[k]);
            total += a[j] * a[k] * c;
        }
    }
    total
}

/// [`quadratic_form_from_covariance`] with the heat covariance `R`.
pub fn quadratic_form_heat_covariance(f: &StepFunction) -> f64 {
    quadratic_form_from_covariance(f, covariance_r)
}

/// `Q(f) <= ||f||^2`: the increment process is an integrator with constant 1.
pub fn check_integrator_inequality(f: &StepFunction) -> SuiteReport {
    let q = quadratic_form(f);
    let norm = f.norm_sq();
    SuiteReport::upper_bound("integrator-inequality", "Theorem 2.1", q, norm, INEQUALITY_SLACK)
        .with_detail(format!("slack {:e}", norm - q))
}

/// `Q(f) >= (1 - L / (2 sqrt pi)) ||f||^2` for support length `L < 2 sqrt pi`.
pub fn check_lower_bound(f: &StepFunction) -> Result<SuiteReport> {
    let length = f.support_length();
    if length >= critical_length() {
        return Err(Error::SupportTooLong { length });
    }
    let bound = (1.0 - length / critical_length()) * f.norm_sq();
    Ok(SuiteReport::lower_bound(
        "lower-bound",
        "Lemma 2.1",
        quadratic_form(f),
        bound,
        INEQUALITY_SLACK,
    ))
}

/// `||f * p_1||^2 <= ||f||^2 L / (2 sqrt pi)`.
pub fn check_convolution_bound(f: &StepFunction) -> SuiteReport {
    let bound = f.norm_sq() * f.support_length() / critical_length();
    SuiteReport::upper_bound(
        "convolution-bound",
        "Eq. (10)",
        smoothed_norm_sq(f),
        bound,
        INEQUALITY_SLACK,
    )
}

/// Second antiderivative of `p_2`: `H'' = p_2`.
fn second_antiderivative_p2(x: f64) -> f64 {
    let s = std::f64::consts::SQRT_2;
    x * normal_cdf(x / s) + s * gaussian_density(1.0, x / s)
}

/// Matrix of `Q` on the cell indicators of a uniform partition:
/// `h I - K` with `K_ij = int_{cell i} int_{cell j} p_2(v - v')`.
pub fn form_gram_matrix(grid: &SpatialGrid) -> Result<DMatrix<f64>> {
    let h = grid
        .uniform_spacing()
        .ok_or_else(|| Error::InvalidGrid("partition must be uniform".into()))?;
    let m = grid.len() - 1;
    let kernel: Vec<f64> = (0..m)
        .map(|k| {
            let x = k as f64 * h;
            second_antiderivative_p2(x + h) - 2.0 * second_antiderivative_p2(x) + second_antiderivative_p2(x - h)
        })
        .collect();
    Ok(DMatrix::from_fn(m, m, |i, j| {
        let k = kernel[i.abs_diff(j)];
        if i == j {
            h - k
        } else {
            -k
        }
    }))
}

/// Smallest value of `Q(f) / ||f||^2` over step functions on the partition:
/// the smallest generalized eigenvalue of the form matrix against the mass
/// matrix `h I`.
pub fn smallest_form_eigenvalue(grid: &SpatialGrid) -> Result<f64> {
    let m = grid.len().saturating_sub(1);
    if !(1..=256).contains(&m) {
        return Err(Error::InvalidGrid(format!("partition needs 1..=256 cells, got {m}")));
    }
    let h = grid
        .uniform_spacing()
        .ok_or_else(|| Error::InvalidGrid("partition must be uniform".into()))?;
    let g = form_gram_matrix(grid)?;
    let eig = SymmetricEigen::try_new(g, 1e-15, 10_000)
        .ok_or_else(|| Error::Quadrature("symmetric eigensolver did not converge".into()))?;
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min) / h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit() -> StepFunction {
        StepFunction::indicator(0.0, 1.0).unwrap()
    }

    #[test]
    fn fourier_limits() {
        assert_relative_eq!(fourier_sq_modulus(&unit(), 0.0), 1.0 / (2.0 * PI), epsilon = 1e-16);
        assert!(fourier_sq_modulus(&unit(), 2.0 * PI) < 1e-30);
        // continuous through zero
        let near = fourier_sq_modulus(&unit(), 1e-9);
        assert_relative_eq!(near, 1.0 / (2.0 * PI), max_relative = 1e-15);
    }

    #[test]
    fn closed_form_for_unit_indicator() {
        for l in [0.3, 1.0, 4.7] {
            let exact = (1.0 - f64::cos(l)) / (PI * l * l);
            assert_relative_eq!(fourier_sq_modulus(&unit(), l), exact, max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_function() {
        let z = StepFunction::new(vec![0.0, 0.5, 1.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(quadratic_form(&z), 0.0);
        assert!(check_integrator_inequality(&z).passed());
        assert!(check_convolution_bound(&z).passed());
    }

    #[test]
    fn unit_indicator_bounds() {
        let f = unit();
        let r = check_lower_bound(&f).unwrap();
        assert!(r.passed());
        assert_relative_eq!(r.expected[0], 1.0 - 1.0 / (2.0 * PI.sqrt()), epsilon = 1e-15);
        assert!((r.expected[0] - 0.71791).abs() < 5e-6);
        let c = check_convolution_bound(&f);
        assert!(c.passed());
        assert!((c.expected[0] - 0.28209).abs() < 5e-6);
        let i = check_integrator_inequality(&f);
        assert!(i.passed());
        assert!(smoothed_norm_sq(&f) > 0.0);
    }

    #[test]
    fn long_support_is_rejected() {
        let f = StepFunction::indicator(0.0, 4.0).unwrap();
        assert!(matches!(check_lower_bound(&f), Err(Error::SupportTooLong { .. })));
    }

    #[test]
    fn tail_bound_is_negligible() {
        let f = StepFunction::new(vec![0.0, 1.0, 2.0], vec![5.0, -5.0]).unwrap();
        assert!(smoothed_norm_tail_bound(&f) < 1e-10);
    }

    #[test]
    fn invalid_step_functions() {
        assert!(StepFunction::new(vec![0.0], vec![]).is_err());
        assert!(StepFunction::new(vec![0.0, 1.0], vec![1.0, 2.0]).is_err());
        assert!(StepFunction::new(vec![1.0, 0.0], vec![1.0]).is_err());
    }

    #[test]
    fn eigenvalue_rejects_oversized_partition() {
        let g = SpatialGrid::uniform(0.0, 1.0, 300).unwrap();
        assert!(smallest_form_eigenvalue(&g).is_err());
    }
}
