//! One-dimensional quadrature: composite Gauss-Legendre, adaptive
//! Gauss-Kronrod (7/15) with bisection of the worst panel, and a cosine
//! change of variables for integrands with inverse-square-root endpoint
//! singularities.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Fixed composite Gauss-Legendre rule: `[a, b]` is cut into panels no wider
/// than `panel_width`, each integrated with an `order`-point rule.
#[derive(Debug, Clone)]
pub struct CompositeGaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panel_width: f64,
}

impl CompositeGaussLegendre {
    pub fn new(order: usize, panel_width: f64) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Self {
            nodes,
            weights,
            panel_width,
        }
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let panels = ((b - a) / self.panel_width).ceil().max(1.0) as usize;
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let mid = lo + 0.5 * h;
            let mut acc = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                acc += w * f(mid + 0.5 * h * x);
            }
            total += 0.5 * h * acc;
        }
        total
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// 15-point Kronrod estimate with the embedded 7-point Gauss error.
fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut gauss = fc * WG[3];
    let mut kronrod = fc * WGK[7];
    let mut abs = kronrod.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        kronrod += WGK[j] * (f1 + f2);
        abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let result = kronrod * half;
    let asc = asc * half.abs();
    let abs = abs * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs);
    }
    (result, err)
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Tolerances and panel budget for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-10,
            max_panels: 2000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }
}

/// Globally adaptive Gauss-Kronrod integration of `f` over `[a, b]`.
///
/// `breakpoints` (inside `(a, b)`) seed the initial partition, which helps
/// when the integrand has a kink or a near-singularity at a known location.
pub fn adaptive_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    tol: Tolerance,
) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let mut cuts: Vec<f64> = breakpoints.iter().copied().filter(|x| *x > lo && *x < hi).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);

    let mut heap = BinaryHeap::new();
    let mut value = 0.0;
    let mut error = 0.0;
    for w in edges.windows(2) {
        let (v, e) = gk15(&mut f, w[0], w[1]);
        value += v;
        error += e;
        heap.push(Panel {
            a: w[0],
            b: w[1],
            value: v,
            error: e,
        });
    }
    let mut evaluations = 15 * heap.len();
    while error > tol.abs.max(tol.rel * value.abs()) {
        if heap.len() >= tol.max_panels {
            return Err(Error::Quadrature(format!(
                "panel budget {} exhausted on [{lo}, {hi}] (value {value:e}, error {error:e})",
                tol.max_panels
            )));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point.
            heap.push(Panel { error: 0.0, ..worst });
            error -= worst.error;
            continue;
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        evaluations += 30;
        value += v1 + v2 - worst.value;
        error += e1 + e2 - worst.error;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: v1,
            error: e1,
        });
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: v2,
            error: e2,
        });
    }
    // Re-sum to shed accumulated cancellation in the running total.
    let value: f64 = heap.iter().map(|p| p.value).sum();
    let error: f64 = heap.iter().map(|p| p.error).sum();
    Ok(Estimate {
        value: sign * value,
        error,
        evaluations,
    })
}

pub fn adaptive<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    adaptive_with_breaks(f, a, b, &[], tol)
}

/// Adaptive integration after the substitution `x = a + (b - a)(1 - cos t)/2`,
/// `t` in `[0, pi]`. The Jacobian `(b - a) sin(t) / 2` cancels integrable
/// singularities of order `|x - a|^{-1/2}` and `|b - x|^{-1/2}`.
pub fn adaptive_endpoint_singular<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if a == b {
        return adaptive(|_| 0.0, 0.0, 0.0, tol);
    }
    let half = 0.5 * (b - a);
    adaptive(
        |t| {
            let s = t.sin();
            if s == 0.0 {
                return 0.0;
            }
            // 1 - cos t computed as 2 sin^2(t/2) keeps precision near t = 0.
            let x = if t < 0.5 * PI {
                a + half * 2.0 * (0.5 * t).sin().powi(2)
            } else {
                b - half * 2.0 * (0.5 * (PI - t)).sin().powi(2)
            };
            f(x) * half * s
        },
        0.0,
        PI,
        tol,
    )
}

/// Integral of `f` over `[a, inf)` via `x = a + t / (1 - t)`.
pub fn adaptive_semi_infinite<F: FnMut(f64) -> f64>(mut f: F, a: f64, tol: Tolerance) -> Result<Estimate> {
    adaptive(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let one_minus = 1.0 - t;
            let x = a + t / one_minus;
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v / (one_minus * one_minus)
            }
        },
        0.0,
        1.0,
        tol,
    )
}

/// Sine integral `Si(x) = int_0^x sin(t)/t dt`.
pub fn sine_integral(x: f64) -> f64 {
    if x < 0.0 {
        return -sine_integral(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x > 64.0 {
        return PI / 2.0 - si_auxiliary_tail(x);
    }
    let rule = CompositeGaussLegendre::new(20, 1.0);
    rule.integrate(sinc, 0.0, x)
}

fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

/// `pi/2 - Si(x)` for large `x` from the asymptotic auxiliary functions
/// `f(x) cos x + g(x) sin x`.
fn si_auxiliary_tail(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut f = 0.0;
    let mut g = 0.0;
    // f ~ (1/x) sum (-1)^k (2k)! / x^{2k}, g ~ (1/x^2) sum (-1)^k (2k+1)! / x^{2k}
    let mut tf = inv;
    let mut tg = inv2;
    for k in 0..12 {
        f += tf;
        g += tg;
        let k2 = 2.0 * k as f64;
        tf *= -(k2 + 1.0) * (k2 + 2.0) * inv2;
        tg *= -(k2 + 2.0) * (k2 + 3.0) * inv2;
        if tf.abs() < 1e-18 && tg.abs() < 1e-18 {
            break;
        }
    }
    f * x.cos() + g * x.sin()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(10);
        let s: f64 = w.iter().sum();
        assert_relative_eq!(s, 2.0, epsilon = 1e-14);
        // degree 18 monomial: int_{-1}^{1} x^18 = 2/19
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(18)).sum();
        assert_relative_eq!(m, 2.0 / 19.0, epsilon = 1e-14);
    }

    #[test]
    fn adaptive_handles_smooth_and_peaked() {
        let e = adaptive(|x| (-x * x).exp(), -10.0, 10.0, Tolerance::default()).unwrap();
        assert_relative_eq!(e.value, PI.sqrt(), epsilon = 1e-12);
        let e = adaptive(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, Tolerance::default()).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert_relative_eq!(e.value, exact, max_relative = 1e-9);
    }

    #[test]
    fn endpoint_substitution_resolves_beta_half_half() {
        let e = adaptive_endpoint_singular(|v| 1.0 / (v * (1.0 - v)).sqrt(), 0.0, 1.0, Tolerance::default()).unwrap();
        assert_relative_eq!(e.value, PI, epsilon = 1e-12);
    }

    #[test]
    fn semi_infinite_gaussian_moment() {
        let e = adaptive_semi_infinite(|y| y * (-0.5 * y * y).exp(), 0.0, Tolerance::default()).unwrap();
        assert_relative_eq!(e.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn sine_integral_matches_reference_values() {
        // Abramowitz & Stegun table values.
        assert_relative_eq!(sine_integral(1.0), 0.946_083_070_367_183, epsilon = 1e-13);
        assert_relative_eq!(sine_integral(10.0), 1.658_347_594_218_874, epsilon = 1e-12);
        // both branches agree at the switch point
        let x = 64.0;
        let rule = CompositeGaussLegendre::new(20, 1.0);
        let direct = rule.integrate(sinc, 0.0, x);
        assert_relative_eq!(direct, PI / 2.0 - si_auxiliary_tail(x), epsilon = 1e-13);
    }

    #[test]
    fn reversed_bounds_flip_sign() {
        let e = adaptive(|x| x, 1.0, 0.0, Tolerance::default()).unwrap();
        assert_relative_eq!(e.value, -0.5, epsilon = 1e-14);
    }
}
