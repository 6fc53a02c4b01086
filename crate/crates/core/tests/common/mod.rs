#![allow(dead_code)]

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// `R(d) = 1/2 int_0^2 p_r(d) dr`, written with `r = t^2` so the integrand
/// is smooth.
pub fn covariance_oracle(d: f64) -> f64 {
    let c = (2.0 * std::f64::consts::PI).sqrt().recip();
    simpson(
        |t| {
            if t == 0.0 {
                if d == 0.0 {
                    c
                } else {
                    0.0
                }
            } else {
                c * (-d * d / (2.0 * t * t)).exp()
            }
        },
        0.0,
        2f64.sqrt(),
        20_000,
    )
}

/// Mean of the smoothed local time at 0 for a centered process with
/// marginal variance `var(s)` on `[a, b]`.
pub fn smoothed_mean_oracle(var: impl Fn(f64) -> f64, eps: f64, a: f64, b: f64) -> f64 {
    let tau = 2.0 * std::f64::consts::PI;
    simpson(|s| (tau * (var(s) + eps)).sqrt().recip(), a, b, 400_000)
}
