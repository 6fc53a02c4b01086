//! Smoothed local time of the Brownian bridge at zero: Monte Carlo mean and
//! second moment against quadrature, and the moments after dividing out
//! the smoothing bias of the mean.
//!
//! `cargo run --release --example bridge_local_time -- 20000`

use shelt::local_time::{
    bias_normalized_moment, bridge_moment_exact, expected_smoothed_local_time, run_schedule, second_moment_via_density,
};
use shelt::mc::McPlan;
use shelt::process::ProcessSpec;

fn main() -> shelt::error::Result<()> {
    let reps = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5000);
    let spec = ProcessSpec::bridge();
    let schedule = [0.08, 0.04, 0.02, 0.01, 0.005];
    let stats = run_schedule(&spec, 8192, 0.0, &schedule, &McPlan::new(reps, 42, 0))?;
    println!("{reps} bridge paths on 8192 points");
    println!(
        "{:>6} {:>18} {:>9} {:>18} {:>9} {:>8} {:>8}",
        "eps", "E V (mc)", "exact", "E V^2 (mc)", "exact", "k1 norm", "k2 norm"
    );
    for (i, &e) in schedule.iter().enumerate() {
        println!(
            "{e:>6} {:>9.5} +- {:.4} {:>9.5} {:>9.5} +- {:.4} {:>9.5} {:>8.4} {:>8.4}",
            stats.mean[i],
            stats.mean_se[i],
            expected_smoothed_local_time(&spec, 0.0, e)?,
            stats.second_moment[i],
            stats.second_moment_se[i],
            second_moment_via_density(&spec, 0.0, e, e, spec.interval)?,
            bias_normalized_moment(1, stats.raw_moments[i][0], e)?,
            bias_normalized_moment(2, stats.raw_moments[i][1], e)?,
        );
    }
    println!(
        "limits: E l = {:.5}, E l^2 = {:.5}",
        bridge_moment_exact(1)?,
        bridge_moment_exact(2)?
    );
    Ok(())
}
