//! Paired second-moment gaps E(V_eps_i - V_eps_i+1)^2 along a halving
//! bandwidth schedule for the bridge and the heat process.

use shelt::local_time::cauchy_diagnostic;
use shelt::mc::McPlan;
use shelt::process::ProcessSpec;

fn main() -> shelt::error::Result<()> {
    let reps = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4000);
    let schedule = [0.08, 0.04, 0.02, 0.01, 0.005];
    for spec in [ProcessSpec::bridge(), ProcessSpec::heat(0.0, 2.0)?] {
        let d = cauchy_diagnostic(&spec, 8192, 0.0, &schedule, &McPlan::new(reps, 1, 0))?;
        println!("{} on {:?}:", spec.kind, spec.interval);
        for ((a, b), (g, se)) in d
            .epsilon_pairs
            .iter()
            .zip(d.second_moment_gaps.iter().zip(&d.standard_errors))
        {
            println!("  ({a}, {b}): {g:.5} +- {se:.5}");
        }
        println!("  strictly decreasing: {}", d.strictly_decreasing());
    }
    Ok(())
}
