//! Draws one path of each process and prints a few values and the
//! empirical endpoint variance over many replicates.

use shelt::mc::{run_replicates, McPlan};
use shelt::process::{PathSampler, ProcessSpec};
use shelt::sampling::SeedSpec;

fn main() -> shelt::error::Result<()> {
    let specs = [
        ProcessSpec::heat(0.0, 2.0)?,
        ProcessSpec::bridge(),
        ProcessSpec::motion(1.0)?,
    ];
    for spec in specs {
        let sampler = PathSampler::uniform(spec, 1025)?;
        let path = sampler.sample(SeedSpec::new(7, 0))?;
        let mid = path.len() / 2;
        println!(
            "{:<6} on {:?}: x(start) = {:+.4}, x(mid) = {:+.4}, x(end) = {:+.4}",
            spec.kind.as_str(),
            spec.interval,
            path[0],
            path[mid],
            path[path.len() - 1]
        );

        let (lo, hi) = spec.interval;
        let s = 0.5 * (lo + hi);
        let mid_sampler = PathSampler::uniform(spec, 3)?;
        let summary = run_replicates(&McPlan::new(20_000, 11, 0), |seed| {
            let x = mid_sampler.sample(seed)?;
            Ok(vec![x[1] * x[1]])
        })?;
        println!(
            "       Var x({s}) = {:.4} +- {:.4}  (exact {:.4})",
            summary.mean[0],
            summary.standard_error[0],
            spec.marginal_variance(s)
        );
    }
    Ok(())
}
