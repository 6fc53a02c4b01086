//! The joint law of Brownian local time at zero and the endpoint: density
//! mass, exact conditional moments and a conditioned Monte Carlo estimate.

use shelt::local_time::{
    bridge_moment_exact, conditional_moment, levy_conditional_mc, levy_density_mass, levy_joint_density,
};
use shelt::mc::McPlan;

fn main() -> shelt::error::Result<()> {
    println!("mass of p(a, b) = {:.12}", levy_density_mass()?);
    println!("p(0.5, 0.2) = {:.6}", levy_joint_density(0.5, 0.2)?);
    for k in 1..=6 {
        println!(
            "k = {k}: E(l^k | w(1) = 0) = {:.8}  (2^(k/2) Gamma(k/2+1) = {:.8})",
            conditional_moment(k)?,
            bridge_moment_exact(k)?
        );
    }
    let lc = levy_conditional_mc(8192, 5e-4, 0.05, &McPlan::new(2000, 9, 0))?;
    println!(
        "\nE[V_eps | |w(1)| < {}] at eps = {}: {:.4} +- {:.4} over {} paths (acceptance {:.4})",
        lc.window, lc.epsilon, lc.mean, lc.standard_error, lc.replicates, lc.acceptance
    );
    Ok(())
}
