//! The spatial covariance of the fixed-time heat solution: closed form
//! against the isometry integral, and the two path simulators against the
//! exact increment covariance.

use shelt::grid::SpatialGrid;
use shelt::heat_model::{
    covariance_r, covariance_r_by_isometry, increment_covariance, simulate_via_sheet, HeatCholeskySampler, SheetConfig,
};
use shelt::mc::{run_replicates, McPlan};

fn main() -> shelt::error::Result<()> {
    println!("{:>5} {:>22} {:>22}", "d", "closed form", "isometry");
    for d in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
        println!(
            "{d:>5} {:>22.15e} {:>22.15e}",
            covariance_r(d),
            covariance_r_by_isometry(d)?
        );
    }

    let grid = SpatialGrid::new(vec![0.5, 1.0, 2.0], (0.0, 2.0))?;
    let chol = HeatCholeskySampler::new(&grid)?;
    let sheet = SheetConfig::default();
    let plan = McPlan::new(4000, 3, 0);
    let second = |x: &[f64]| vec![x[0] * x[0], x[0] * x[2], x[2] * x[2]];
    let a = run_replicates(&plan, |s| Ok(second(&chol.sample(s)?.values)))?;
    let b = run_replicates(&plan.with_replicates(1000), |s| {
        Ok(second(&simulate_via_sheet(&grid, s, &sheet)?.values))
    })?;
    let exact = [
        increment_covariance(0.5, 0.5, 0.0),
        increment_covariance(0.5, 2.0, 0.0),
        increment_covariance(2.0, 2.0, 0.0),
    ];
    println!("\nincrement covariances at (0.5,0.5), (0.5,2), (2,2):");
    for (i, e) in exact.iter().enumerate() {
        println!(
            "  exact {e:.4}  cholesky {:.4} +- {:.4}  sheet {:.4} +- {:.4}",
            a.mean[i], a.standard_error[i], b.mean[i], b.standard_error[i]
        );
    }
    Ok(())
}
