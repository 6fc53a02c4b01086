//! The quadratic form Q(f) of a step function against its two bounds, and
//! the smallest eigenvalue of Q on a uniform partition.

use shelt::grid::SpatialGrid;
use shelt::spectral::{
    critical_length, quadratic_form, quadratic_form_heat_covariance, quadratic_form_spectral, smallest_form_eigenvalue,
    StepFunction,
};

fn main() -> shelt::error::Result<()> {
    let fs = [
        StepFunction::indicator(0.0, 1.0)?,
        StepFunction::new(vec![0.0, 0.5, 1.0, 3.0], vec![1.0, -2.0, 0.5])?,
        StepFunction::indicator(0.0, 5.0)?,
    ];
    for f in &fs {
        let l = f.support_length();
        let lower = (1.0 - l / critical_length()).max(0.0) * f.norm_sq();
        println!(
            "L = {l:.2}: {lower:.6} <= Q = {:.6} <= {:.6}   (covariance route {:.6}, spectral {:.6})",
            quadratic_form(f),
            f.norm_sq(),
            quadratic_form_heat_covariance(f),
            quadratic_form_spectral(f)
        );
    }

    println!("\nfloor 1 - 1/(2 sqrt pi) = {:.6}", 1.0 - 1.0 / critical_length());
    for m in [4, 16, 64] {
        let grid = SpatialGrid::uniform(0.0, 1.0, m + 1)?;
        println!("m = {m:>3}: lambda_min = {:.6}", smallest_form_eigenvalue(&grid)?);
    }
    Ok(())
}
