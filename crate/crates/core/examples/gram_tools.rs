//! Gram determinants of indicator families, the projection identity and
//! the simplex integrals behind the bridge local-time moments.

use shelt::gram::{
    bridge_moment_via_simplex, check_projection_identity, dirichlet_simplex_closed_form, gram_det, gram_indicators,
    simplex_partition, CellGrid, VectorFamily,
};
use shelt::local_time::bridge_moment_exact;

fn main() -> shelt::error::Result<()> {
    let grid = CellGrid::uniform(0.0, 1.0, 1000)?;
    let times = [0.2, 0.45, 0.9];
    let family = grid.indicator_family(&times, 0.0);
    println!("G(1[0,t1], ..., 1[0,t3]) = {:.6}", gram_det(&family));
    println!("product of gaps         = {:.6}", gram_indicators(&times, 0.0)?);

    let basis = VectorFamily::new(vec![grid.indicator(0.0, 0.3)])?.orthonormalized()?;
    let g = VectorFamily::new(vec![grid.indicator(0.1, 0.6), grid.indicator(0.5, 1.0)])?;
    let report = check_projection_identity(&g, &basis)?;
    println!("\n{}", report.summary_line());

    let p = simplex_partition(0.0, 0.37, 1.0)?;
    println!(
        "\nsimplex blocks {:?} sum {:.10}, whole {:.10}",
        p.blocks,
        p.blocks.iter().sum::<f64>(),
        p.whole
    );

    for k in 1..=3 {
        let v = bridge_moment_via_simplex(k)?;
        println!(
            "k = {k}: D_k closed form {:.6}; moment via simplex {:.6} +- {:.1e}, exact {:.6}",
            dirichlet_simplex_closed_form(k),
            v.value,
            v.error,
            bridge_moment_exact(k)?
        );
    }
    Ok(())
}
