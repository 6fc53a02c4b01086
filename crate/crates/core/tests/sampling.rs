use proptest::prelude::*;

use shelt::grid::SpatialGrid;
use shelt::mc::{run_replicates, McPlan};
use shelt::sampling::{
    bridge_covariance, motion_covariance, sample_brownian_bridge, sample_brownian_motion, CovarianceMatrix, SeedSpec,
};

fn check_covariance(sample: impl Fn(SeedSpec) -> Vec<f64> + Sync + Send, pts: &[f64], cov: fn(f64, f64) -> f64) {
    let n = pts.len();
    let s = run_replicates(&McPlan::new(40_000, 8, 0), |seed| {
        let x = sample(seed);
        let mut o = Vec::new();
        for i in 0..n {
            for j in i..n {
                o.push(x[i] * x[j]);
            }
        }
        Ok(o)
    })
    .unwrap();
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            let exact = cov(pts[i], pts[j]);
            assert!(
                (s.mean[k] - exact).abs() < 4.5 * s.standard_error[k] + 1e-12,
                "({i}, {j})"
            );
            k += 1;
        }
    }
}

#[test]
fn bridge_covariance_is_s_one_minus_t() {
    let grid = SpatialGrid::uniform(0.0, 1.0, 5).unwrap();
    let pts = grid.points().to_vec();
    check_covariance(
        |s| sample_brownian_bridge(&grid, s).unwrap().values,
        &pts,
        bridge_covariance,
    );
}

#[test]
fn motion_covariance_is_min() {
    let grid = SpatialGrid::new(vec![0.1, 0.3, 0.75, 1.0], (0.0, 1.0)).unwrap();
    let pts = grid.points().to_vec();
    check_covariance(
        |s| sample_brownian_motion(&grid, s).unwrap().values,
        &pts,
        motion_covariance,
    );
}

#[test]
fn non_psd_matrix_is_rejected() {
    let m = nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
    assert!(CovarianceMatrix::new(m).unwrap().factor().is_err());
}

proptest! {
    #[test]
    fn streams_are_reproducible(master in any::<u64>(), idx in any::<u64>()) {
        use rand::Rng;
        let a: u64 = SeedSpec::new(master, idx).rng().random();
        let b: u64 = SeedSpec::new(master, idx).rng().random();
        let c: u64 = SeedSpec::new(master, idx.wrapping_add(1)).rng().random();
        prop_assert_eq!(a, b);
        prop_assert_ne!(a, c);
    }
}
