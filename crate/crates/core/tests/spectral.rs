use proptest::prelude::*;

use shelt::grid::SpatialGrid;
use shelt::heat_model::HeatCholeskySampler;
use shelt::mc::{run_replicates, McPlan};
use shelt::spectral::{
    critical_length, quadratic_form, quadratic_form_heat_covariance, quadratic_form_spectral, smallest_form_eigenvalue,
    StepFunction,
};

fn step_function() -> impl Strategy<Value = StepFunction> {
    (1usize..8)
        .prop_flat_map(|k| {
            (
                -3.0f64..3.0,
                prop::collection::vec(0.02f64..1.0, k),
                prop::collection::vec(-2.0f64..2.0, k),
            )
        })
        .prop_map(|(start, widths, coefs)| {
            let mut bp = vec![start];
            for w in widths {
                bp.push(bp[bp.len() - 1] + w);
            }
            StepFunction::new(bp, coefs).unwrap()
        })
}

#[test]
fn simulated_increments_have_variance_q() {
    let bp = vec![0.0, 0.4, 1.1, 2.0];
    let coefs = vec![1.0, -0.7, 2.0];
    let f = StepFunction::new(bp.clone(), coefs.clone()).unwrap();
    let grid = SpatialGrid::new(bp, (0.0, 2.0)).unwrap();
    let sampler = HeatCholeskySampler::new(&grid).unwrap();
    let s = run_replicates(&McPlan::new(100_000, 21, 0), |seed| {
        let x = sampler.sample(seed)?.values;
        let y: f64 = coefs.iter().enumerate().map(|(k, a)| a * (x[k + 1] - x[k])).sum();
        Ok(vec![y * y])
    })
    .unwrap();
    let q = quadratic_form(&f);
    assert!(
        (s.mean[0] - q).abs() < 4.0 * s.standard_error[0],
        "{} vs {q}",
        s.mean[0]
    );
}

#[test]
fn eigenvalue_floor_and_monotonicity() {
    let floor = 1.0 - 1.0 / critical_length();
    let mut prev = f64::INFINITY;
    for m in [4, 8, 16, 32] {
        let l = smallest_form_eigenvalue(&SpatialGrid::uniform(0.0, 1.0, m + 1).unwrap()).unwrap();
        assert!(l >= floor - 1e-10);
        assert!(l <= prev + 1e-12);
        prev = l;
    }
    let mut prev = f64::INFINITY;
    for b in [0.5, 1.0, 2.0, 3.0] {
        let l = smallest_form_eigenvalue(&SpatialGrid::uniform(0.0, b, 17).unwrap()).unwrap();
        assert!(l < prev);
        prev = l;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sandwich(f in step_function()) {
        let q = quadratic_form(&f);
        let n = f.norm_sq();
        let lower = (1.0 - f.support_length() / critical_length()).max(0.0) * n;
        prop_assert!(q <= n + 1e-8);
        prop_assert!(q >= lower - 1e-8);
    }

    #[test]
    fn routes_agree(f in step_function()) {
        let q = quadratic_form(&f);
        let scale = q.abs().max(1e-12);
        prop_assert!((quadratic_form_heat_covariance(&f) - q).abs() / scale < 1e-6);
        prop_assert!((quadratic_form_spectral(&f) - q).abs() / scale < 1e-6);
    }

    #[test]
    fn doubling_coefficients_quadruples_q(f in step_function()) {
        let q = quadratic_form(&f);
        let q2 = quadratic_form(&f.scaled(2.0));
        prop_assert!((q2 - 4.0 * q).abs() <= 1e-10 * q2.abs());
    }
}
