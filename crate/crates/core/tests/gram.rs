use nalgebra::DVector;
use proptest::prelude::*;

use shelt::gram::{
    check_projection_identity, dirichlet_simplex_closed_form, dirichlet_simplex_integral, gram_det, gram_indicators,
    hadamard_bound, simplex_partition, CellGrid, VectorFamily,
};
use shelt::report::Status;

fn family(dim: usize, max_len: usize) -> impl Strategy<Value = VectorFamily> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), 1..=max_len)
        .prop_map(|rows| VectorFamily::from_rows(&rows).unwrap())
}

#[test]
fn indicator_determinant_on_fine_grid() {
    let grid = CellGrid::uniform(0.0, 2.0, 2000).unwrap();
    let times = [0.1, 0.55, 0.9, 1.6];
    let discrete = gram_det(&grid.indicator_family(&times, 0.0));
    assert!((discrete - gram_indicators(&times, 0.0).unwrap()).abs() < 1e-6);
    assert!(gram_indicators(&[0.5, 0.3], 0.0).is_err());
}

#[test]
fn simplex_low_orders_match_closed_form() {
    for k in 1..=2 {
        let v = dirichlet_simplex_integral(k).unwrap();
        assert!((v.value - dirichlet_simplex_closed_form(k)).abs() < 1e-8 * v.value);
    }
    assert!(dirichlet_simplex_integral(5).is_err());
}

#[test]
fn dependent_family_has_zero_determinant() {
    let v = DVector::from_vec(vec![1.0, 2.0, 3.0]);
    let f = VectorFamily::new(vec![v.clone(), 2.0 * v]).unwrap();
    assert!(gram_det(&f).abs() < 1e-10);
    assert!(f.orthonormalized().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn determinant_is_permutation_invariant(f in family(6, 5), seed in any::<u64>()) {
        let mut vs = f.vectors().to_vec();
        let n = vs.len();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            vs.swap(i, (s >> 33) as usize % (i + 1));
        }
        let g = VectorFamily::new(vs).unwrap();
        let (a, b) = (gram_det(&f), gram_det(&g));
        prop_assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-12));
    }

    #[test]
    fn determinant_obeys_hadamard(f in family(6, 6)) {
        let d = gram_det(&f);
        prop_assert!(d >= -1e-12);
        prop_assert!(d <= hadamard_bound(&f) * (1.0 + 1e-10));
    }

    #[test]
    fn projection_identity_holds(g in family(8, 3), b in family(8, 3)) {
        prop_assume!(gram_det(&b) > 1e-6);
        let basis = b.orthonormalized().unwrap();
        let r = check_projection_identity(&g, &basis).unwrap();
        prop_assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn partition_is_additive(a in -1.0f64..1.0, s in 0.05f64..0.95, len in 0.2f64..2.0) {
        let p = simplex_partition(a, a + s * len, a + len).unwrap();
        prop_assert!((p.blocks.iter().sum::<f64>() - p.whole).abs() < 1e-8 * p.whole);
    }
}
