mod common;

use common::brute_auc;
use hetlink_core::learn::roc_auc;
use proptest::prelude::*;

#[test]
fn auc_matches_pair_counting() {
    let o = common::criteria::auc_oracle();
    assert!(o.pass, "{}", o.detail);
}

#[test]
fn four_point_example() {
    let roc = roc_auc(&[0.9, 0.2, 0.8, 0.3], &[1, 0, 0, 1]).unwrap();
    assert_eq!(roc.auc, 0.75);
}

#[test]
fn single_class_is_rejected() {
    assert!(roc_auc(&[0.1, 0.2], &[1, 1]).is_err());
    assert!(roc_auc(&[0.1, 0.2], &[0, 0]).is_err());
}

fn arb_instance() -> impl Strategy<Value = (Vec<f64>, Vec<u8>)> {
    (2usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(0u8..8, n),
            prop::collection::vec(0u8..2, n),
        )
            .prop_map(|(s, mut y)| {
                y[0] = 0;
                y[1] = 1;
                (s.into_iter().map(f64::from).collect(), y)
            })
    })
}

proptest! {
    #[test]
    fn auc_is_invariant_under_increasing_maps((scores, labels) in arb_instance(), scale in 0.1f64..10.0, shift in -5.0f64..5.0) {
        let a = roc_auc(&scores, &labels).unwrap().auc;
        let mapped: Vec<f64> = scores.iter().map(|s| (s * scale + shift).exp()).collect();
        prop_assert_eq!(a, roc_auc(&mapped, &labels).unwrap().auc);
        prop_assert_eq!(a, brute_auc(&scores, &labels));
    }

    #[test]
    fn negating_scores_reflects_auc((scores, labels) in arb_instance()) {
        let a = roc_auc(&scores, &labels).unwrap().auc;
        let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
        let b = roc_auc(&neg, &labels).unwrap().auc;
        prop_assert!((a + b - 1.0).abs() < 1e-12);
    }

    #[test]
    fn curve_runs_from_origin_to_corner_and_trapezoid_agrees((scores, labels) in arb_instance()) {
        let roc = roc_auc(&scores, &labels).unwrap();
        let first = roc.points.first().unwrap();
        let last = roc.points.last().unwrap();
        prop_assert_eq!((first.1, first.2), (0.0, 0.0));
        prop_assert_eq!((last.1, last.2), (1.0, 1.0));
        prop_assert!(roc.points.windows(2).all(|w| w[1].1 >= w[0].1 && w[1].2 >= w[0].2));
        prop_assert!((roc.trapezoid() - roc.auc).abs() < 1e-12);
    }
}
