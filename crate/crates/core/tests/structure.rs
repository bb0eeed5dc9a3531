mod common;

use common::criteria::expresses_graph;
use hetlink_core::ingest::labels::EXPRESSES;
use hetlink_core::pipeline::split_edges;
use proptest::prelude::*;
use std::collections::HashSet;

#[test]
fn edge_counts_and_split_arithmetic() {
    let o = common::criteria::structural();
    assert!(o.pass, "{}", o.detail);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn split_sizes_follow_the_fractions(
        n_trials in 5usize..20,
        n_events in 4usize..12,
        fill in 0.2f64..0.5,
        test_frac in 0.05f64..0.3,
        train_frac in 0.1f64..0.5,
        seed in any::<u64>(),
    ) {
        let edges = ((n_trials * n_events) as f64 * fill) as usize;
        prop_assume!(edges >= 10);
        let g = expresses_graph(n_trials, n_events, edges);
        let s = split_edges(&g, EXPRESSES, test_frac, train_frac, seed).unwrap();
        let n_test = (test_frac * edges as f64).round() as usize;
        let n_train = (train_frac * edges as f64).round() as usize;
        prop_assert_eq!(s.test_pos.len(), n_test);
        prop_assert_eq!(s.test_neg.len(), n_test);
        prop_assert_eq!(s.train_pos.len(), n_train);
        prop_assert_eq!(s.train_neg.len(), n_train);
        prop_assert_eq!(s.residual.edge_count(), g.edge_count() - n_test - n_train);

        let positives: HashSet<_> = s.test_pos.iter().chain(&s.train_pos).copied().collect();
        prop_assert_eq!(positives.len(), n_test + n_train);
        let negatives: HashSet<_> = s.test_neg.iter().chain(&s.train_neg).copied().collect();
        prop_assert_eq!(negatives.len(), n_test + n_train);
        for &(a, b) in &negatives {
            prop_assert!(!g.has_edge(a, b));
        }
        for &(a, b) in &positives {
            prop_assert!(g.has_edge(a, b) && !s.residual.has_edge(a, b));
        }
    }
}
