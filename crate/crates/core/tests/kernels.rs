mod common;

use common::{permute_nodes, random_constituent_graph};
use hetlink_core::hetgraph::HeteroGraph;
use hetlink_core::kernels::{gram_matrix, prepare_graphs, KernelConfig, KernelKind, Labelling};
use hetlink_core::rng;
use proptest::prelude::*;
use rand::seq::SliceRandom;

#[test]
fn gram_matrices_are_valid_kernels() {
    let o = common::criteria::kernel_validity();
    assert!(o.pass, "{}", o.detail);
}

fn sample(n: usize, seed: u64) -> Vec<(String, HeteroGraph)> {
    let mut r = rng::stream(seed, &[]);
    (0..n)
        .map(|i| (format!("g{i}"), random_constituent_graph(&mut r, i)))
        .collect()
}

fn raw(kind: KernelKind) -> KernelConfig {
    KernelConfig {
        kind,
        labelling: Labelling::Coarse,
        normalize: false,
        ..KernelConfig::default()
    }
}

fn label_pairs(g: &HeteroGraph, h: &HeteroGraph) -> (f64, f64) {
    let (mut same, mut diff) = (0.0, 0.0);
    for u in g.node_ids() {
        for v in h.node_ids() {
            if g.label_of(u) == h.label_of(v) {
                same += 1.0;
            } else {
                diff += 1.0;
            }
        }
    }
    (same, diff)
}

#[test]
fn histogram_kernel_counts_same_label_pairs() {
    let graphs = sample(12, 21);
    let kg = prepare_graphs(&graphs, Labelling::Coarse, None);
    let gram = gram_matrix(&kg, &kg, &raw(KernelKind::VertexLabelHistogram)).unwrap();
    for (i, (_, g)) in graphs.iter().enumerate() {
        for (j, (_, h)) in graphs.iter().enumerate() {
            assert_eq!(gram.get(i, j), label_pairs(g, h).0);
        }
    }
}

#[test]
fn node_pairs_kernel_is_rbf_on_one_hot_labels() {
    let graphs = sample(12, 22);
    let config = KernelConfig {
        rbf_sigma: 0.8,
        ..raw(KernelKind::NodePairsRbf)
    };
    let kg = prepare_graphs(&graphs, Labelling::Coarse, None);
    let gram = gram_matrix(&kg, &kg, &config).unwrap();
    // one-hot vectors of different labels are sqrt(2) apart
    let off = (-2.0f64 / (2.0 * 0.8 * 0.8)).exp();
    for (i, (_, g)) in graphs.iter().enumerate() {
        for (j, (_, h)) in graphs.iter().enumerate() {
            let (same, diff) = label_pairs(g, h);
            assert!((gram.get(i, j) - (same + diff * off)).abs() < 1e-12);
        }
    }
}

#[test]
fn propagation_tells_apart_graphs_the_histogram_cannot() {
    use hetlink_core::hetgraph::GraphBuilder;
    // same label counts, paths A-A-B-B and A-B-A-B
    let build = |pairs: &[(usize, usize)]| {
        let mut b = GraphBuilder::new();
        let ids: Vec<_> = ["A", "A", "B", "B"]
            .iter()
            .enumerate()
            .map(|(i, l)| b.add_node(l, None, format!("{i}")).unwrap())
            .collect();
        for &(u, v) in pairs {
            b.add_edge(ids[u], ids[v], "e", None).unwrap();
        }
        b.freeze()
    };
    let graphs = vec![
        ("x".to_string(), build(&[(0, 1), (1, 2), (2, 3)])),
        ("y".to_string(), build(&[(0, 2), (2, 1), (1, 3)])),
    ];
    let kg = prepare_graphs(&graphs, Labelling::Coarse, None);
    let normalized = |kind| {
        let c = KernelConfig {
            normalize: true,
            ..raw(kind)
        };
        gram_matrix(&kg, &kg, &c).unwrap().get(0, 1)
    };
    assert_eq!(normalized(KernelKind::VertexLabelHistogram), 1.0);
    assert!(normalized(KernelKind::Propagation) < 1.0 - 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn kernels_ignore_node_order(seed in any::<u64>(), kind_ix in 0usize..3) {
        let kind = KernelKind::ALL[kind_ix];
        let graphs = sample(6, seed);
        let mut r = rng::stream(seed, &[1]);
        let permuted: Vec<(String, HeteroGraph)> = graphs
            .iter()
            .map(|(id, g)| {
                let mut perm: Vec<usize> = (0..g.node_count()).collect();
                perm.shuffle(&mut r);
                (id.clone(), permute_nodes(g, &perm))
            })
            .collect();
        let config = KernelConfig { kind, ..KernelConfig::default() };
        let a = gram_matrix(&prepare_graphs(&graphs, Labelling::Fine, None), &prepare_graphs(&graphs, Labelling::Fine, None), &config).unwrap();
        let kp = prepare_graphs(&permuted, Labelling::Fine, None);
        let b = gram_matrix(&kp, &kp, &config).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }
}
