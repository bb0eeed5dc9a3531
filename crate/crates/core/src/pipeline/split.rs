use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::error::{Error, Result};
use crate::hetgraph::{HeteroGraph, NodeId};
use crate::rng;

/// Held-out link-prediction split of one edge label.
///
/// Pairs are oriented `(source, target)` by the label pair of the first
/// edge of the split label, so Expresses pairs read `(trial, AE)`.
#[derive(Clone, Debug)]
pub struct EdgeSplit {
    pub edge_label: String,
    pub train_pos: Vec<(NodeId, NodeId)>,
    pub train_neg: Vec<(NodeId, NodeId)>,
    pub test_pos: Vec<(NodeId, NodeId)>,
    pub test_neg: Vec<(NodeId, NodeId)>,
    /// The original graph without the train and test positive edges.
    pub residual: HeteroGraph,
    pub seed: u64,
}

impl EdgeSplit {
    pub fn train_pairs(&self) -> (Vec<(NodeId, NodeId)>, Vec<u8>) {
        labelled(&self.train_pos, &self.train_neg)
    }

    pub fn test_pairs(&self) -> (Vec<(NodeId, NodeId)>, Vec<u8>) {
        labelled(&self.test_pos, &self.test_neg)
    }

    /// Null control: the training pairs keep their places in the split but
    /// are reassigned to positive/negative at random. Test pairs and the
    /// residual graph are untouched.
    pub fn with_shuffled_train_labels(&self, seed: u64) -> EdgeSplit {
        let mut pool: Vec<_> = self
            .train_pos
            .iter()
            .chain(&self.train_neg)
            .copied()
            .collect();
        pool.shuffle(&mut rng::stream(seed, &[0x5bff]));
        let (pos, neg) = pool.split_at(self.train_pos.len());
        EdgeSplit {
            train_pos: pos.to_vec(),
            train_neg: neg.to_vec(),
            ..self.clone()
        }
    }
}

fn labelled(
    pos: &[(NodeId, NodeId)],
    neg: &[(NodeId, NodeId)],
) -> (Vec<(NodeId, NodeId)>, Vec<u8>) {
    let pairs = pos.iter().chain(neg).copied().collect();
    let labels = std::iter::repeat_n(1, pos.len())
        .chain(std::iter::repeat_n(0, neg.len()))
        .collect();
    (pairs, labels)
}

fn round_count(frac: f64, n: usize) -> usize {
    (frac * n as f64).round() as usize
}

/// Picks `round(test_frac·E)` test and `round(train_frac·E)` train positives
/// among the `E` edges labelled `edge_label`, uniformly without replacement,
/// and as many negatives for each, sampled uniformly from non-edges between
/// the same two node labels.
pub fn split_edges(
    graph: &HeteroGraph,
    edge_label: &str,
    test_frac: f64,
    train_frac: f64,
    seed: u64,
) -> Result<EdgeSplit> {
    if !(test_frac > 0.0) || !(train_frac >= 0.0) || test_frac + train_frac > 1.0 {
        return Err(Error::config(
            "split fractions must satisfy 0 < test, 0 ≤ train, test + train ≤ 1",
        ));
    }
    let label = graph
        .edge_label_id(edge_label)
        .ok_or_else(|| Error::UnknownLabel(edge_label.to_string()))?;
    let idx: Vec<usize> = (0..graph.edge_count())
        .filter(|&i| graph.edge(i).label == label)
        .collect();
    if idx.len() < 10 {
        return Err(Error::data(format!(
            "split needs at least 10 `{edge_label}` edges, graph has {}",
            idx.len()
        )));
    }
    let first = graph.edge(idx[0]);
    let (src_label, dst_label) = (graph.label_id_of(first.u), graph.label_id_of(first.v));
    let orient = |i: usize| -> (NodeId, NodeId) {
        let e = graph.edge(i);
        if src_label == dst_label {
            (e.u.min(e.v), e.u.max(e.v))
        } else if graph.label_id_of(e.u) == src_label {
            (e.u, e.v)
        } else {
            (e.v, e.u)
        }
    };
    let positives: HashSet<(NodeId, NodeId)> = idx.iter().map(|&i| orient(i)).collect();

    let n_test = round_count(test_frac, idx.len());
    let n_train = round_count(train_frac, idx.len());
    let mut r = rng::stream(seed, &[0x5b1]);
    let mut order = idx.clone();
    order.shuffle(&mut r);
    let test_idx = &order[..n_test];
    let train_idx = &order[n_test..n_test + n_train];

    let sources = graph.nodes_with_label(src_label);
    let targets = graph.nodes_with_label(dst_label);
    let mut candidates = sources.len() * targets.len();
    if src_label == dst_label {
        candidates = sources.len() * sources.len().saturating_sub(1) / 2;
    }
    let needed = n_test + n_train;
    if candidates < positives.len() + needed {
        return Err(Error::data(format!(
            "not enough non-edges for {needed} negatives ({} candidates, {} edges)",
            candidates,
            positives.len()
        )));
    }
    let mut chosen: HashSet<(NodeId, NodeId)> = HashSet::with_capacity(needed);
    let mut negatives = Vec::with_capacity(needed);
    while negatives.len() < needed {
        let mut pair = (
            sources[r.random_range(0..sources.len())],
            targets[r.random_range(0..targets.len())],
        );
        if src_label == dst_label {
            if pair.0 == pair.1 {
                continue;
            }
            pair = (pair.0.min(pair.1), pair.0.max(pair.1));
        }
        if positives.contains(&pair) || !chosen.insert(pair) {
            continue;
        }
        negatives.push(pair);
    }

    let removed: HashSet<usize> = order[..n_test + n_train].iter().copied().collect();
    let residual = graph.filter_edges(|i, _| !removed.contains(&i));
    Ok(EdgeSplit {
        edge_label: edge_label.to_string(),
        test_pos: test_idx.iter().map(|&i| orient(i)).collect(),
        train_pos: train_idx.iter().map(|&i| orient(i)).collect(),
        test_neg: negatives[..n_test].to_vec(),
        train_neg: negatives[n_test..].to_vec(),
        residual,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hetgraph::GraphBuilder;

    /// 20 trials × 10 events with the first 100 of the 200 pairs linked.
    pub(crate) fn bipartite() -> HeteroGraph {
        let mut b = GraphBuilder::new();
        let t: Vec<_> = (0..20)
            .map(|i| b.add_node("T", None, format!("t{i}")).unwrap())
            .collect();
        let a: Vec<_> = (0..10)
            .map(|i| b.add_node("A", None, format!("a{i}")).unwrap())
            .collect();
        b.add_edge(t[0], t[1], "other", None).unwrap();
        for k in 0..100 {
            // alternate orientation to exercise the pair orientation
            if k % 2 == 0 {
                b.add_edge(t[k / 10], a[k % 10], "E", None).unwrap();
            } else {
                b.add_edge(a[k % 10], t[k / 10], "E", None).unwrap();
            }
        }
        b.freeze()
    }

    #[test]
    fn split_arithmetic_on_100_edges() {
        let g = bipartite();
        let s = split_edges(&g, "E", 0.10, 0.40, 7).unwrap();
        assert_eq!((s.test_pos.len(), s.test_neg.len()), (10, 10));
        assert_eq!((s.train_pos.len(), s.train_neg.len()), (40, 40));
        assert_eq!(s.residual.edge_count(), g.edge_count() - 50);
        for &(u, v) in s.test_pos.iter().chain(&s.train_pos) {
            assert_eq!(g.label_of(u), "T");
            assert_eq!(g.label_of(v), "A");
            assert!(!s.residual.has_edge(u, v));
        }
        for &(u, v) in s.test_neg.iter().chain(&s.train_neg) {
            assert!(!g.has_edge(u, v));
        }
        let all: HashSet<_> = s
            .test_pos
            .iter()
            .chain(&s.train_pos)
            .chain(&s.test_neg)
            .chain(&s.train_neg)
            .collect();
        assert_eq!(all.len(), 100);
    }

    #[test]
    fn deterministic_per_seed() {
        let g = bipartite();
        let a = split_edges(&g, "E", 0.1, 0.4, 3).unwrap();
        let b = split_edges(&g, "E", 0.1, 0.4, 3).unwrap();
        let c = split_edges(&g, "E", 0.1, 0.4, 4).unwrap();
        assert_eq!((&a.test_pos, &a.train_neg), (&b.test_pos, &b.train_neg));
        assert_ne!(a.test_pos, c.test_pos);
    }

    #[test]
    fn too_few_non_edges() {
        let g = bipartite();
        // 100 edges, 100 non-edges, 90 negatives needed
        assert!(split_edges(&g, "E", 0.5, 0.4, 1).is_ok());
        let mut b = g.to_builder();
        for k in 100..150 {
            b.add_edge(NodeId(k / 10), NodeId(20 + k % 10), "E", None)
                .unwrap();
        }
        assert!(split_edges(&b.freeze(), "E", 0.5, 0.4, 1).is_err());
    }

    #[test]
    fn errors() {
        let g = bipartite();
        assert!(split_edges(&g, "other", 0.1, 0.4, 1).is_err());
        assert!(split_edges(&g, "missing", 0.1, 0.4, 1).is_err());
        assert!(split_edges(&g, "E", 0.7, 0.4, 1).is_err());
    }

    #[test]
    fn shuffled_labels_keep_pairs() {
        let s = split_edges(&bipartite(), "E", 0.1, 0.4, 1).unwrap();
        let n = s.with_shuffled_train_labels(9);
        let mut before: Vec<_> = s.train_pos.iter().chain(&s.train_neg).collect();
        let mut after: Vec<_> = n.train_pos.iter().chain(&n.train_neg).collect();
        before.sort();
        after.sort();
        assert_eq!(before, after);
        assert_eq!(n.train_pos.len(), 40);
        assert_eq!(n.test_pos, s.test_pos);
    }
}
