//! Independent oracles and random instance generators shared by the
//! integration suites.

#![allow(dead_code)]

use std::collections::BTreeSet;

use hetlink_core::hetgraph::{GraphBuilder, HeteroGraph, NodeId};
use hetlink_core::rng::Rng;
use hetlink_core::sage::SageParams;
use rand::Rng as _;

/// AUC by counting concordant positive/negative pairs, ties worth one half.
pub fn brute_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let mut num = 0.0;
    let mut pairs = 0.0;
    for (i, &si) in scores.iter().enumerate() {
        if labels[i] != 1 {
            continue;
        }
        for (j, &sj) in scores.iter().enumerate() {
            if labels[j] != 0 {
                continue;
            }
            pairs += 1.0;
            if si > sj {
                num += 1.0;
            } else if si == sj {
                num += 0.5;
            }
        }
    }
    num / pairs
}

/// `|a − b| / max(|a|, |b|, floor)`.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

/// Largest relative error between `analytic` and central differences of
/// `f` around `x`.
pub fn fd_max_rel_err(
    x: &[f64],
    analytic: &[f64],
    step: f64,
    floor: f64,
    mut f: impl FnMut(&[f64]) -> f64,
) -> f64 {
    let mut worst = 0.0f64;
    let mut y = x.to_vec();
    for i in 0..x.len() {
        y[i] = x[i] + step;
        let up = f(&y);
        y[i] = x[i] - step;
        let down = f(&y);
        y[i] = x[i];
        let numeric = (up - down) / (2.0 * step);
        worst = worst.max(rel_err(analytic[i], numeric, floor));
    }
    worst
}

pub const SAGE_LABELS: [&str; 3] = ["A", "B", "C"];
pub const SAGE_DIMS: [usize; 3] = [2, 3, 1];

/// Random attributed graph on at most `max_nodes` nodes with labels A/B/C.
/// Parallel edges and self-loops are allowed.
pub fn random_attributed_graph(r: &mut Rng, max_nodes: usize) -> HeteroGraph {
    let n = r.random_range(2..=max_nodes);
    let mut b = GraphBuilder::new();
    let ids: Vec<NodeId> = (0..n)
        .map(|i| {
            let l = r.random_range(0..SAGE_LABELS.len());
            let attrs: Vec<f64> = (0..SAGE_DIMS[l])
                .map(|_| r.random_range(-1.0..1.0))
                .collect();
            b.add_node(SAGE_LABELS[l], Some(attrs), format!("v{i}"))
                .unwrap()
        })
        .collect();
    let m = r.random_range(1..=2 * n);
    for _ in 0..m {
        let u = ids[r.random_range(0..n)];
        let v = ids[r.random_range(0..n)];
        b.add_edge(u, v, "e", None).unwrap();
    }
    b.freeze()
}

/// Full-graph forward pass written straight from the layer recurrence:
/// every node is updated at every layer from the complete neighbourhood of
/// each relation, then rectified and L2-normalised.
pub fn brute_force_forward(g: &HeteroGraph, params: &SageParams) -> Vec<Vec<f64>> {
    let n = g.node_count();
    let label_index = |v: usize| -> usize {
        let name = g.label_of(NodeId(v));
        params.labels.iter().position(|l| l == name).unwrap()
    };
    let neighbours = |v: usize, label: usize| -> Vec<usize> {
        let mut s = BTreeSet::new();
        for e in g.edges() {
            let (a, b) = (e.u.0, e.v.0);
            let other = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if other != v && label_index(other) == label {
                s.insert(other);
            }
        }
        s.into_iter().collect()
    };
    let mut h: Vec<Vec<f64>> = (0..n)
        .map(|v| g.attrs(NodeId(v)).unwrap().to_vec())
        .collect();
    for layer in 0..params.depth() {
        let out = params.layer_dims[layer];
        let mut next = Vec::with_capacity(n);
        for v in 0..n {
            let t = label_index(v);
            let rels: Vec<usize> = (0..params.relations.len())
                .filter(|&r| params.relations[r].0 == t)
                .collect();
            let mut a = vec![0.0; out];
            for &r in &rels {
                let s = params.relations[r].1;
                let nb = neighbours(v, s);
                let width = if layer == 0 {
                    params.input_dims[s]
                } else {
                    params.layer_dims[layer - 1]
                };
                let mut mean = vec![0.0; width];
                for &u in &nb {
                    for k in 0..width {
                        mean[k] += h[u][k];
                    }
                }
                if !nb.is_empty() {
                    for m in &mut mean {
                        *m /= nb.len() as f64;
                    }
                }
                let x: Vec<f64> = h[v].iter().chain(&mean).copied().collect();
                let w = params.weight(layer, r);
                for row in 0..out {
                    let mut acc = 0.0;
                    for k in 0..x.len() {
                        acc += w[row * x.len() + k] * x[k];
                    }
                    a[row] += acc / rels.len() as f64;
                }
            }
            let relu: Vec<f64> = a.iter().map(|x| x.max(0.0)).collect();
            let norm = relu.iter().map(|x| x * x).sum::<f64>().sqrt();
            next.push(if norm > 0.0 {
                relu.iter().map(|x| x / norm).collect()
            } else {
                relu
            });
        }
        h = next;
    }
    h
}

/// Random small graph in the shape of a per-trial graph: one trial node and
/// a few condition, drug and event nodes drawn from small name pools, so
/// names recur across graphs.
pub fn random_constituent_graph(r: &mut Rng, index: usize) -> HeteroGraph {
    let mut b = GraphBuilder::new();
    let trial = b
        .add_node("Clinical Trial", None, format!("NCT{index:05}"))
        .unwrap();
    let kinds = [
        ("Condition", 4),
        ("Specific Condition", 5),
        ("Drug", 4),
        ("Adverse Event", 6),
    ];
    let mut others = Vec::new();
    for (label, pool) in kinds {
        let k = r.random_range(0..=3);
        let mut names = BTreeSet::new();
        for _ in 0..k {
            names.insert(r.random_range(0..pool));
        }
        for nm in names {
            let v = b.add_node(label, None, format!("{label}{nm}")).unwrap();
            b.add_edge(trial, v, "link", None).unwrap();
            others.push(v);
        }
    }
    for _ in 0..r.random_range(0..=others.len()) {
        let a = others[r.random_range(0..others.len().max(1))];
        let c = others[r.random_range(0..others.len().max(1))];
        if a != c {
            b.add_edge(a, c, "link", None).unwrap();
        }
    }
    b.freeze()
}

/// The same graph with node ids reordered by `perm` (old id → new id).
pub fn permute_nodes(g: &HeteroGraph, perm: &[usize]) -> HeteroGraph {
    let mut inverse = vec![0; perm.len()];
    for (old, &new) in perm.iter().enumerate() {
        inverse[new] = old;
    }
    let mut b = GraphBuilder::new();
    for &old in &inverse {
        let v = NodeId(old);
        b.add_node(g.label_of(v), g.attrs(v).map(<[f64]>::to_vec), g.name_of(v))
            .unwrap();
    }
    for e in g.edges() {
        b.add_edge(
            NodeId(perm[e.u.0]),
            NodeId(perm[e.v.0]),
            g.edge_label_name(e.label),
            e.weight,
        )
        .unwrap();
    }
    b.freeze()
}

pub mod criteria;
