//! Host-side logic behind the browser bindings.

use std::io::Cursor;
use std::path::Path;

use hetlink_core::hetgraph::{read_graph, HeteroGraph, NodeId};
use hetlink_core::ingest::{build_knowledge_graph, generate_synthetic, SynthConfig, Vocabulary};
use hetlink_core::learn::{kde, roc_auc, RocSummary};
use hetlink_core::rng;
use hetlink_core::walks::{
    default_metapaths, metapath_walk, next_step_distribution, parse_metapaths, ResolvedMetaPath,
    WalkConfig,
};
use hetlink_core::{Error, Result};

pub struct Explorer {
    pub graph: HeteroGraph,
}

impl Explorer {
    /// Knowledge graph of a small synthetic trial table.
    pub fn synthetic(n_trials: usize, n_adverse_events: usize, seed: u64) -> Result<Self> {
        let records = generate_synthetic(&SynthConfig {
            n_trials,
            n_adverse_events,
            n_conditions: 6,
            n_drugs: 5,
            seed,
            ..SynthConfig::default()
        })?;
        let graph = build_knowledge_graph(&records, &Vocabulary::from_records(&records))?;
        Ok(Self { graph })
    }

    /// Graph from the text of `nodes.tsv` and `edges.tsv`.
    pub fn from_tsv(nodes: &str, edges: &str) -> Result<Self> {
        let graph = read_graph(Cursor::new(nodes), Cursor::new(edges), Path::new("upload"))?;
        Ok(Self { graph })
    }

    pub fn metapaths() -> Vec<String> {
        default_metapaths()
            .iter()
            .map(|m| m.labels().join(","))
            .collect()
    }

    fn resolve(&self, metapath: &str) -> Result<ResolvedMetaPath> {
        let mut specs = parse_metapaths(metapath)?;
        if specs.len() != 1 {
            return Err(Error::MetaPath("expected exactly one metapath".into()));
        }
        specs.remove(0).resolve(&self.graph)
    }

    /// Nodes a walk under `metapath` may start from.
    pub fn anchors(&self, metapath: &str) -> Result<Vec<NodeId>> {
        let mp = self.resolve(metapath)?;
        Ok(self.graph.nodes_with_label(mp.anchor()))
    }

    /// Distribution of the node after `walk`, which must be non-empty.
    pub fn transitions(
        &self,
        metapath: &str,
        walk: &[NodeId],
        p: f64,
        q: f64,
    ) -> Result<Vec<(NodeId, f64)>> {
        let mp = self.resolve(metapath)?;
        let config = walk_config(p, q, walk.len() + 1, 0)?;
        let (&curr, head) = walk
            .split_last()
            .ok_or_else(|| Error::MetaPath("the walk has no start node".into()))?;
        for &v in walk {
            self.graph.check(v)?;
        }
        Ok(next_step_distribution(
            &self.graph,
            head.last().copied(),
            curr,
            mp.label_at(walk.len()),
            &config,
        ))
    }

    pub fn sample_walk(
        &self,
        metapath: &str,
        start: NodeId,
        length: usize,
        p: f64,
        q: f64,
        seed: u64,
    ) -> Result<Vec<NodeId>> {
        let mp = self.resolve(metapath)?;
        let config = walk_config(p, q, length, seed)?;
        let mut r = rng::stream(seed, &[]);
        metapath_walk(&self.graph, start, &mp, &config, &mut r)
    }
}

fn walk_config(p: f64, q: f64, walk_length: usize, seed: u64) -> Result<WalkConfig> {
    let c = WalkConfig {
        walk_length,
        walks_per_node: 1,
        p,
        q,
        seed,
    };
    c.validate()?;
    Ok(c)
}

pub fn roc(scores: &[f64], labels: &[u8]) -> Result<RocSummary> {
    roc_auc(scores, labels)
}

/// `points` evenly spaced values from `lo` to `hi` inclusive.
pub fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        n => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

pub fn density(samples: &[f64], bandwidth: Option<f64>, grid: &[f64]) -> Result<Vec<f64>> {
    kde(samples, bandwidth, grid)
}
