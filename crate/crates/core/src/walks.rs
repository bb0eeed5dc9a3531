//! Metapath-constrained, second-order biased random walks.
//!
//! A walk starting on a node of the metapath's anchor label may only step
//! onto the label the metapath prescribes for the next position. Metapaths
//! whose last label equals the first cycle seamlessly: position `i ≥ 1` must
//! carry `labels[(i - 1) % (len - 1) + 1]`. Among conforming neighbours the
//! next node is drawn with unnormalised weight `1/p` for returning to the
//! previous node, `1` for neighbours of the previous node, and `1/q`
//! otherwise.

use std::collections::{BTreeMap, HashSet};

use rand::Rng as _;
use sha2::{Digest, Sha256};

use crate::config::{key, Configurable, KvConfig};
use crate::error::{Error, Result};
use crate::hetgraph::{HeteroGraph, LabelId, NodeId};
use crate::ingest::labels;
use crate::rng;

/// Alternative label names accepted in metapath files.
pub fn label_aliases() -> BTreeMap<&'static str, &'static str> {
    BTreeMap::from([
        ("Side Effect", labels::ADVERSE_EVENT),
        ("Disease", labels::CONDITION),
        ("Specific Disease", labels::SPECIFIC_CONDITION),
    ])
}

fn canonical(label: &str) -> String {
    label_aliases()
        .get(label)
        .map(|s| s.to_string())
        .unwrap_or_else(|| label.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetaPathSpec {
    labels: Vec<String>,
}

impl MetaPathSpec {
    /// Label aliases are resolved here.
    pub fn new<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        if labels.len() < 2 {
            return Err(Error::MetaPath(
                "a metapath needs at least two labels".into(),
            ));
        }
        Ok(Self {
            labels: labels
                .iter()
                .map(|l| canonical(l.as_ref().trim()))
                .collect(),
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn anchor(&self) -> &str {
        &self.labels[0]
    }

    /// Label required at walk position `pos` (position 0 is the anchor).
    pub fn label_at(&self, pos: usize) -> &str {
        if pos == 0 {
            &self.labels[0]
        } else {
            &self.labels[(pos - 1) % (self.labels.len() - 1) + 1]
        }
    }

    /// Checks the metapath against a graph's alphabet and schema.
    pub fn resolve(&self, g: &HeteroGraph) -> Result<ResolvedMetaPath> {
        let ids = self
            .labels
            .iter()
            .map(|l| {
                g.node_label_id(l)
                    .ok_or_else(|| Error::MetaPath(format!("label `{l}` not in graph")))
            })
            .collect::<Result<Vec<_>>>()?;
        let schema = label_schema(g);
        let n = ids.len();
        // consecutive pairs, plus the junction used when cycling
        let mut pairs: Vec<(LabelId, LabelId)> = ids.windows(2).map(|w| (w[0], w[1])).collect();
        if n > 2 {
            pairs.push((ids[n - 1], ids[1]));
        }
        for (a, b) in pairs {
            if !schema.contains(&(a, b)) {
                return Err(Error::MetaPath(format!(
                    "no edge connects `{}` and `{}`",
                    g.node_label_name(a),
                    g.node_label_name(b)
                )));
            }
        }
        Ok(ResolvedMetaPath { labels: ids })
    }
}

impl std::fmt::Display for MetaPathSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.labels.join(","))
    }
}

/// Label pairs joined by at least one edge, both orientations.
fn label_schema(g: &HeteroGraph) -> HashSet<(LabelId, LabelId)> {
    let mut s = HashSet::new();
    for e in g.edges() {
        let (a, b) = (g.label_id_of(e.u), g.label_id_of(e.v));
        s.insert((a, b));
        s.insert((b, a));
    }
    s
}

/// A metapath with labels interned against one graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolvedMetaPath {
    labels: Vec<LabelId>,
}

impl ResolvedMetaPath {
    pub fn anchor(&self) -> LabelId {
        self.labels[0]
    }

    pub fn label_at(&self, pos: usize) -> LabelId {
        if pos == 0 {
            self.labels[0]
        } else {
            self.labels[(pos - 1) % (self.labels.len() - 1) + 1]
        }
    }
}

/// Parses one metapath per line. Accepts plain `A,B,A` as well as the
/// bracketed, quoted list style (`['A','B','A'],`). `#` starts a comment.
pub fn parse_metapaths(text: &str) -> Result<Vec<MetaPathSpec>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let inner = l
                .trim_end_matches(',')
                .trim_start_matches('[')
                .trim_end_matches(']');
            let parts: Vec<&str> = inner
                .split(',')
                .map(|p| p.trim().trim_matches(|c| c == '\'' || c == '"').trim())
                .filter(|p| !p.is_empty())
                .collect();
            MetaPathSpec::new(&parts)
        })
        .collect()
}

/// The sixteen metapaths over trials, events, drugs and conditions.
pub fn default_metapaths() -> Vec<MetaPathSpec> {
    const RAW: &str = "\
Clinical Trial,Side Effect,Clinical Trial
Clinical Trial,Specific Drug,Clinical Trial
Clinical Trial,Drug,Specific Drug,Clinical Trial
Clinical Trial,Specific Drug,Drug,Clinical Trial
Clinical Trial,Specific Disease,Clinical Trial
Clinical Trial,Disease,Specific Disease,Clinical Trial
Clinical Trial,Specific Disease,Disease,Clinical Trial
Drug,Specific Drug,Drug
Specific Drug,Drug,Specific Drug
Disease,Specific Disease,Disease
Specific Disease,Disease,Specific Disease
Drug,Disease,Drug
Disease,Drug,Disease
Specific Drug,Disease,Specific Drug
Specific Disease,Drug,Specific Disease
Side Effect,Clinical Trial,Side Effect";
    parse_metapaths(RAW).expect("built-in metapaths parse")
}

#[derive(Clone, Debug, PartialEq)]
pub struct WalkConfig {
    /// Number of nodes per walk, including the start.
    pub walk_length: usize,
    pub walks_per_node: usize,
    /// Return parameter.
    pub p: f64,
    /// In-out parameter.
    pub q: f64,
    pub seed: u64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            walk_length: 200,
            walks_per_node: 1,
            p: 1.0,
            q: 1.0,
            seed: 1,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.walk_length == 0 || self.walks_per_node == 0 {
            return Err(Error::config(
                "walk length and walks per node must be positive",
            ));
        }
        if !(self.p > 0.0 && self.q > 0.0) || !self.p.is_finite() || !self.q.is_finite() {
            return Err(Error::config("walk p and q must be positive and finite"));
        }
        Ok(())
    }
}

impl Configurable for WalkConfig {
    fn apply(&mut self, cfg: &KvConfig, p: &str) -> Result<()> {
        cfg.read(&key(p, "length"), &mut self.walk_length)?;
        cfg.read(&key(p, "per_node"), &mut self.walks_per_node)?;
        cfg.read(&key(p, "p"), &mut self.p)?;
        cfg.read(&key(p, "q"), &mut self.q)?;
        cfg.read(&key(p, "seed"), &mut self.seed)?;
        self.validate()
    }

    fn echo(&self, p: &str) -> Vec<(String, String)> {
        vec![
            (key(p, "length"), self.walk_length.to_string()),
            (key(p, "per_node"), self.walks_per_node.to_string()),
            (key(p, "p"), self.p.to_string()),
            (key(p, "q"), self.q.to_string()),
            (key(p, "seed"), self.seed.to_string()),
        ]
    }
}

/// Normalised transition probabilities from `curr` onto neighbours with
/// label `allowed`. Empty when no neighbour qualifies.
pub fn next_step_distribution(
    g: &HeteroGraph,
    prev: Option<NodeId>,
    curr: NodeId,
    allowed: LabelId,
    config: &WalkConfig,
) -> Vec<(NodeId, f64)> {
    let candidates = g.distinct_neighbors_with_label(curr, allowed);
    let mut weighted: Vec<(NodeId, f64)> = candidates
        .into_iter()
        .map(|c| {
            let w = match prev {
                None => 1.0,
                Some(p) if p == c => 1.0 / config.p,
                Some(p) if g.has_edge(p, c) => 1.0,
                Some(_) => 1.0 / config.q,
            };
            (c, w)
        })
        .collect();
    let total: f64 = weighted.iter().map(|(_, w)| w).sum();
    for (_, w) in &mut weighted {
        *w /= total;
    }
    weighted
}

fn sample(dist: &[(NodeId, f64)], r: &mut rng::Rng) -> NodeId {
    let u: f64 = r.random();
    let mut acc = 0.0;
    for &(n, p) in dist {
        acc += p;
        if u < acc {
            return n;
        }
    }
    dist[dist.len() - 1].0
}

/// One walk from `start`. Stops early when no conforming neighbour exists.
pub fn metapath_walk(
    g: &HeteroGraph,
    start: NodeId,
    metapath: &ResolvedMetaPath,
    config: &WalkConfig,
    r: &mut rng::Rng,
) -> Result<Vec<NodeId>> {
    g.check(start)?;
    if g.label_id_of(start) != metapath.anchor() {
        return Err(Error::MetaPath(format!(
            "start node {start} has label `{}`, metapath anchor is `{}`",
            g.label_of(start),
            g.node_label_name(metapath.anchor())
        )));
    }
    let mut walk = Vec::with_capacity(config.walk_length);
    walk.push(start);
    let mut prev = None;
    let mut curr = start;
    for pos in 1..config.walk_length {
        let dist = next_step_distribution(g, prev, curr, metapath.label_at(pos), config);
        if dist.is_empty() {
            break;
        }
        let next = sample(&dist, r);
        walk.push(next);
        prev = Some(curr);
        curr = next;
    }
    Ok(walk)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WalkCorpus {
    pub walks: Vec<Vec<NodeId>>,
    /// Node labels along each walk.
    pub label_sequences: Vec<Vec<LabelId>>,
    /// Index of the generating metapath, per walk.
    pub metapath_index: Vec<usize>,
    /// Node count of the walked graph.
    pub num_nodes: usize,
}

impl WalkCorpus {
    pub fn len(&self) -> usize {
        self.walks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walks.is_empty()
    }

    /// One walk per line, space-separated node ids.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for w in &self.walks {
            let line: Vec<String> = w.iter().map(|n| n.0.to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str, num_nodes: usize) -> Result<Self> {
        let mut walks = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let w = line
                .split_whitespace()
                .map(|t| {
                    let id: usize = t.parse().map_err(|_| {
                        Error::data(format!("corpus line {}: bad node id `{t}`", i + 1))
                    })?;
                    if id >= num_nodes {
                        return Err(Error::NodeOutOfRange { id, len: num_nodes });
                    }
                    Ok(NodeId(id))
                })
                .collect::<Result<Vec<_>>>()?;
            walks.push(w);
        }
        Ok(Self {
            metapath_index: vec![0; walks.len()],
            label_sequences: vec![Vec::new(); walks.len()],
            walks,
            num_nodes,
        })
    }

    /// SHA-256 of [`WalkCorpus::dump`], hex encoded.
    pub fn fingerprint(&self) -> String {
        let digest = Sha256::digest(self.dump().as_bytes());
        format!("{digest:x}")
    }
}

/// Runs `walks_per_node` walks from every anchor node of every usable
/// metapath. Metapaths that do not fit the graph are skipped with a warning.
///
/// Each walk draws from its own stream keyed by (seed, metapath, start node,
/// repetition), so the corpus does not depend on scheduling.
pub fn generate_corpus(
    g: &HeteroGraph,
    metapaths: &[MetaPathSpec],
    config: &WalkConfig,
) -> Result<WalkCorpus> {
    config.validate()?;
    let mut tasks: Vec<(usize, ResolvedMetaPath, NodeId, usize)> = Vec::new();
    for (mi, mp) in metapaths.iter().enumerate() {
        let resolved = match mp.resolve(g) {
            Ok(r) => r,
            Err(e) => {
                log::warn!("skipping metapath [{mp}]: {e}");
                continue;
            }
        };
        for start in g.nodes_with_label(resolved.anchor()) {
            for rep in 0..config.walks_per_node {
                tasks.push((mi, resolved.clone(), start, rep));
            }
        }
    }

    let run = |(mi, mp, start, rep): &(usize, ResolvedMetaPath, NodeId, usize)| -> Result<(usize, Vec<NodeId>)> {
        let mut r = rng::stream(config.seed, &[*mi as u64, start.0 as u64, *rep as u64]);
        Ok((*mi, metapath_walk(g, *start, mp, config, &mut r)?))
    };
    #[cfg(feature = "parallel")]
    let results: Vec<(usize, Vec<NodeId>)> = {
        use rayon::prelude::*;
        tasks.par_iter().map(run).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<(usize, Vec<NodeId>)> = tasks.iter().map(run).collect::<Result<_>>()?;

    let mut corpus = WalkCorpus {
        num_nodes: g.node_count(),
        ..Default::default()
    };
    for (mi, w) in results {
        corpus
            .label_sequences
            .push(w.iter().map(|&n| g.label_id_of(n)).collect());
        corpus.metapath_index.push(mi);
        corpus.walks.push(w);
    }
    Ok(corpus)
}
