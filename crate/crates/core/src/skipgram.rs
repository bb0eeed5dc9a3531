//! Skip-gram node embeddings trained with negative sampling, and binary
//! operators turning node vectors into edge vectors.

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::config::{key, Configurable, KvConfig};
use crate::error::{Error, Result};
use crate::hetgraph::NodeId;
use crate::rng;
use crate::walks::WalkCorpus;

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    num_nodes: usize,
    /// Node vectors, row-major `num_nodes × dim`.
    input: Vec<f64>,
    /// Context vectors, same layout.
    output: Vec<f64>,
}

impl EmbeddingTable {
    pub fn zeros(num_nodes: usize, dim: usize) -> Self {
        Self {
            dim,
            num_nodes,
            input: vec![0.0; num_nodes * dim],
            output: vec![0.0; num_nodes * dim],
        }
    }

    /// Both tables uniform in `[-0.5/dim, 0.5/dim]`.
    pub fn random(num_nodes: usize, dim: usize, seed: u64) -> Self {
        let mut r = rng::stream(seed, &[0x5eed]);
        let half = 0.5 / dim as f64;
        let mut draw =
            |n: usize| -> Vec<f64> { (0..n).map(|_| r.random_range(-half..=half)).collect() };
        let input = draw(num_nodes * dim);
        let output = draw(num_nodes * dim);
        Self {
            dim,
            num_nodes,
            input,
            output,
        }
    }

    pub fn from_rows(input: Vec<Vec<f64>>, output: Vec<Vec<f64>>) -> Result<Self> {
        let dim = input.first().map(Vec::len).unwrap_or(0);
        let num_nodes = input.len();
        if output.len() != num_nodes {
            return Err(Error::LengthMismatch(num_nodes, output.len()));
        }
        for row in input.iter().chain(&output) {
            if row.len() != dim {
                return Err(Error::LengthMismatch(dim, row.len()));
            }
        }
        Ok(Self {
            dim,
            num_nodes,
            input: input.concat(),
            output: output.concat(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    #[inline]
    pub fn vector(&self, v: NodeId) -> &[f64] {
        &self.input[v.0 * self.dim..(v.0 + 1) * self.dim]
    }

    #[inline]
    pub fn context(&self, v: NodeId) -> &[f64] {
        &self.output[v.0 * self.dim..(v.0 + 1) * self.dim]
    }

    pub fn vector_mut(&mut self, v: NodeId) -> &mut [f64] {
        &mut self.input[v.0 * self.dim..(v.0 + 1) * self.dim]
    }

    pub fn context_mut(&mut self, v: NodeId) -> &mut [f64] {
        &mut self.output[v.0 * self.dim..(v.0 + 1) * self.dim]
    }

    pub fn is_finite(&self) -> bool {
        self.input.iter().chain(&self.output).all(|x| x.is_finite())
    }

    /// Text dump of the node vectors: `header` lines as `# ` comments, then
    /// one line per node (`id v1 … vd`).
    pub fn dump(&self, header: &[(String, String)]) -> String {
        let mut s = String::new();
        s.push_str(&format!("# nodes={} dim={}\n", self.num_nodes, self.dim));
        for (k, v) in header {
            s.push_str(&format!("# {k}={v}\n"));
        }
        for i in 0..self.num_nodes {
            s.push_str(&i.to_string());
            for x in self.vector(NodeId(i)) {
                s.push(' ');
                s.push_str(&x.to_string());
            }
            s.push('\n');
        }
        s
    }

    /// Reads a dump back. Context vectors are not stored and come back zero.
    pub fn parse_dump(text: &str) -> Result<Self> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let id: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::data(format!("embedding line {}: missing node id", i + 1)))?;
            if id != rows.len() {
                return Err(Error::data(format!(
                    "embedding line {}: expected node {}",
                    i + 1,
                    rows.len()
                )));
            }
            let row = it
                .map(|t| t.parse::<f64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::data(format!("embedding line {}: {e}", i + 1)))?;
            rows.push(row);
        }
        let zeros = rows.iter().map(|r| vec![0.0; r.len()]).collect();
        Self::from_rows(rows, zeros)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkipGramConfig {
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub dim: usize,
    pub seed: u64,
    /// Exponent applied to node frequencies for the noise distribution.
    pub noise_exponent: f64,
    /// Walk shards trained independently per epoch and averaged; 1 trains
    /// serially.
    pub threads: usize,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        Self {
            window: 5,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            dim: 512,
            seed: 1,
            noise_exponent: 0.75,
            threads: 1,
        }
    }
}

impl SkipGramConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window == 0
            || self.negatives == 0
            || self.epochs == 0
            || self.dim == 0
            || self.threads == 0
        {
            return Err(Error::config(
                "skip-gram window, negatives, epochs, dim and threads must be positive",
            ));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::config("skip-gram learning rate must be positive"));
        }
        if !(0.0..=1.0).contains(&self.noise_exponent) {
            return Err(Error::config("skip-gram noise exponent must lie in [0, 1]"));
        }
        Ok(())
    }
}

impl Configurable for SkipGramConfig {
    fn apply(&mut self, cfg: &KvConfig, p: &str) -> Result<()> {
        cfg.read(&key(p, "window"), &mut self.window)?;
        cfg.read(&key(p, "negatives"), &mut self.negatives)?;
        cfg.read(&key(p, "epochs"), &mut self.epochs)?;
        cfg.read(&key(p, "learning_rate"), &mut self.learning_rate)?;
        cfg.read(&key(p, "dim"), &mut self.dim)?;
        cfg.read(&key(p, "seed"), &mut self.seed)?;
        cfg.read(&key(p, "noise_exponent"), &mut self.noise_exponent)?;
        cfg.read(&key(p, "threads"), &mut self.threads)?;
        self.validate()
    }

    fn echo(&self, p: &str) -> Vec<(String, String)> {
        vec![
            (key(p, "window"), self.window.to_string()),
            (key(p, "negatives"), self.negatives.to_string()),
            (key(p, "epochs"), self.epochs.to_string()),
            (key(p, "learning_rate"), self.learning_rate.to_string()),
            (key(p, "dim"), self.dim.to_string()),
            (key(p, "seed"), self.seed.to_string()),
            (key(p, "noise_exponent"), self.noise_exponent.to_string()),
            (key(p, "threads"), self.threads.to_string()),
        ]
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `log σ(x)` without overflow.
#[inline]
pub(crate) fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Full-softmax probability of `n` given `u` over all node vectors.
/// Quadratic in the node count; meant for small graphs and tests.
pub fn softmax_prob(u: NodeId, n: NodeId, table: &EmbeddingTable) -> f64 {
    let fu = table.vector(u);
    let scores: Vec<f64> = (0..table.num_nodes())
        .map(|v| dot(table.vector(NodeId(v)), fu))
        .collect();
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = scores.iter().map(|s| (s - max).exp()).sum();
    (scores[n.0] - max).exp() / z
}

/// Gradients of one SGNS term. Only participating rows appear.
#[derive(Clone, Debug, PartialEq)]
pub struct SgnsGrads {
    pub center: NodeId,
    pub d_center: Vec<f64>,
    /// Context-table gradients; a node drawn twice as a negative appears once
    /// with the summed gradient.
    pub d_context: Vec<(NodeId, Vec<f64>)>,
}

/// `−log σ(f(c)·f'(ctx)) − Σ log σ(−f(c)·f'(neg))` and its gradient.
pub fn sgns_loss_and_grads(
    center: NodeId,
    context: NodeId,
    negatives: &[NodeId],
    table: &EmbeddingTable,
) -> (f64, SgnsGrads) {
    let fc = table.vector(center);
    let mut d_center = vec![0.0; table.dim()];
    let mut d_context: Vec<(NodeId, Vec<f64>)> = Vec::new();
    let mut add = |node: NodeId, coef: f64, d_center: &mut [f64]| {
        let out = table.context(node);
        for (d, o) in d_center.iter_mut().zip(out) {
            *d += coef * o;
        }
        let slot = match d_context.iter().position(|(n, _)| *n == node) {
            Some(i) => i,
            None => {
                d_context.push((node, vec![0.0; fc.len()]));
                d_context.len() - 1
            }
        };
        for (d, c) in d_context[slot].1.iter_mut().zip(fc) {
            *d += coef * c;
        }
    };

    let s = dot(fc, table.context(context));
    let mut loss = -log_sigmoid(s);
    add(context, sigmoid(s) - 1.0, &mut d_center);
    for &neg in negatives {
        let s = dot(fc, table.context(neg));
        loss -= log_sigmoid(-s);
        add(neg, sigmoid(s), &mut d_center);
    }
    (
        loss,
        SgnsGrads {
            center,
            d_center,
            d_context,
        },
    )
}

/// In-place SGD step on one SGNS term; returns the loss before the step.
/// Equivalent to subtracting `lr ×` [`sgns_loss_and_grads`].
fn sgd_step(
    table: &mut EmbeddingTable,
    center: NodeId,
    context: NodeId,
    negatives: &[NodeId],
    lr: f64,
    scratch: &mut Vec<f64>,
) -> f64 {
    let dim = table.dim;
    scratch.clear();
    scratch.resize(dim, 0.0);
    let c0 = center.0 * dim;
    let mut loss = 0.0;
    // gradients are evaluated at the pre-step parameters: accumulate the
    // centre gradient first, then touch the context rows
    let mut coefs: Vec<(NodeId, f64)> = Vec::with_capacity(negatives.len() + 1);
    for (node, label) in std::iter::once((context, 1.0)).chain(negatives.iter().map(|&n| (n, 0.0)))
    {
        let o0 = node.0 * dim;
        let s = dot(&table.input[c0..c0 + dim], &table.output[o0..o0 + dim]);
        let (l, coef) = if label == 1.0 {
            (-log_sigmoid(s), sigmoid(s) - 1.0)
        } else {
            (-log_sigmoid(-s), sigmoid(s))
        };
        loss += l;
        for (g, o) in scratch.iter_mut().zip(&table.output[o0..o0 + dim]) {
            *g += coef * o;
        }
        coefs.push((node, coef));
    }
    for (node, coef) in coefs {
        let o0 = node.0 * dim;
        for k in 0..dim {
            table.output[o0 + k] -= lr * coef * table.input[c0 + k];
        }
    }
    for (x, g) in table.input[c0..c0 + dim].iter_mut().zip(scratch.iter()) {
        *x -= lr * g;
    }
    loss
}

/// Every `(center, context)` pair within `window` positions of each other,
/// walk by walk.
pub fn training_pairs(corpus: &WalkCorpus, window: usize) -> Vec<(NodeId, NodeId)> {
    let mut out = Vec::new();
    for w in &corpus.walks {
        push_walk_pairs(w, window, &mut out);
    }
    out
}

fn push_walk_pairs(w: &[NodeId], window: usize, out: &mut Vec<(NodeId, NodeId)>) {
    for i in 0..w.len() {
        let lo = i.saturating_sub(window);
        let hi = (i + window).min(w.len() - 1);
        for j in lo..=hi {
            if j != i {
                out.push((w[i], w[j]));
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingTrace {
    pub epoch_mean_loss: Vec<f64>,
    pub pairs_per_epoch: usize,
    /// False when training order depended on thread scheduling.
    pub reproducible: bool,
}

struct NoiseSampler {
    nodes: Vec<NodeId>,
    index: WeightedIndex<f64>,
}

impl NoiseSampler {
    fn new(corpus: &WalkCorpus, exponent: f64) -> Option<Self> {
        let mut counts = vec![0usize; corpus.num_nodes];
        for w in &corpus.walks {
            for n in w {
                counts[n.0] += 1;
            }
        }
        let (nodes, weights): (Vec<NodeId>, Vec<f64>) = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| (NodeId(i), (c as f64).powf(exponent)))
            .unzip();
        if nodes.len() < 2 {
            return None;
        }
        let index = WeightedIndex::new(&weights).ok()?;
        Some(Self { nodes, index })
    }

    /// `k` draws, none equal to `avoid`.
    fn draw(&self, k: usize, avoid: NodeId, r: &mut rng::Rng, out: &mut Vec<NodeId>) {
        out.clear();
        while out.len() < k {
            let n = self.nodes[self.index.sample(r)];
            if n != avoid {
                out.push(n);
            }
        }
    }
}

fn train_shard(
    table: &mut EmbeddingTable,
    pairs: &[(NodeId, NodeId)],
    sampler: &NoiseSampler,
    config: &SkipGramConfig,
    r: &mut rng::Rng,
    progress: (usize, usize),
) -> (f64, usize) {
    let (mut done, total) = progress;
    let mut loss_sum = 0.0;
    let mut negs = Vec::with_capacity(config.negatives);
    let mut scratch = Vec::with_capacity(table.dim);
    for &(c, ctx) in pairs {
        let lr = config.learning_rate * (1.0 - done as f64 / total as f64);
        sampler.draw(config.negatives, ctx, r, &mut negs);
        loss_sum += sgd_step(table, c, ctx, &negs, lr, &mut scratch);
        done += 1;
    }
    (loss_sum, pairs.len())
}

/// Trains embeddings over all window pairs of the corpus, visiting the
/// pairs in a fresh random order each epoch.
///
/// Serial training (`threads = 1`) is bit-reproducible for a given seed.
/// With more threads each epoch trains contiguous shards of the shuffled
/// pairs on copies of the current table and averages the copies.
pub fn train_embeddings(
    corpus: &WalkCorpus,
    config: &SkipGramConfig,
) -> Result<(EmbeddingTable, TrainingTrace)> {
    config.validate()?;
    if corpus.is_empty() {
        return Err(Error::data("empty walk corpus"));
    }
    let mut table = EmbeddingTable::random(corpus.num_nodes, config.dim, config.seed);
    let mut pairs = training_pairs(corpus, config.window);
    let pairs_per_epoch = pairs.len();
    let mut trace = TrainingTrace {
        epoch_mean_loss: Vec::new(),
        pairs_per_epoch,
        reproducible: true,
    };
    let sampler = match NoiseSampler::new(corpus, config.noise_exponent) {
        Some(s) if pairs_per_epoch > 0 => s,
        _ => return Ok((table, trace)),
    };
    let total = pairs_per_epoch * config.epochs;

    for epoch in 0..config.epochs {
        let start = epoch * pairs_per_epoch;
        pairs.shuffle(&mut rng::stream(config.seed, &[0x5f, epoch as u64]));
        let (loss, count) = if config.threads == 1 {
            let mut r = rng::stream(config.seed, &[epoch as u64, 0]);
            train_shard(&mut table, &pairs, &sampler, config, &mut r, (start, total))
        } else {
            let chunk = pairs.len().div_ceil(config.threads);
            let shards: Vec<(usize, &[(NodeId, NodeId)])> =
                pairs.chunks(chunk).enumerate().collect();
            let run = |&(k, shard): &(usize, &[(NodeId, NodeId)])| {
                let mut local = table.clone();
                let mut r = rng::stream(config.seed, &[epoch as u64, k as u64]);
                let (l, c) =
                    train_shard(&mut local, shard, &sampler, config, &mut r, (start, total));
                (local, l, c)
            };
            #[cfg(feature = "parallel")]
            let results: Vec<(EmbeddingTable, f64, usize)> = {
                use rayon::prelude::*;
                shards.par_iter().map(run).collect()
            };
            #[cfg(not(feature = "parallel"))]
            let results: Vec<(EmbeddingTable, f64, usize)> = shards.iter().map(run).collect();
            let k = results.len() as f64;
            table.input.iter_mut().for_each(|x| *x = 0.0);
            table.output.iter_mut().for_each(|x| *x = 0.0);
            let mut loss = 0.0;
            let mut count = 0;
            for (local, l, c) in results {
                for (x, y) in table.input.iter_mut().zip(&local.input) {
                    *x += y / k;
                }
                for (x, y) in table.output.iter_mut().zip(&local.output) {
                    *x += y / k;
                }
                loss += l;
                count += c;
            }
            (loss, count)
        };
        trace.epoch_mean_loss.push(loss / count.max(1) as f64);
    }
    Ok((table, trace))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeEmbedOp {
    Hadamard,
    Average,
    L1,
    L2,
}

impl EdgeEmbedOp {
    pub const ALL: [EdgeEmbedOp; 4] = [Self::Hadamard, Self::Average, Self::L1, Self::L2];

    pub fn apply(self, a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| match self {
                Self::Hadamard => x * y,
                Self::Average => (x + y) / 2.0,
                Self::L1 => (x - y).abs(),
                Self::L2 => (x - y) * (x - y),
            })
            .collect()
    }
}

impl fmt::Display for EdgeEmbedOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Hadamard => "hadamard",
            Self::Average => "average",
            Self::L1 => "l1",
            Self::L2 => "l2",
        })
    }
}

impl FromStr for EdgeEmbedOp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hadamard" => Ok(Self::Hadamard),
            "average" => Ok(Self::Average),
            "l1" => Ok(Self::L1),
            "l2" => Ok(Self::L2),
            other => Err(Error::config(format!("unknown edge operator `{other}`"))),
        }
    }
}

pub fn embed_edge(a: NodeId, b: NodeId, op: EdgeEmbedOp, table: &EmbeddingTable) -> Vec<f64> {
    op.apply(table.vector(a), table.vector(b))
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let d = dot(a, b);
    let n = (dot(a, a) * dot(b, b)).sqrt();
    if n == 0.0 {
        0.0
    } else {
        d / n
    }
}
