//! Inductive GNN over labelled graphs: mean aggregation per relation, one
//! weight matrix per (layer, relation), and a link-classification head.
//!
//! A relation is an ordered pair `(node label, neighbour label)` seen on at
//! least one edge. Each layer computes, for a node `v` of label `t`,
//!
//! ```text
//! a = (1/R_t) Σ_r W_{i,r} · [h_v ; mean(D_p h_u, u ∈ N_r(v))]
//! h_v ← relu(a) / ‖relu(a)‖
//! ```
//!
//! where `r` ranges over the `R_t` relations leaving label `t`.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::config::{key, Configurable, KvConfig};
use crate::error::{Error, Result};
use crate::hetgraph::{HeteroGraph, NodeId};
use crate::rng::{self, Rng};
use crate::skipgram::{dot, log_sigmoid, sigmoid};

#[derive(Clone, Debug, PartialEq)]
pub struct SageConfig {
    pub layer_dims: Vec<usize>,
    /// Neighbours sampled per relation at each hop during training, nearest
    /// hop first. Evaluation always uses full neighbourhoods.
    pub fanout: Vec<usize>,
    pub dropout: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for SageConfig {
    fn default() -> Self {
        Self {
            layer_dims: vec![128, 128],
            fanout: vec![10, 5],
            dropout: 0.1,
            epochs: 20,
            batch_size: 32,
            learning_rate: 0.001,
            seed: 1,
        }
    }
}

impl SageConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layer_dims.contains(&0) {
            return Err(Error::config("sage layer dims must be positive"));
        }
        if self.fanout.len() != self.layer_dims.len() || self.fanout.contains(&0) {
            return Err(Error::config(
                "sage fanout needs one positive entry per layer",
            ));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return Err(Error::config("sage dropout must lie in [0, 1)"));
        }
        if self.batch_size == 0 || !(self.learning_rate > 0.0) {
            return Err(Error::config(
                "sage batch size and learning rate must be positive",
            ));
        }
        Ok(())
    }
}

impl Configurable for SageConfig {
    fn apply(&mut self, cfg: &KvConfig, p: &str) -> Result<()> {
        cfg.read_list(&key(p, "layer_dims"), &mut self.layer_dims)?;
        cfg.read_list(&key(p, "fanout"), &mut self.fanout)?;
        cfg.read(&key(p, "dropout"), &mut self.dropout)?;
        cfg.read(&key(p, "epochs"), &mut self.epochs)?;
        cfg.read(&key(p, "batch_size"), &mut self.batch_size)?;
        cfg.read(&key(p, "learning_rate"), &mut self.learning_rate)?;
        cfg.read(&key(p, "seed"), &mut self.seed)?;
        self.validate()
    }

    fn echo(&self, p: &str) -> Vec<(String, String)> {
        let join = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        vec![
            (key(p, "layer_dims"), join(&self.layer_dims)),
            (key(p, "fanout"), join(&self.fanout)),
            (key(p, "dropout"), self.dropout.to_string()),
            (key(p, "epochs"), self.epochs.to_string()),
            (key(p, "batch_size"), self.batch_size.to_string()),
            (key(p, "learning_rate"), self.learning_rate.to_string()),
            (key(p, "seed"), self.seed.to_string()),
        ]
    }
}

/// Model parameters in one flat vector: every `W_{i,r}` row-major in
/// (layer, relation) order, then the head weights and the head bias.
#[derive(Clone, Debug, PartialEq)]
pub struct SageParams {
    pub labels: Vec<String>,
    pub input_dims: Vec<usize>,
    /// `(node label, neighbour label)` as indices into `labels`.
    pub relations: Vec<(usize, usize)>,
    pub layer_dims: Vec<usize>,
    pub fanout: Vec<usize>,
    pub dropout: f64,
    pub theta: Vec<f64>,
}

impl SageParams {
    /// Zero-initialised parameters for an explicit schema.
    pub fn zeros(
        labels: Vec<String>,
        input_dims: Vec<usize>,
        relations: Vec<(usize, usize)>,
        layer_dims: Vec<usize>,
    ) -> Result<Self> {
        if labels.len() != input_dims.len() {
            return Err(Error::LengthMismatch(labels.len(), input_dims.len()));
        }
        if relations
            .iter()
            .any(|&(a, b)| a >= labels.len() || b >= labels.len())
        {
            return Err(Error::config("relation refers to an unknown label"));
        }
        let fanout = vec![0; layer_dims.len()];
        let mut p = Self {
            labels,
            input_dims,
            relations,
            layer_dims,
            fanout,
            dropout: 0.0,
            theta: Vec::new(),
        };
        p.theta = vec![0.0; p.param_count()];
        Ok(p)
    }

    /// Schema taken from `g`; weights Glorot-uniform, head zero.
    pub fn for_graph(g: &HeteroGraph, config: &SageConfig) -> Result<Self> {
        config.validate()?;
        let labels: Vec<String> = g.node_alphabet().to_vec();
        let input_dims = (0..labels.len())
            .map(|i| {
                let id = g.node_label_id(&labels[i]).expect("label from alphabet");
                g.attr_dim(id).ok_or_else(|| {
                    let v = g.nodes_with_label(id).first().map(|v| v.0).unwrap_or(0);
                    Error::MissingAttributes(v)
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rels = BTreeSet::new();
        for e in g.edges() {
            let a = g.label_id_of(e.u).0 as usize;
            let b = g.label_id_of(e.v).0 as usize;
            rels.insert((a, b));
            rels.insert((b, a));
        }
        let mut p = Self::zeros(
            labels,
            input_dims,
            rels.into_iter().collect(),
            config.layer_dims.clone(),
        )?;
        p.fanout = config.fanout.clone();
        p.dropout = config.dropout;
        let mut r = rng::stream(config.seed, &[0x5a6e]);
        for layer in 0..p.depth() {
            for rel in 0..p.relations.len() {
                let (rows, cols) = p.weight_shape(layer, rel);
                let limit = (6.0 / (rows + cols) as f64).sqrt();
                let off = p.weight_offset(layer, rel);
                for x in &mut p.theta[off..off + rows * cols] {
                    *x = r.random_range(-limit..=limit);
                }
            }
        }
        Ok(p)
    }

    pub fn depth(&self) -> usize {
        self.layer_dims.len()
    }

    pub fn output_dim(&self) -> usize {
        self.layer_dims.last().copied().unwrap_or(0)
    }

    /// Width of label `label`'s state entering layer `layer`.
    pub fn in_dim(&self, layer: usize, label: usize) -> usize {
        if layer == 0 {
            self.input_dims[label]
        } else {
            self.layer_dims[layer - 1]
        }
    }

    pub fn weight_shape(&self, layer: usize, rel: usize) -> (usize, usize) {
        let (a, b) = self.relations[rel];
        (
            self.layer_dims[layer],
            self.in_dim(layer, a) + self.in_dim(layer, b),
        )
    }

    pub fn weight_offset(&self, layer: usize, rel: usize) -> usize {
        let mut off = 0;
        for l in 0..self.depth() {
            for r in 0..self.relations.len() {
                if (l, r) == (layer, rel) {
                    return off;
                }
                let (rows, cols) = self.weight_shape(l, r);
                off += rows * cols;
            }
        }
        off
    }

    fn head_offset(&self) -> usize {
        self.weight_offset(self.depth(), 0)
    }

    pub fn param_count(&self) -> usize {
        self.head_offset() + self.head_len()
    }

    fn head_len(&self) -> usize {
        if self.depth() == 0 {
            // identity embedding: head sized by the first label's attributes
            self.input_dims.first().copied().unwrap_or(0) + 1
        } else {
            self.output_dim() + 1
        }
    }

    pub fn weight(&self, layer: usize, rel: usize) -> &[f64] {
        let (rows, cols) = self.weight_shape(layer, rel);
        let off = self.weight_offset(layer, rel);
        &self.theta[off..off + rows * cols]
    }

    pub fn weight_mut(&mut self, layer: usize, rel: usize) -> &mut [f64] {
        let (rows, cols) = self.weight_shape(layer, rel);
        let off = self.weight_offset(layer, rel);
        &mut self.theta[off..off + rows * cols]
    }

    pub fn head_weights(&self) -> &[f64] {
        let off = self.head_offset();
        &self.theta[off..self.theta.len() - 1]
    }

    pub fn head_bias(&self) -> f64 {
        *self.theta.last().expect("head bias present")
    }

    pub fn head_mut(&mut self) -> (&mut [f64], &mut f64) {
        let off = self.head_offset();
        let len = self.head_len();
        let (w, b) = self.theta[off..].split_at_mut(len - 1);
        (w, &mut b[0])
    }

    /// Relations leaving label `label`.
    fn relations_of(&self, label: usize) -> Vec<usize> {
        (0..self.relations.len())
            .filter(|&r| self.relations[r].0 == label)
            .collect()
    }

    pub fn checkpoint(&self) -> String {
        let mut s = String::from("sage-checkpoint 1\n");
        let join = |v: &[usize]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(s, "layer_dims {}", join(&self.layer_dims)).unwrap();
        writeln!(s, "fanout {}", join(&self.fanout)).unwrap();
        writeln!(s, "dropout {}", self.dropout).unwrap();
        for (l, d) in self.labels.iter().zip(&self.input_dims) {
            writeln!(s, "input\t{l}\t{d}").unwrap();
        }
        for &(a, b) in &self.relations {
            writeln!(s, "relation\t{}\t{}", self.labels[a], self.labels[b]).unwrap();
        }
        writeln!(s, "theta {}", self.theta.len()).unwrap();
        for x in &self.theta {
            writeln!(s, "{x}").unwrap();
        }
        s
    }

    pub fn parse_checkpoint(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::data(format!("checkpoint: {m}"));
        let mut lines = text.lines();
        if lines.next() != Some("sage-checkpoint 1") {
            return Err(bad("missing header"));
        }
        let nums = |line: Option<&str>, tag: &str| -> Result<Vec<String>> {
            let line = line.ok_or_else(|| bad("truncated"))?;
            let mut it = line.split_whitespace();
            if it.next() != Some(tag) {
                return Err(bad(&format!("expected `{tag}`")));
            }
            Ok(it.map(str::to_string).collect())
        };
        let parse_usizes = |v: Vec<String>| -> Result<Vec<usize>> {
            v.iter()
                .map(|x| x.parse().map_err(|_| bad("bad integer")))
                .collect()
        };
        let layer_dims = parse_usizes(nums(lines.next(), "layer_dims")?)?;
        let fanout = parse_usizes(nums(lines.next(), "fanout")?)?;
        let dropout: f64 = nums(lines.next(), "dropout")?
            .first()
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| bad("bad dropout"))?;
        let mut labels = Vec::new();
        let mut input_dims = Vec::new();
        let mut rel_names = Vec::new();
        let mut theta_len = None;
        for line in lines.by_ref() {
            let f: Vec<&str> = line.split('\t').collect();
            match f[0] {
                "input" if f.len() == 3 => {
                    labels.push(f[1].to_string());
                    input_dims.push(f[2].parse().map_err(|_| bad("bad input dim"))?);
                }
                "relation" if f.len() == 3 => rel_names.push((f[1].to_string(), f[2].to_string())),
                t if t.starts_with("theta ") => {
                    theta_len = Some(
                        t[6..]
                            .trim()
                            .parse::<usize>()
                            .map_err(|_| bad("bad theta length"))?,
                    );
                    break;
                }
                _ => return Err(bad(&format!("unexpected line `{line}`"))),
            }
        }
        let idx = |n: &str| {
            labels
                .iter()
                .position(|l| l == n)
                .ok_or_else(|| Error::UnknownLabel(n.into()))
        };
        let relations = rel_names
            .iter()
            .map(|(a, b)| Ok((idx(a)?, idx(b)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut p = Self::zeros(labels, input_dims, relations, layer_dims)?;
        p.fanout = fanout;
        p.dropout = dropout;
        let theta: Vec<f64> = lines
            .map(|l| {
                l.trim()
                    .parse::<f64>()
                    .map_err(|_| bad("bad parameter value"))
            })
            .collect::<Result<_>>()?;
        if Some(theta.len()) != theta_len || theta.len() != p.param_count() {
            return Err(Error::LengthMismatch(p.param_count(), theta.len()));
        }
        p.theta = theta;
        Ok(p)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.checkpoint())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse_checkpoint(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug)]
pub struct AdamState {
    pub t: u64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl AdamState {
    pub fn new(n: usize) -> Self {
        Self::with_alpha(n, 0.001)
    }

    pub fn with_alpha(n: usize, alpha: f64) -> Self {
        Self {
            t: 0,
            m: vec![0.0; n],
            v: vec![0.0; n],
            alpha,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// One bias-corrected ADAM update.
pub fn adam_step(params: &mut [f64], grads: &[f64], state: &mut AdamState) -> Result<()> {
    if params.len() != grads.len() {
        return Err(Error::LengthMismatch(params.len(), grads.len()));
    }
    if state.m.len() != params.len() {
        return Err(Error::LengthMismatch(params.len(), state.m.len()));
    }
    state.t += 1;
    let c1 = 1.0 - state.beta1.powi(state.t as i32);
    let c2 = 1.0 - state.beta2.powi(state.t as i32);
    for i in 0..params.len() {
        let g = grads[i];
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
        let mh = state.m[i] / c1;
        let vh = state.v[i] / c2;
        params[i] -= state.alpha * mh / (vh.sqrt() + state.eps);
    }
    Ok(())
}

/// Mean of dropout-masked vectors. Survivors are scaled by `1/(1-p)`; an
/// empty list gives the zero vector of width `dim`.
pub fn mean_aggregate(states: &[&[f64]], dim: usize, p: f64, rng: &mut Rng) -> Result<Vec<f64>> {
    let mut out = vec![0.0; dim];
    if states.is_empty() {
        return Ok(out);
    }
    let keep = 1.0 / (1.0 - p);
    for s in states {
        if s.len() != dim {
            return Err(Error::LengthMismatch(dim, s.len()));
        }
        for (o, x) in out.iter_mut().zip(*s) {
            if p == 0.0 || rng.random::<f64>() >= p {
                *o += x * if p == 0.0 { 1.0 } else { keep };
            }
        }
    }
    let n = states.len() as f64;
    out.iter_mut().for_each(|x| *x /= n);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// Sampled neighbourhoods and dropout.
    Train,
    /// Full neighbourhoods, no dropout.
    Eval,
}

struct RelMsg {
    rel: usize,
    /// Indices into the previous layer's node list.
    nbrs: Vec<usize>,
    /// Per-neighbour dropout multipliers; empty when dropout is off.
    masks: Vec<Vec<f64>>,
    x: Vec<f64>,
}

struct Unit {
    self_prev: usize,
    msgs: Vec<RelMsg>,
    /// Pre-activation.
    a: Vec<f64>,
    norm: f64,
}

/// Forward state kept for backpropagation.
struct Trace {
    /// `states[j][i]`: layer-`j` state of the `i`-th node of level `j`.
    states: Vec<Vec<Vec<f64>>>,
    units: Vec<Vec<Unit>>,
    /// Index of each batch node in the top set.
    batch_index: Vec<usize>,
}

fn label_map(g: &HeteroGraph, params: &SageParams) -> Vec<Option<usize>> {
    g.node_alphabet()
        .iter()
        .map(|l| params.labels.iter().position(|p| p == l))
        .collect()
}

fn forward_trace(
    g: &HeteroGraph,
    batch: &[NodeId],
    params: &SageParams,
    mode: Mode,
    rng: &mut Rng,
) -> Result<Trace> {
    for &v in batch {
        g.check(v)?;
    }
    let depth = params.depth();
    let lmap = label_map(g, params);
    let label = |v: NodeId| -> Result<usize> {
        lmap[g.label_id_of(v).0 as usize]
            .ok_or_else(|| Error::UnknownLabel(g.label_of(v).to_string()))
    };
    let rel_of: Vec<Vec<usize>> = (0..params.labels.len())
        .map(|l| params.relations_of(l))
        .collect();
    let graph_label: Vec<Option<crate::hetgraph::LabelId>> =
        params.labels.iter().map(|l| g.node_label_id(l)).collect();

    // top-down: choose neighbourhoods
    let mut sets: Vec<Vec<NodeId>> = vec![Vec::new(); depth + 1];
    let mut index: Vec<HashMap<NodeId, usize>> = vec![HashMap::new(); depth + 1];
    let mut batch_index = Vec::with_capacity(batch.len());
    for &v in batch {
        let next = sets[depth].len();
        let i = *index[depth].entry(v).or_insert(next);
        if i == next {
            sets[depth].push(v);
        }
        batch_index.push(i);
    }
    // per hop, per node: (relation, sampled neighbours)
    type Picks = Vec<Vec<(usize, Vec<NodeId>)>>;
    let mut picks: Vec<Picks> = vec![Vec::new(); depth + 1];
    for j in (1..=depth).rev() {
        let hop = depth - j;
        let (lower, upper) = sets.split_at_mut(j);
        let (lower_idx, upper_idx) = index.split_at_mut(j);
        let below = &mut lower[j - 1];
        let below_idx = &mut lower_idx[j - 1];
        let mut insert = |v: NodeId, below: &mut Vec<NodeId>| -> usize {
            let next = below.len();
            let i = *below_idx.entry(v).or_insert(next);
            if i == next {
                below.push(v);
            }
            i
        };
        for &v in &upper[0] {
            insert(v, below);
        }
        let _ = upper_idx;
        let mut level = Vec::with_capacity(upper[0].len());
        for &v in &upper[0] {
            let t = label(v)?;
            let mut per_rel = Vec::new();
            for &r in &rel_of[t] {
                let s = params.relations[r].1;
                let mut nbrs: Vec<NodeId> = match graph_label[s] {
                    Some(gl) => g.distinct_neighbors_with_label(v, gl),
                    None => Vec::new(),
                };
                nbrs.retain(|&u| u != v);
                if mode == Mode::Train {
                    let f = params.fanout.get(hop).copied().unwrap_or(0);
                    if f > 0 && nbrs.len() > f {
                        nbrs = rand::seq::index::sample(rng, nbrs.len(), f)
                            .into_iter()
                            .map(|i| nbrs[i])
                            .collect();
                    }
                }
                for &u in &nbrs {
                    insert(u, below);
                }
                per_rel.push((r, nbrs));
            }
            level.push(per_rel);
        }
        picks[j] = level;
    }

    // bottom-up
    let mut states: Vec<Vec<Vec<f64>>> = vec![Vec::new(); depth + 1];
    states[0] = sets[0]
        .iter()
        .map(|&v| {
            let t = label(v)?;
            let a = g.attrs(v).ok_or(Error::MissingAttributes(v.0))?;
            if a.len() != params.input_dims[t] {
                return Err(Error::DimensionMismatch {
                    label: params.labels[t].clone(),
                    expected: params.input_dims[t],
                    got: a.len(),
                });
            }
            Ok(a.to_vec())
        })
        .collect::<Result<_>>()?;
    let p = if mode == Mode::Train {
        params.dropout
    } else {
        0.0
    };
    let mut units: Vec<Vec<Unit>> = (0..=depth).map(|_| Vec::new()).collect();
    for j in 1..=depth {
        let layer = j - 1;
        let out_dim = params.layer_dims[layer];
        let mut layer_states = Vec::with_capacity(sets[j].len());
        let mut layer_units = Vec::with_capacity(sets[j].len());
        for (vi, &v) in sets[j].iter().enumerate() {
            let self_prev = index[j - 1][&v];
            let mut a = vec![0.0; out_dim];
            let mut msgs = Vec::new();
            let n_rel = picks[j][vi].len();
            for (r, nbrs) in &picks[j][vi] {
                let s = params.relations[*r].1;
                let nd = params.in_dim(layer, s);
                let idx: Vec<usize> = nbrs.iter().map(|u| index[j - 1][u]).collect();
                let mut masks = Vec::new();
                let mut agg = vec![0.0; nd];
                for &ui in &idx {
                    let h = &states[j - 1][ui];
                    if p > 0.0 {
                        let m: Vec<f64> = (0..nd)
                            .map(|_| {
                                if rng.random::<f64>() >= p {
                                    1.0 / (1.0 - p)
                                } else {
                                    0.0
                                }
                            })
                            .collect();
                        for k in 0..nd {
                            agg[k] += m[k] * h[k];
                        }
                        masks.push(m);
                    } else {
                        for k in 0..nd {
                            agg[k] += h[k];
                        }
                    }
                }
                if !idx.is_empty() {
                    let n = idx.len() as f64;
                    agg.iter_mut().for_each(|x| *x /= n);
                }
                let mut x = states[j - 1][self_prev].clone();
                x.extend_from_slice(&agg);
                let w = params.weight(layer, *r);
                let cols = x.len();
                for (o, row) in a.iter_mut().zip(w.chunks_exact(cols)) {
                    *o += dot(row, &x) / n_rel as f64;
                }
                msgs.push(RelMsg {
                    rel: *r,
                    nbrs: idx,
                    masks,
                    x,
                });
            }
            let u: Vec<f64> = a.iter().map(|&x| x.max(0.0)).collect();
            let norm = dot(&u, &u).sqrt();
            let h = if norm > 0.0 {
                u.iter().map(|x| x / norm).collect()
            } else {
                u
            };
            layer_states.push(h);
            layer_units.push(Unit {
                self_prev,
                msgs,
                a,
                norm,
            });
        }
        states[j] = layer_states;
        units[j] = layer_units;
    }
    Ok(Trace {
        states,
        units,
        batch_index,
    })
}

/// Gradient of the loss w.r.t. `theta`, given gradients on the top states.
fn backward(params: &SageParams, tr: &Trace, top_grads: Vec<Vec<f64>>, grad: &mut [f64]) {
    let depth = params.depth();
    let mut g_states = top_grads;
    for j in (1..=depth).rev() {
        let layer = j - 1;
        let mut g_prev: Vec<Vec<f64>> = tr.states[j - 1]
            .iter()
            .map(|s| vec![0.0; s.len()])
            .collect();
        for (vi, unit) in tr.units[j].iter().enumerate() {
            let gh = &g_states[vi];
            if unit.norm == 0.0 || gh.iter().all(|&x| x == 0.0) {
                continue;
            }
            let h = &tr.states[j][vi];
            let hg = dot(h, gh);
            // through the normalisation and the relu
            let ga: Vec<f64> = gh
                .iter()
                .zip(h)
                .zip(&unit.a)
                .map(|((&g, &hk), &ak)| {
                    if ak > 0.0 {
                        (g - hk * hg) / unit.norm
                    } else {
                        0.0
                    }
                })
                .collect();
            let n_rel = unit.msgs.len() as f64;
            for msg in &unit.msgs {
                let cols = msg.x.len();
                let off = params.weight_offset(layer, msg.rel);
                let w = params.weight(layer, msg.rel);
                let mut gx = vec![0.0; cols];
                for (row, &gr) in ga.iter().enumerate() {
                    if gr == 0.0 {
                        continue;
                    }
                    let c = gr / n_rel;
                    let gw = &mut grad[off + row * cols..off + (row + 1) * cols];
                    for k in 0..cols {
                        gw[k] += c * msg.x[k];
                        gx[k] += c * w[row * cols + k];
                    }
                }
                let sd = tr.states[j - 1][unit.self_prev].len();
                for k in 0..sd {
                    g_prev[unit.self_prev][k] += gx[k];
                }
                if msg.nbrs.is_empty() {
                    continue;
                }
                let inv = 1.0 / msg.nbrs.len() as f64;
                for (ni, &ui) in msg.nbrs.iter().enumerate() {
                    let gp = &mut g_prev[ui];
                    for k in 0..gp.len() {
                        let m = if msg.masks.is_empty() {
                            1.0
                        } else {
                            msg.masks[ni][k]
                        };
                        gp[k] += inv * m * gx[sd + k];
                    }
                }
            }
        }
        g_states = g_prev;
    }
}

/// Representations of `batch` (one per entry, duplicates allowed).
pub fn sage_forward(
    g: &HeteroGraph,
    batch: &[NodeId],
    params: &SageParams,
    mode: Mode,
    rng: &mut Rng,
) -> Result<Vec<Vec<f64>>> {
    let tr = forward_trace(g, batch, params, mode, rng)?;
    let top = &tr.states[params.depth()];
    Ok(tr.batch_index.iter().map(|&i| top[i].clone()).collect())
}

/// `σ(w·(z_a ⊙ z_b) + b)`.
pub fn link_head(za: &[f64], zb: &[f64], w: &[f64], b: f64) -> f64 {
    sigmoid(link_logit(za, zb, w, b))
}

fn link_logit(za: &[f64], zb: &[f64], w: &[f64], b: f64) -> f64 {
    za.iter()
        .zip(zb)
        .zip(w)
        .map(|((x, y), wk)| x * y * wk)
        .sum::<f64>()
        + b
}

/// `−log σ(z_u·z_pos) − (Q/|negs|) Σ log σ(−z_u·z_neg)`.
pub fn unsupervised_loss(zu: &[f64], zpos: &[f64], znegs: &[Vec<f64>], q: usize) -> f64 {
    unsupervised_loss_grads(zu, zpos, znegs, q).0
}

/// Loss plus gradients w.r.t. `z_u`, `z_pos` and each negative.
pub fn unsupervised_loss_grads(
    zu: &[f64],
    zpos: &[f64],
    znegs: &[Vec<f64>],
    q: usize,
) -> (f64, Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let s = dot(zu, zpos);
    let mut loss = -log_sigmoid(s);
    let c = sigmoid(s) - 1.0;
    let mut gu: Vec<f64> = zpos.iter().map(|x| c * x).collect();
    let gpos: Vec<f64> = zu.iter().map(|x| c * x).collect();
    let scale = if znegs.is_empty() {
        0.0
    } else {
        q as f64 / znegs.len() as f64
    };
    let mut gnegs = Vec::with_capacity(znegs.len());
    for zn in znegs {
        let s = dot(zu, zn);
        loss -= scale * log_sigmoid(-s);
        let c = scale * sigmoid(s);
        for (g, x) in gu.iter_mut().zip(zn) {
            *g += c * x;
        }
        gnegs.push(zu.iter().map(|x| c * x).collect());
    }
    (loss, gu, gpos, gnegs)
}

/// Mean log-loss of the link head over labelled pairs and its gradient
/// w.r.t. `theta`.
pub fn link_loss_and_grads(
    g: &HeteroGraph,
    pairs: &[(NodeId, NodeId, f64)],
    params: &SageParams,
    mode: Mode,
    rng: &mut Rng,
) -> Result<(f64, Vec<f64>)> {
    let mut batch = Vec::with_capacity(2 * pairs.len());
    for &(a, b, _) in pairs {
        batch.push(a);
        batch.push(b);
    }
    let tr = forward_trace(g, &batch, params, mode, rng)?;
    let depth = params.depth();
    let top = &tr.states[depth];
    let w = params.head_weights();
    let bias = params.head_bias();
    let mut grad = vec![0.0; params.theta.len()];
    let mut g_top: Vec<Vec<f64>> = top.iter().map(|s| vec![0.0; s.len()]).collect();
    let head = params.head_offset();
    let n = pairs.len().max(1) as f64;
    let mut loss = 0.0;
    for (k, &(_, _, y)) in pairs.iter().enumerate() {
        let (ia, ib) = (tr.batch_index[2 * k], tr.batch_index[2 * k + 1]);
        let (za, zb) = (&top[ia], &top[ib]);
        if za.len() != w.len() {
            return Err(Error::LengthMismatch(w.len(), za.len()));
        }
        let s = link_logit(za, zb, w, bias);
        loss -= y * log_sigmoid(s) + (1.0 - y) * log_sigmoid(-s);
        let d = (sigmoid(s) - y) / n;
        for i in 0..w.len() {
            grad[head + i] += d * za[i] * zb[i];
            g_top[ia][i] += d * w[i] * zb[i];
            g_top[ib][i] += d * w[i] * za[i];
        }
        *grad.last_mut().expect("bias") += d;
    }
    backward(params, &tr, g_top, &mut grad);
    Ok((loss / n, grad))
}

/// Supervised training of the layers and the head on labelled pairs with
/// ADAM. Returns the parameters and the mean loss of each epoch.
pub fn train_hinsage(
    g: &HeteroGraph,
    train: &[(NodeId, NodeId, f64)],
    config: &SageConfig,
) -> Result<(SageParams, Vec<f64>)> {
    if train.is_empty() {
        return Err(Error::data("empty training set"));
    }
    let mut params = SageParams::for_graph(g, config)?;
    let mut adam = AdamState::with_alpha(params.theta.len(), config.learning_rate);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut losses = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let mut r = rng::stream(config.seed, &[0x7a1, epoch as u64]);
        order.shuffle(&mut r);
        let mut total = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<_> = chunk.iter().map(|&i| train[i]).collect();
            let (loss, grad) = link_loss_and_grads(g, &batch, &params, Mode::Train, &mut r)?;
            total += loss * batch.len() as f64;
            adam_step(&mut params.theta, &grad, &mut adam)?;
        }
        losses.push(total / train.len() as f64);
    }
    Ok((params, losses))
}

/// Link probabilities for `pairs` in evaluation mode.
pub fn predict_links(
    g: &HeteroGraph,
    params: &SageParams,
    pairs: &[(NodeId, NodeId)],
) -> Result<Vec<f64>> {
    let mut batch = Vec::with_capacity(2 * pairs.len());
    for &(a, b) in pairs {
        batch.push(a);
        batch.push(b);
    }
    // eval mode draws nothing from the stream
    let mut r = rng::stream(0, &[]);
    let z = sage_forward(g, &batch, params, Mode::Eval, &mut r)?;
    let w = params.head_weights();
    let b = params.head_bias();
    Ok(z.chunks_exact(2)
        .map(|p| link_head(&p[0], &p[1], w, b))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hetgraph::GraphBuilder;

    fn two_node_graph() -> HeteroGraph {
        let mut b = GraphBuilder::new();
        let a = b.add_node("A", Some(vec![1.0, 0.0]), "a").unwrap();
        let c = b.add_node("A", Some(vec![0.0, 1.0]), "c").unwrap();
        b.add_edge(a, c, "e", None).unwrap();
        b.freeze()
    }

    #[test]
    fn mean_aggregate_examples() {
        let mut r = rng::stream(1, &[]);
        let v = mean_aggregate(&[&[1.0, 0.0], &[0.0, 1.0]], 2, 0.0, &mut r).unwrap();
        assert_eq!(v, vec![0.5, 0.5]);
        assert_eq!(mean_aggregate(&[], 3, 0.5, &mut r).unwrap(), vec![0.0; 3]);
        assert!(mean_aggregate(&[&[1.0]], 2, 0.0, &mut r).is_err());
    }

    #[test]
    fn inverted_dropout_is_unbiased() {
        let mut r = rng::stream(2, &[]);
        let states: [&[f64]; 2] = [&[1.0, 0.0], &[0.0, 1.0]];
        let mut acc = [0.0; 2];
        let n = 10_000;
        for _ in 0..n {
            let v = mean_aggregate(&states, 2, 0.5, &mut r).unwrap();
            acc[0] += v[0];
            acc[1] += v[1];
        }
        for a in acc {
            assert!((a / n as f64 - 0.5).abs() < 0.01);
        }
    }

    #[test]
    fn zero_depth_returns_attributes() {
        let g = two_node_graph();
        let p = SageParams::zeros(vec!["A".into()], vec![2], vec![(0, 0)], vec![]).unwrap();
        let mut r = rng::stream(0, &[]);
        let z = sage_forward(&g, &[NodeId(0), NodeId(1)], &p, Mode::Eval, &mut r).unwrap();
        assert_eq!(z, vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
    }

    #[test]
    fn hand_computed_single_layer() {
        // W = [2I | 2I]: a_v = 2(x_v + x_u), relu keeps it, normalise
        let g = two_node_graph();
        let mut p = SageParams::zeros(vec!["A".into()], vec![2], vec![(0, 0)], vec![2]).unwrap();
        p.weight_mut(0, 0)
            .copy_from_slice(&[2.0, 0.0, 2.0, 0.0, 0.0, 2.0, 0.0, 2.0]);
        let mut r = rng::stream(0, &[]);
        let z = sage_forward(&g, &[NodeId(0)], &p, Mode::Eval, &mut r).unwrap();
        let s = 0.5f64.sqrt();
        assert!((z[0][0] - s).abs() < 1e-12 && (z[0][1] - s).abs() < 1e-12);

        // W = [I | 0] keeps only the node itself
        p.weight_mut(0, 0)
            .copy_from_slice(&[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let z = sage_forward(&g, &[NodeId(1)], &p, Mode::Eval, &mut r).unwrap();
        assert_eq!(z[0], vec![0.0, 1.0]);
    }

    #[test]
    fn eval_is_deterministic_and_normalised() {
        let g = two_node_graph();
        let cfg = SageConfig {
            layer_dims: vec![4, 3],
            ..Default::default()
        };
        let p = SageParams::for_graph(&g, &cfg).unwrap();
        let z1 = sage_forward(
            &g,
            &[NodeId(0), NodeId(1)],
            &p,
            Mode::Eval,
            &mut rng::stream(1, &[]),
        )
        .unwrap();
        let z2 = sage_forward(
            &g,
            &[NodeId(0), NodeId(1)],
            &p,
            Mode::Eval,
            &mut rng::stream(9, &[]),
        )
        .unwrap();
        assert_eq!(z1, z2);
        for z in z1 {
            let n = dot(&z, &z).sqrt();
            assert!(n == 0.0 || (n - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn unsupervised_loss_examples() {
        let z = vec![0.0; 3];
        assert!((unsupervised_loss(&z, &z, std::slice::from_ref(&z), 1) - 2.0 * 2f64.ln()).abs() < 1e-12);
        let big = vec![10.0, 0.0];
        let orth = vec![0.0, 1.0];
        let l = unsupervised_loss(&big, &big, &[orth], 1);
        assert!((l - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn head_examples() {
        assert_eq!(link_head(&[1.0, 2.0], &[3.0, -1.0], &[0.0, 0.0], 0.0), 0.5);
        let w = [0.3, -2.0];
        let a = [0.5, 0.1];
        let b = [-1.0, 4.0];
        assert_eq!(link_head(&a, &b, &w, 0.2), link_head(&b, &a, &w, 0.2));
        let p = link_head(&[100.0], &[100.0], &[100.0], 0.0);
        assert!(p > 0.0 && p <= 1.0);
    }

    #[test]
    fn adam_examples() {
        let mut p = vec![1.0, -2.0];
        let mut s = AdamState::new(2);
        adam_step(&mut p, &[0.0, 0.0], &mut s).unwrap();
        assert_eq!(p, vec![1.0, -2.0]);
        assert_eq!(s.t, 1);

        let mut p = vec![0.0];
        let mut s = AdamState::new(1);
        adam_step(&mut p, &[3.7], &mut s).unwrap();
        assert!((p[0] + 0.001).abs() < 1e-10);

        let s0 = AdamState::new(1);
        let (mut a, mut b) = (vec![0.5], vec![0.5]);
        let (mut sa, mut sb) = (s0.clone(), s0);
        adam_step(&mut a, &[0.2], &mut sa).unwrap();
        adam_step(&mut b, &[0.2], &mut sb).unwrap();
        assert_eq!(a, b);
        assert!(adam_step(&mut a, &[0.1, 0.2], &mut sa).is_err());
    }

    #[test]
    fn checkpoint_round_trip() {
        let mut b = GraphBuilder::new();
        let t = b
            .add_node("Clinical Trial", Some(vec![1.0, 0.0, 1.0]), "t")
            .unwrap();
        let e = b
            .add_node("Adverse Event", Some(vec![0.2, 0.4]), "e")
            .unwrap();
        b.add_edge(t, e, "x", None).unwrap();
        let g = b.freeze();
        let p = SageParams::for_graph(
            &g,
            &SageConfig {
                layer_dims: vec![3, 2],
                ..Default::default()
            },
        )
        .unwrap();
        let back = SageParams::parse_checkpoint(&p.checkpoint()).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn empty_training_set_is_an_error() {
        let g = two_node_graph();
        assert!(train_hinsage(&g, &[], &SageConfig::default()).is_err());
    }
}
