//! Graph kernels on small labelled graphs, Gram matrices and PSD checks.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::config::{key, Configurable, KvConfig};
use crate::error::{Error, Result};
use crate::hetgraph::HeteroGraph;
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelKind {
    NodePairsRbf,
    VertexLabelHistogram,
    Propagation,
}

impl KernelKind {
    pub const ALL: [KernelKind; 3] = [
        Self::NodePairsRbf,
        Self::VertexLabelHistogram,
        Self::Propagation,
    ];
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NodePairsRbf => "node_pairs_rbf",
            Self::VertexLabelHistogram => "vertex_label_histogram",
            Self::Propagation => "propagation",
        })
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "node_pairs_rbf" => Ok(Self::NodePairsRbf),
            "vertex_label_histogram" => Ok(Self::VertexLabelHistogram),
            "propagation" => Ok(Self::Propagation),
            other => Err(Error::config(format!("unknown kernel `{other}`"))),
        }
    }
}

/// How node labels are read off a graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Labelling {
    /// Node label only.
    Coarse,
    /// Node label and node name, so each entity is its own symbol.
    Fine,
}

impl FromStr for Labelling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coarse" => Ok(Self::Coarse),
            "fine" => Ok(Self::Fine),
            other => Err(Error::config(format!("unknown labelling `{other}`"))),
        }
    }
}

impl fmt::Display for Labelling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Coarse => "coarse",
            Self::Fine => "fine",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelConfig {
    pub kind: KernelKind,
    pub rbf_sigma: f64,
    pub iterations: usize,
    pub bin_width: f64,
    /// Random projections combined into one bin key per iteration.
    pub projections: usize,
    pub labelling: Labelling,
    pub normalize: bool,
    pub seed: u64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            kind: KernelKind::Propagation,
            rbf_sigma: 1.0,
            iterations: 3,
            bin_width: 0.1,
            projections: 3,
            labelling: Labelling::Fine,
            normalize: true,
            seed: 1,
        }
    }
}

impl KernelConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rbf_sigma > 0.0) || !(self.bin_width > 0.0) {
            return Err(Error::config("kernel sigma and bin width must be positive"));
        }
        if self.iterations == 0 || self.projections == 0 {
            return Err(Error::config(
                "kernel iterations and projections must be positive",
            ));
        }
        Ok(())
    }
}

impl Configurable for KernelConfig {
    fn apply(&mut self, cfg: &KvConfig, p: &str) -> Result<()> {
        cfg.read(&key(p, "kind"), &mut self.kind)?;
        cfg.read(&key(p, "rbf_sigma"), &mut self.rbf_sigma)?;
        cfg.read(&key(p, "iterations"), &mut self.iterations)?;
        cfg.read(&key(p, "bin_width"), &mut self.bin_width)?;
        cfg.read(&key(p, "projections"), &mut self.projections)?;
        cfg.read(&key(p, "labelling"), &mut self.labelling)?;
        cfg.read(&key(p, "normalize"), &mut self.normalize)?;
        cfg.read(&key(p, "seed"), &mut self.seed)?;
        self.validate()
    }

    fn echo(&self, p: &str) -> Vec<(String, String)> {
        vec![
            (key(p, "kind"), self.kind.to_string()),
            (key(p, "rbf_sigma"), self.rbf_sigma.to_string()),
            (key(p, "iterations"), self.iterations.to_string()),
            (key(p, "bin_width"), self.bin_width.to_string()),
            (key(p, "projections"), self.projections.to_string()),
            (key(p, "labelling"), self.labelling.to_string()),
            (key(p, "normalize"), self.normalize.to_string()),
            (key(p, "seed"), self.seed.to_string()),
        ]
    }
}

/// A graph reduced to what the kernels read: interned node labels,
/// adjacency and optional node attributes.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelGraph {
    pub id: String,
    pub labels: Vec<usize>,
    pub adjacency: Vec<Vec<usize>>,
    pub attrs: Option<Vec<Vec<f64>>>,
    /// Size of the shared label alphabet.
    pub alphabet: usize,
}

impl KernelGraph {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }
}

fn fine_symbol(g: &HeteroGraph, v: crate::hetgraph::NodeId) -> String {
    format!("{}\u{1f}{}", g.label_of(v), g.name_of(v))
}

/// Converts graphs over one shared label alphabet. Nodes matching
/// `exclude` (label, name) are dropped together with their edges.
///
/// Under fine labelling a name seen in only one graph (a trial's own id,
/// say) cannot match anything elsewhere, so it falls back to its coarse
/// label.
pub fn prepare_graphs(
    graphs: &[(String, HeteroGraph)],
    labelling: Labelling,
    exclude: Option<(&str, &str)>,
) -> Vec<KernelGraph> {
    let mut seen_in: HashMap<String, usize> = HashMap::new();
    if labelling == Labelling::Fine {
        for (_, g) in graphs {
            let distinct: HashSet<String> = g.node_ids().map(|v| fine_symbol(g, v)).collect();
            for s in distinct {
                *seen_in.entry(s).or_insert(0) += 1;
            }
        }
    }
    let symbol = |g: &HeteroGraph, v: crate::hetgraph::NodeId| -> String {
        match labelling {
            Labelling::Coarse => g.label_of(v).to_string(),
            Labelling::Fine => {
                let s = fine_symbol(g, v);
                if seen_in.get(&s).copied().unwrap_or(0) > 1 {
                    s
                } else {
                    g.label_of(v).to_string()
                }
            }
        }
    };
    let mut alphabet: BTreeMap<String, usize> = BTreeMap::new();
    for (_, g) in graphs {
        for v in g.node_ids() {
            alphabet.entry(symbol(g, v)).or_insert(0);
        }
    }
    for (i, slot) in alphabet.values_mut().enumerate() {
        *slot = i;
    }
    let n_symbols = alphabet.len();
    graphs
        .iter()
        .map(|(id, g)| {
            let keep: Vec<bool> = g
                .node_ids()
                .map(|v| exclude != Some((g.label_of(v), g.name_of(v))))
                .collect();
            let mut remap = vec![usize::MAX; g.node_count()];
            let mut labels = Vec::new();
            let mut attrs = Vec::new();
            for v in g.node_ids() {
                if keep[v.0] {
                    remap[v.0] = labels.len();
                    labels.push(alphabet[&symbol(g, v)]);
                    attrs.push(g.attrs(v).map(<[f64]>::to_vec));
                }
            }
            let mut adjacency = vec![Vec::new(); labels.len()];
            for v in g.node_ids() {
                if !keep[v.0] {
                    continue;
                }
                for &(u, _) in g.adjacency(v) {
                    if keep[u.0] && u != v {
                        let (a, b) = (remap[v.0], remap[u.0]);
                        if adjacency[a].last() != Some(&b) {
                            adjacency[a].push(b);
                        }
                    }
                }
            }
            let attrs = if attrs.iter().all(Option::is_some) && !attrs.is_empty() {
                Some(attrs.into_iter().map(Option::unwrap).collect())
            } else {
                None
            };
            KernelGraph {
                id: id.clone(),
                labels,
                adjacency,
                attrs,
                alphabet: n_symbols,
            }
        })
        .collect()
}

/// `exp(−‖x−y‖² / 2σ²)`.
pub fn rbf(x: &[f64], y: &[f64], sigma: f64) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok((-d2 / (2.0 * sigma * sigma)).exp())
}

fn pair_of(g: &HeteroGraph, h: &HeteroGraph, labelling: Labelling) -> (KernelGraph, KernelGraph) {
    let mut v = prepare_graphs(
        &[("G".into(), g.clone()), ("H".into(), h.clone())],
        labelling,
        None,
    );
    let kh = v.pop().expect("two graphs");
    (v.pop().expect("two graphs"), kh)
}

/// Sum of RBF values over all node pairs, on node attributes.
pub fn node_pairs_kernel(g: &HeteroGraph, h: &HeteroGraph, sigma: f64) -> Result<f64> {
    let attrs = |x: &HeteroGraph| -> Result<Vec<Vec<f64>>> {
        x.node_ids()
            .map(|v| {
                x.attrs(v)
                    .map(<[f64]>::to_vec)
                    .ok_or(Error::MissingAttributes(v.0))
            })
            .collect()
    };
    let (a, b) = (attrs(g)?, attrs(h)?);
    let mut s = 0.0;
    for x in &a {
        for y in &b {
            s += rbf(x, y, sigma)?;
        }
    }
    Ok(s)
}

/// Dot product of node-label count histograms.
pub fn vertex_label_histogram_kernel(g: &HeteroGraph, h: &HeteroGraph) -> f64 {
    let (a, b) = pair_of(g, h, Labelling::Coarse);
    sparse_dot(&label_histogram(&a), &label_histogram(&b))
}

pub fn propagation_kernel(g: &HeteroGraph, h: &HeteroGraph, config: &KernelConfig) -> Result<f64> {
    config.validate()?;
    let (a, b) = pair_of(g, h, config.labelling);
    let (fa, fb) = (
        propagation_features(&a, config),
        propagation_features(&b, config),
    );
    Ok(fa.iter().zip(&fb).map(|(x, y)| sparse_dot(x, y)).sum())
}

type Sparse<K> = HashMap<K, f64>;

fn sparse_dot<K: std::hash::Hash + Eq>(a: &Sparse<K>, b: &Sparse<K>) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    // counts are integers, so the sum is exact in any iteration order
    small
        .iter()
        .filter_map(|(k, v)| large.get(k).map(|w| v * w))
        .sum()
}

fn label_histogram(g: &KernelGraph) -> Sparse<usize> {
    let mut h = Sparse::new();
    for &l in &g.labels {
        *h.entry(l).or_insert(0.0) += 1.0;
    }
    h
}

/// Random projections and offsets for one iteration's hash.
struct Projection {
    dirs: Vec<Vec<f64>>,
    offsets: Vec<f64>,
}

fn projections(alphabet: usize, config: &KernelConfig) -> Vec<Projection> {
    (0..=config.iterations)
        .map(|t| {
            let mut r = rng::stream(config.seed, &[0x9a0b, t as u64]);
            let dirs = (0..config.projections)
                .map(|_| {
                    (0..alphabet)
                        .map(|_| StandardNormal.sample(&mut r))
                        .collect()
                })
                .collect();
            let unif = Uniform::new(0.0, config.bin_width).expect("positive width");
            let offsets = (0..config.projections)
                .map(|_| unif.sample(&mut r))
                .collect();
            Projection { dirs, offsets }
        })
        .collect()
}

/// Per-iteration bin-count histograms (iterations `0..=T`).
fn propagation_features(g: &KernelGraph, config: &KernelConfig) -> Vec<Sparse<Vec<i64>>> {
    let proj = projections(g.alphabet, config);
    propagation_features_with(g, config, &proj)
}

fn propagation_features_with(
    g: &KernelGraph,
    config: &KernelConfig,
    proj: &[Projection],
) -> Vec<Sparse<Vec<i64>>> {
    let n = g.node_count();
    // label distributions kept sparse: (label, mass) sorted by label
    let mut state: Vec<Vec<(usize, f64)>> = g.labels.iter().map(|&l| vec![(l, 1.0)]).collect();
    let mut out = Vec::with_capacity(config.iterations + 1);
    for (t, p) in proj.iter().enumerate() {
        let mut hist: Sparse<Vec<i64>> = Sparse::new();
        for s in &state {
            let key: Vec<i64> = p
                .dirs
                .iter()
                .zip(&p.offsets)
                .map(|(d, b)| {
                    let x: f64 = s.iter().map(|&(l, m)| d[l] * m).sum();
                    ((x + b) / config.bin_width).floor() as i64
                })
                .collect();
            *hist.entry(key).or_insert(0.0) += 1.0;
        }
        out.push(hist);
        if t == config.iterations {
            break;
        }
        let next: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|v| {
                let nb = &g.adjacency[v];
                if nb.is_empty() {
                    return state[v].clone();
                }
                let mut acc: BTreeMap<usize, f64> = BTreeMap::new();
                for &u in nb {
                    for &(l, m) in &state[u] {
                        *acc.entry(l).or_insert(0.0) += m;
                    }
                }
                let k = nb.len() as f64;
                acc.into_iter().map(|(l, m)| (l, m / k)).collect()
            })
            .collect();
        state = next;
    }
    out
}

/// Per-graph data computed once before filling a Gram matrix.
enum Prepared {
    Histogram(Sparse<usize>),
    Propagation(Vec<Sparse<Vec<i64>>>),
    Attributes(Vec<Vec<f64>>),
}

fn prepare(g: &KernelGraph, config: &KernelConfig, proj: &[Projection]) -> Prepared {
    match config.kind {
        KernelKind::VertexLabelHistogram => Prepared::Histogram(label_histogram(g)),
        KernelKind::Propagation => {
            Prepared::Propagation(propagation_features_with(g, config, proj))
        }
        KernelKind::NodePairsRbf => match &g.attrs {
            Some(a) => Prepared::Attributes(a.clone()),
            // one-hot label attributes: identical labels give 1, distinct
            // labels exp(-1/σ²), so only the histogram is needed
            None => Prepared::Histogram(label_histogram(g)),
        },
    }
}

fn evaluate(
    a: &Prepared,
    b: &Prepared,
    na: usize,
    nb: usize,
    config: &KernelConfig,
) -> Result<f64> {
    match (a, b) {
        (Prepared::Histogram(x), Prepared::Histogram(y)) => {
            let dot = sparse_dot(x, y);
            if config.kind == KernelKind::NodePairsRbf {
                let c = (-1.0 / (config.rbf_sigma * config.rbf_sigma)).exp();
                Ok(c * (na * nb) as f64 + (1.0 - c) * dot)
            } else {
                Ok(dot)
            }
        }
        (Prepared::Propagation(x), Prepared::Propagation(y)) => {
            Ok(x.iter().zip(y).map(|(p, q)| sparse_dot(p, q)).sum())
        }
        (Prepared::Attributes(x), Prepared::Attributes(y)) => {
            let mut s = 0.0;
            for u in x {
                for v in y {
                    s += rbf(u, v, config.rbf_sigma)?;
                }
            }
            Ok(s)
        }
        _ => Err(Error::data("graphs mix attributed and unattributed nodes")),
    }
}

/// Kernel value between two prepared graphs, as used for Gram entries.
pub fn kernel_value(a: &KernelGraph, b: &KernelGraph, config: &KernelConfig) -> Result<f64> {
    config.validate()?;
    let proj = projections(a.alphabet.max(b.alphabet), config);
    evaluate(
        &prepare(a, config, &proj),
        &prepare(b, config, &proj),
        a.node_count(),
        b.node_count(),
        config,
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct GramMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major values.
    pub values: Vec<f64>,
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    pub normalized: bool,
}

impl GramMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    /// Submatrix over the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> GramMatrix {
        let mut values = Vec::with_capacity(rows.len() * cols.len());
        for &i in rows {
            for &j in cols {
                values.push(self.get(i, j));
            }
        }
        GramMatrix {
            rows: rows.len(),
            cols: cols.len(),
            values,
            row_ids: rows.iter().map(|&i| self.row_ids[i].clone()).collect(),
            col_ids: cols.iter().map(|&j| self.col_ids[j].clone()).collect(),
            normalized: self.normalized,
        }
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("id");
        for c in &self.col_ids {
            s.push('\t');
            s.push_str(c);
        }
        s.push('\n');
        for i in 0..self.rows {
            s.push_str(&self.row_ids[i]);
            for x in self.row(i) {
                s.push('\t');
                s.push_str(&x.to_string());
            }
            s.push('\n');
        }
        s
    }
}

/// All pairwise kernel values between `rows` and `cols`. When both are the
/// same slice only the upper triangle is computed and mirrored.
pub fn gram_matrix(
    rows: &[KernelGraph],
    cols: &[KernelGraph],
    config: &KernelConfig,
) -> Result<GramMatrix> {
    config.validate()?;
    let square = std::ptr::eq(rows, cols);
    let alphabet = rows
        .iter()
        .chain(cols)
        .map(|g| g.alphabet)
        .max()
        .unwrap_or(0);
    let proj = projections(alphabet, config);
    let prep_rows: Vec<Prepared> = rows.iter().map(|g| prepare(g, config, &proj)).collect();
    let prep_cols: Vec<Prepared> = if square {
        Vec::new()
    } else {
        cols.iter().map(|g| prepare(g, config, &proj)).collect()
    };
    let col_prep = if square { &prep_rows } else { &prep_cols };

    let entry = |i: usize, j: usize| -> Result<f64> {
        evaluate(
            &prep_rows[i],
            &col_prep[j],
            rows[i].node_count(),
            cols[j].node_count(),
            config,
        )
        .map_err(|e| Error::KernelPair {
            row: rows[i].id.clone(),
            col: cols[j].id.clone(),
            source: Box::new(e),
        })
    };
    let row_values = |i: usize| -> Result<Vec<f64>> {
        let start = if square { i } else { 0 };
        (start..cols.len()).map(|j| entry(i, j)).collect()
    };
    #[cfg(feature = "parallel")]
    let computed: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        (0..rows.len())
            .into_par_iter()
            .map(row_values)
            .collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let computed: Vec<Vec<f64>> = (0..rows.len()).map(row_values).collect::<Result<_>>()?;

    let (n, m) = (rows.len(), cols.len());
    let mut values = vec![0.0; n * m];
    for (i, r) in computed.into_iter().enumerate() {
        let start = if square { i } else { 0 };
        for (k, x) in r.into_iter().enumerate() {
            let j = start + k;
            values[i * m + j] = x;
            if square {
                values[j * m + i] = x;
            }
        }
    }
    let mut gram = GramMatrix {
        rows: n,
        cols: m,
        values,
        row_ids: rows.iter().map(|g| g.id.clone()).collect(),
        col_ids: cols.iter().map(|g| g.id.clone()).collect(),
        normalized: false,
    };
    if config.normalize {
        let self_k = |gs: &[KernelGraph], prep: &[Prepared]| -> Result<Vec<f64>> {
            (0..gs.len())
                .map(|i| {
                    evaluate(
                        &prep[i],
                        &prep[i],
                        gs[i].node_count(),
                        gs[i].node_count(),
                        config,
                    )
                })
                .collect()
        };
        let dr = if square {
            (0..n).map(|i| gram.get(i, i)).collect()
        } else {
            self_k(rows, &prep_rows)?
        };
        let dc = if square {
            dr.clone()
        } else {
            self_k(cols, &prep_cols)?
        };
        normalize(&mut gram, &dr, &dc);
    }
    Ok(gram)
}

/// `k(G,H) / √(k(G,G) k(H,H))`; a zero self-kernel gives a zero entry.
fn normalize(gram: &mut GramMatrix, dr: &[f64], dc: &[f64]) {
    let square = gram.rows == gram.cols && gram.row_ids == gram.col_ids;
    for (i, &di) in dr.iter().enumerate() {
        let row = &mut gram.values[i * gram.cols..(i + 1) * gram.cols];
        for (v, &dj) in row.iter_mut().zip(dc) {
            let d = (di * dj).sqrt();
            *v = if d > 0.0 { *v / d } else { 0.0 };
        }
        if square && di > 0.0 {
            gram.values[i * gram.cols + i] = 1.0;
        }
    }
    gram.normalized = true;
}

/// Symmetric eigen-check: returns whether the smallest eigenvalue is at
/// least `−tol · trace`, and that eigenvalue.
pub fn psd_check(values: &[f64], n: usize, tol: f64) -> Result<(bool, f64)> {
    if values.len() != n * n {
        return Err(Error::LengthMismatch(n * n, values.len()));
    }
    if n == 0 {
        return Ok((true, 0.0));
    }
    let scale = values.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let mut asym = 0.0f64;
    for i in 0..n {
        for j in i + 1..n {
            asym = asym.max((values[i * n + j] - values[j * n + i]).abs());
        }
    }
    if asym > tol * scale {
        return Err(Error::NotSymmetric(asym));
    }
    let m = DMatrix::from_row_slice(n, n, values);
    let trace: f64 = (0..n).map(|i| values[i * n + i]).sum();
    let eig = SymmetricEigen::new(m).eigenvalues;
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    Ok((min >= -tol * trace.abs(), min))
}
