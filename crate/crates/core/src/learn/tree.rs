use std::fmt;
use std::str::FromStr;

use rand::Rng as _;

use crate::config::{key, Configurable, KvConfig};
use crate::error::{Error, Result};
use crate::rng::{self, Rng};

use super::{Dataset, Scorer};

#[derive(Clone, Debug, PartialEq)]
pub struct TreeConfig {
    pub max_depth: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self { max_depth: 8 }
    }
}

impl Configurable for TreeConfig {
    fn apply(&mut self, cfg: &KvConfig, p: &str) -> Result<()> {
        cfg.read(&key(p, "max_depth"), &mut self.max_depth)
    }

    fn echo(&self, p: &str) -> Vec<(String, String)> {
        vec![(key(p, "max_depth"), self.max_depth.to_string())]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaxFeatures {
    Sqrt,
    All,
}

impl FromStr for MaxFeatures {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt" => Ok(Self::Sqrt),
            "all" => Ok(Self::All),
            other => Err(Error::config(format!("unknown max_features `{other}`"))),
        }
    }
}

impl fmt::Display for MaxFeatures {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Sqrt => "sqrt",
            Self::All => "all",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ForestConfig {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub bootstrap: bool,
    pub max_features: MaxFeatures,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_estimators: 100,
            max_depth: 10,
            bootstrap: true,
            max_features: MaxFeatures::Sqrt,
            seed: 1,
        }
    }
}

impl Configurable for ForestConfig {
    fn apply(&mut self, cfg: &KvConfig, p: &str) -> Result<()> {
        cfg.read(&key(p, "n_estimators"), &mut self.n_estimators)?;
        cfg.read(&key(p, "max_depth"), &mut self.max_depth)?;
        cfg.read(&key(p, "bootstrap"), &mut self.bootstrap)?;
        cfg.read(&key(p, "max_features"), &mut self.max_features)?;
        cfg.read(&key(p, "seed"), &mut self.seed)?;
        if self.n_estimators == 0 {
            return Err(Error::config("forest needs at least one tree"));
        }
        Ok(())
    }

    fn echo(&self, p: &str) -> Vec<(String, String)> {
        vec![
            (key(p, "n_estimators"), self.n_estimators.to_string()),
            (key(p, "max_depth"), self.max_depth.to_string()),
            (key(p, "bootstrap"), self.bootstrap.to_string()),
            (key(p, "max_features"), self.max_features.to_string()),
            (key(p, "seed"), self.seed.to_string()),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
enum TreeNode {
    /// Fraction of positive training rows reaching the leaf.
    Leaf(f64),
    /// Rows with `x[feature] <= threshold` go left.
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecisionTree {
    nodes: Vec<TreeNode>,
}

impl DecisionTree {
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                TreeNode::Leaf(p) => return p,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[feature] <= threshold { left } else { right },
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n, TreeNode::Leaf(_)))
            .count()
    }

    pub fn depth(&self) -> usize {
        fn go(nodes: &[TreeNode], i: usize) -> usize {
            match nodes[i] {
                TreeNode::Leaf(_) => 0,
                TreeNode::Split { left, right, .. } => 1 + go(nodes, left).max(go(nodes, right)),
            }
        }
        go(&self.nodes, 0)
    }
}

impl Scorer for DecisionTree {
    fn score(&self, x: &[f64]) -> f64 {
        self.predict_proba(x)
    }
}

fn gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let p = pos as f64 / n as f64;
    2.0 * p * (1.0 - p)
}

/// Lowest weighted child impurity over `features` (scanned in the given
/// order); ties keep the earlier feature and the lower threshold.
fn best_split(data: &Dataset, rows: &[usize], features: &[usize]) -> Option<(usize, f64)> {
    let n = rows.len();
    let total_pos = rows.iter().filter(|&&i| data.labels[i] == 1).count();
    let mut best: Option<(f64, usize, f64)> = None;
    let mut sorted = rows.to_vec();
    for &f in features {
        sorted.sort_by(|&a, &b| data.features[a][f].total_cmp(&data.features[b][f]));
        let mut left_pos = 0;
        for k in 0..n - 1 {
            if data.labels[sorted[k]] == 1 {
                left_pos += 1;
            }
            let (a, b) = (data.features[sorted[k]][f], data.features[sorted[k + 1]][f]);
            if a == b {
                continue;
            }
            let nl = k + 1;
            let nr = n - nl;
            let imp = (nl as f64 * gini(left_pos, nl) + nr as f64 * gini(total_pos - left_pos, nr))
                / n as f64;
            if best.is_none_or(|(bi, _, _)| imp < bi) {
                let mid = a + (b - a) / 2.0;
                let thr = if mid < b { mid } else { a };
                best = Some((imp, f, thr));
            }
        }
    }
    best.map(|(_, f, t)| (f, t))
}

struct Builder<'a> {
    data: &'a Dataset,
    max_depth: usize,
    nodes: Vec<TreeNode>,
    subsample: Option<(usize, Rng)>,
}

impl Builder<'_> {
    fn grow(&mut self, rows: &[usize], depth: usize) -> usize {
        let pos = rows.iter().filter(|&&i| self.data.labels[i] == 1).count();
        let id = self.nodes.len();
        self.nodes
            .push(TreeNode::Leaf(pos as f64 / rows.len().max(1) as f64));
        if depth >= self.max_depth || pos == 0 || pos == rows.len() {
            return id;
        }
        let d = self.data.dim();
        let all: Vec<usize> = (0..d).collect();
        let split = match &mut self.subsample {
            Some((k, r)) => {
                let mut feats: Vec<usize> = rand::seq::index::sample(r, d, (*k).min(d)).into_vec();
                feats.sort_unstable();
                best_split(self.data, rows, &feats).or_else(|| best_split(self.data, rows, &all))
            }
            None => best_split(self.data, rows, &all),
        };
        let Some((feature, threshold)) = split else {
            return id;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows
            .iter()
            .partition(|&&i| self.data.features[i][feature] <= threshold);
        let left = self.grow(&l, depth + 1);
        let right = self.grow(&r, depth + 1);
        self.nodes[id] = TreeNode::Split {
            feature,
            threshold,
            left,
            right,
        };
        id
    }
}

/// CART with Gini impurity and exhaustive threshold search.
pub fn train_tree(data: &Dataset, config: &TreeConfig) -> Result<DecisionTree> {
    if data.is_empty() {
        return Err(Error::data("cannot fit a tree on no rows"));
    }
    let rows: Vec<usize> = (0..data.len()).collect();
    let mut b = Builder {
        data,
        max_depth: config.max_depth,
        nodes: Vec::new(),
        subsample: None,
    };
    b.grow(&rows, 0);
    Ok(DecisionTree { nodes: b.nodes })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Forest {
    pub trees: Vec<DecisionTree>,
}

impl Forest {
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.predict_proba(x)).sum::<f64>() / self.trees.len() as f64
    }
}

impl Scorer for Forest {
    fn score(&self, x: &[f64]) -> f64 {
        self.predict_proba(x)
    }
}

/// Bagged trees with per-split feature subsampling. Each tree draws from
/// its own seeded stream, so the result does not depend on thread count.
pub fn train_forest(data: &Dataset, config: &ForestConfig) -> Result<Forest> {
    if data.len() < 2 {
        return Err(Error::data("forest needs at least two rows"));
    }
    if config.n_estimators == 0 {
        return Err(Error::config("forest needs at least one tree"));
    }
    let d = data.dim();
    let k = match config.max_features {
        MaxFeatures::Sqrt => ((d as f64).sqrt().round() as usize).max(1),
        MaxFeatures::All => d,
    };
    let one = |t: usize| -> DecisionTree {
        let mut r = rng::stream(config.seed, &[0xf0e5, t as u64]);
        let rows: Vec<usize> = if config.bootstrap {
            (0..data.len())
                .map(|_| r.random_range(0..data.len()))
                .collect()
        } else {
            (0..data.len()).collect()
        };
        let mut b = Builder {
            data,
            max_depth: config.max_depth,
            nodes: Vec::new(),
            subsample: (k < d).then_some((k, r)),
        };
        b.grow(&rows, 0);
        DecisionTree { nodes: b.nodes }
    };
    #[cfg(feature = "parallel")]
    let trees = {
        use rayon::prelude::*;
        (0..config.n_estimators).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let trees = (0..config.n_estimators).map(one).collect();
    Ok(Forest { trees })
}
