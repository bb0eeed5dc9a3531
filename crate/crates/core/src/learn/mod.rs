//! Classifiers and evaluation metrics shared by the pipelines.

mod logreg;
mod metrics;
mod mlp;
mod svm;
mod tree;

use std::fmt;

pub use logreg::{logreg_loss_and_grad, train_logreg, LogReg, LogRegConfig};
pub use metrics::{kde, kde_tsv, roc_auc, silverman_bandwidth, RocSummary};
pub use mlp::{mlp_loss_and_grad, train_mlp, Mlp, MlpConfig};
pub use svm::{train_svm, train_svm_precomputed, KernelSvm, SvmConfig, SvmKernel, SvmModel};
pub use tree::{
    train_forest, train_tree, DecisionTree, Forest, ForestConfig, MaxFeatures, TreeConfig,
};

use crate::config::{key, Configurable, KvConfig};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
    pub ids: Vec<String>,
}

impl Dataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<u8>) -> Result<Self> {
        let ids = (0..labels.len()).map(|i| i.to_string()).collect();
        Self::with_ids(features, labels, ids)
    }

    pub fn with_ids(features: Vec<Vec<f64>>, labels: Vec<u8>, ids: Vec<String>) -> Result<Self> {
        if features.len() != labels.len() {
            return Err(Error::LengthMismatch(features.len(), labels.len()));
        }
        if ids.len() != labels.len() {
            return Err(Error::LengthMismatch(ids.len(), labels.len()));
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(Error::data("labels must be 0 or 1"));
        }
        if let Some(d) = features.first().map(Vec::len) {
            if let Some(bad) = features.iter().find(|r| r.len() != d) {
                return Err(Error::LengthMismatch(d, bad.len()));
            }
        }
        Ok(Self {
            features,
            labels,
            ids,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map(Vec::len).unwrap_or(0)
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }

    pub(crate) fn require_both_classes(&self) -> Result<()> {
        let p = self.positives();
        if p == 0 || p == self.len() {
            return Err(Error::data("training data needs both classes"));
        }
        Ok(())
    }

    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset {
            features: idx.iter().map(|&i| self.features[i].clone()).collect(),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            ids: idx.iter().map(|&i| self.ids[i].clone()).collect(),
        }
    }
}

/// Per-feature standardisation fitted on training rows only. Constant
/// features keep scale 1.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardScaler {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl StandardScaler {
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let d = rows.first().map(Vec::len).unwrap_or(0);
        let n = rows.len().max(1) as f64;
        let mut mean = vec![0.0; d];
        for r in rows {
            for (m, x) in mean.iter_mut().zip(r) {
                *m += x / n;
            }
        }
        let mut var = vec![0.0; d];
        for r in rows {
            for ((v, x), m) in var.iter_mut().zip(r).zip(&mean) {
                *v += (x - m) * (x - m) / n;
            }
        }
        let scale = var
            .into_iter()
            .map(|v| if v > 1e-24 { v.sqrt() } else { 1.0 })
            .collect();
        Self { mean, scale }
    }

    pub fn identity(d: usize) -> Self {
        Self {
            mean: vec![0.0; d],
            scale: vec![1.0; d],
        }
    }

    pub fn transform(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((x, m), s)| (x - m) / s)
            .collect()
    }

    pub fn transform_all(&self, rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform(r)).collect()
    }
}

/// A fitted binary classifier. Larger scores mean "more likely positive".
pub trait Scorer: Send + Sync {
    fn score(&self, x: &[f64]) -> f64;

    fn score_all(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        rows.iter().map(|r| self.score(r)).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ClassifierSpec {
    Logistic(LogRegConfig),
    Tree(TreeConfig),
    Forest(ForestConfig),
    Svm(SvmConfig),
    Mlp(MlpConfig),
}

impl ClassifierSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Logistic(_) => "logistic",
            Self::Tree(_) => "tree",
            Self::Forest(_) => "forest",
            Self::Svm(_) => "svm",
            Self::Mlp(_) => "mlp",
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "logistic" => Self::Logistic(LogRegConfig::default()),
            "tree" => Self::Tree(TreeConfig::default()),
            "forest" => Self::Forest(ForestConfig::default()),
            "svm" => Self::Svm(SvmConfig::default()),
            "mlp" => Self::Mlp(MlpConfig::default()),
            other => return Err(Error::config(format!("unknown classifier `{other}`"))),
        })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        match &mut self {
            Self::Logistic(c) => c.seed = seed,
            Self::Tree(_) | Self::Svm(_) => {}
            Self::Forest(c) => c.seed = seed,
            Self::Mlp(c) => c.seed = seed,
        }
        self
    }

    pub fn fit(&self, data: &Dataset) -> Result<Box<dyn Scorer>> {
        Ok(match self {
            Self::Logistic(c) => Box::new(train_logreg(data, c)?.0),
            Self::Tree(c) => Box::new(train_tree(data, c)?),
            Self::Forest(c) => Box::new(train_forest(data, c)?),
            Self::Svm(c) => Box::new(train_svm(data, c)?),
            Self::Mlp(c) => Box::new(train_mlp(data, c)?.0),
        })
    }
}

impl fmt::Display for ClassifierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Configurable for ClassifierSpec {
    fn apply(&mut self, cfg: &KvConfig, p: &str) -> Result<()> {
        match self {
            Self::Logistic(c) => c.apply(cfg, &key(p, "logistic")),
            Self::Tree(c) => c.apply(cfg, &key(p, "tree")),
            Self::Forest(c) => c.apply(cfg, &key(p, "forest")),
            Self::Svm(c) => c.apply(cfg, &key(p, "svm")),
            Self::Mlp(c) => c.apply(cfg, &key(p, "mlp")),
        }
    }

    fn echo(&self, p: &str) -> Vec<(String, String)> {
        match self {
            Self::Logistic(c) => c.echo(&key(p, "logistic")),
            Self::Tree(c) => c.echo(&key(p, "tree")),
            Self::Forest(c) => c.echo(&key(p, "forest")),
            Self::Svm(c) => c.echo(&key(p, "svm")),
            Self::Mlp(c) => c.echo(&key(p, "mlp")),
        }
    }
}

/// Picks the candidate with the best mean AUC under stratified k-fold
/// cross-validation on `data`. Returns its index and the per-candidate
/// mean AUCs.
pub fn grid_search(
    candidates: &[ClassifierSpec],
    data: &Dataset,
    folds: usize,
    seed: u64,
) -> Result<(usize, Vec<f64>)> {
    use rand::seq::SliceRandom;
    if candidates.is_empty() || folds < 2 {
        return Err(Error::config(
            "grid search needs candidates and at least 2 folds",
        ));
    }
    data.require_both_classes()?;
    let mut r = rng::stream(seed, &[0x961d]);
    let mut pos: Vec<usize> = (0..data.len()).filter(|&i| data.labels[i] == 1).collect();
    let mut neg: Vec<usize> = (0..data.len()).filter(|&i| data.labels[i] == 0).collect();
    pos.shuffle(&mut r);
    neg.shuffle(&mut r);
    let fold_of = |list: &[usize], f: usize| -> Vec<usize> {
        list.iter()
            .enumerate()
            .filter(|(k, _)| k % folds == f)
            .map(|(_, &i)| i)
            .collect()
    };
    let mut means = Vec::with_capacity(candidates.len());
    for spec in candidates {
        let mut total = 0.0;
        for f in 0..folds {
            let mut test = fold_of(&pos, f);
            test.extend(fold_of(&neg, f));
            let mut train: Vec<usize> = (0..data.len()).filter(|i| !test.contains(i)).collect();
            train.sort_unstable();
            test.sort_unstable();
            let model = spec.fit(&data.subset(&train))?;
            let held = data.subset(&test);
            total += roc_auc(&model.score_all(&held.features), &held.labels)?.auc;
        }
        means.push(total / folds as f64);
    }
    let best = means
        .iter()
        .enumerate()
        .fold(0, |b, (i, &m)| if m > means[b] { i } else { b });
    Ok((best, means))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaler_uses_training_statistics() {
        let s = StandardScaler::fit(&[vec![1.0, 5.0], vec![3.0, 5.0]]);
        assert_eq!(s.mean, vec![2.0, 5.0]);
        assert_eq!(s.scale, vec![1.0, 1.0]);
        assert_eq!(s.transform(&[4.0, 7.0]), vec![2.0, 2.0]);
    }

    #[test]
    fn dataset_validation() {
        assert!(Dataset::new(vec![vec![1.0]], vec![2]).is_err());
        assert!(Dataset::new(vec![vec![1.0], vec![1.0, 2.0]], vec![0, 1]).is_err());
        assert!(Dataset::new(vec![vec![1.0]], vec![0, 1]).is_err());
        let d = Dataset::new(vec![vec![1.0], vec![2.0]], vec![1, 1]).unwrap();
        assert!(d.require_both_classes().is_err());
    }

    #[test]
    fn grid_search_prefers_the_useful_model() {
        let features: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![(i % 2) as f64 + 0.01 * i as f64])
            .collect();
        let labels: Vec<u8> = (0..40).map(|i| (i % 2) as u8).collect();
        let data = Dataset::new(features, labels).unwrap();
        let cands = vec![
            ClassifierSpec::Tree(TreeConfig { max_depth: 0 }),
            ClassifierSpec::Tree(TreeConfig { max_depth: 2 }),
        ];
        let (best, means) = grid_search(&cands, &data, 3, 1).unwrap();
        assert_eq!(best, 1);
        assert_eq!(means[0], 0.5);
    }
}
