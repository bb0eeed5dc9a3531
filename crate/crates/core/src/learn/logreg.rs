use crate::config::{key, Configurable, KvConfig};
use crate::error::{Error, Result};
use crate::skipgram::{log_sigmoid, sigmoid};

use super::{Dataset, Scorer, StandardScaler};

#[derive(Clone, Debug, PartialEq)]
pub struct LogRegConfig {
    pub l2: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    /// Unused by full-batch descent; kept so every classifier takes a seed.
    pub seed: u64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self {
            l2: 1e-3,
            epochs: 300,
            learning_rate: 0.1,
            seed: 1,
        }
    }
}

impl Configurable for LogRegConfig {
    fn apply(&mut self, cfg: &KvConfig, p: &str) -> Result<()> {
        cfg.read(&key(p, "l2"), &mut self.l2)?;
        cfg.read(&key(p, "epochs"), &mut self.epochs)?;
        cfg.read(&key(p, "learning_rate"), &mut self.learning_rate)?;
        cfg.read(&key(p, "seed"), &mut self.seed)?;
        if self.l2 < 0.0 || !(self.learning_rate > 0.0) {
            return Err(Error::config(
                "logistic l2 must be ≥ 0 and learning rate > 0",
            ));
        }
        Ok(())
    }

    fn echo(&self, p: &str) -> Vec<(String, String)> {
        vec![
            (key(p, "l2"), self.l2.to_string()),
            (key(p, "epochs"), self.epochs.to_string()),
            (key(p, "learning_rate"), self.learning_rate.to_string()),
            (key(p, "seed"), self.seed.to_string()),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogReg {
    pub scaler: StandardScaler,
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl LogReg {
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.logit(x))
    }

    fn logit(&self, x: &[f64]) -> f64 {
        let z = self.scaler.transform(x);
        z.iter().zip(&self.weights).map(|(a, b)| a * b).sum::<f64>() + self.bias
    }
}

impl Scorer for LogReg {
    fn score(&self, x: &[f64]) -> f64 {
        self.logit(x)
    }
}

/// Mean log-loss plus `l2/2 ‖w‖²`, with gradients w.r.t. `w` and `b`.
/// Rows are used as given (no scaling).
pub fn logreg_loss_and_grad(
    w: &[f64],
    b: f64,
    rows: &[Vec<f64>],
    labels: &[u8],
    l2: f64,
) -> (f64, Vec<f64>, f64) {
    let n = rows.len().max(1) as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for (x, &y) in rows.iter().zip(labels) {
        let s = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() + b;
        let y = y as f64;
        loss -= y * log_sigmoid(s) + (1.0 - y) * log_sigmoid(-s);
        let d = (sigmoid(s) - y) / n;
        for (g, xi) in gw.iter_mut().zip(x) {
            *g += d * xi;
        }
        gb += d;
    }
    loss /= n;
    loss += 0.5 * l2 * w.iter().map(|x| x * x).sum::<f64>();
    for (g, wi) in gw.iter_mut().zip(w) {
        *g += l2 * wi;
    }
    (loss, gw, gb)
}

/// Full-batch gradient descent on standardised features. The penalty is
/// applied as an implicit step, `w ← (w − lr·∇data) / (1 + lr·l2)`, which
/// stays stable for any `l2`. Returns the model and the loss per epoch.
pub fn train_logreg(data: &Dataset, config: &LogRegConfig) -> Result<(LogReg, Vec<f64>)> {
    data.require_both_classes()?;
    let scaler = StandardScaler::fit(&data.features);
    let rows = scaler.transform_all(&data.features);
    let mut w = vec![0.0; data.dim()];
    let mut b = 0.0;
    let mut losses = Vec::with_capacity(config.epochs);
    let lr = config.learning_rate;
    for _ in 0..config.epochs {
        let (loss, gw, gb) = logreg_loss_and_grad(&w, b, &rows, &data.labels, 0.0);
        losses.push(loss + 0.5 * config.l2 * w.iter().map(|x| x * x).sum::<f64>());
        for (wi, g) in w.iter_mut().zip(&gw) {
            *wi = (*wi - lr * g) / (1.0 + lr * config.l2);
        }
        b -= lr * gb;
    }
    Ok((
        LogReg {
            scaler,
            weights: w,
            bias: b,
        },
        losses,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learn::roc_auc;

    fn separable() -> Dataset {
        let xs = [-3.0, -2.0, -1.5, -0.5, 0.5, 1.0, 2.5, 3.0];
        Dataset::new(
            xs.iter().map(|&x| vec![x]).collect(),
            xs.iter().map(|&x| (x > 0.0) as u8).collect(),
        )
        .unwrap()
    }

    #[test]
    fn separable_data_is_ranked_perfectly() {
        let d = separable();
        let (m, losses) = train_logreg(&d, &LogRegConfig::default()).unwrap();
        assert_eq!(
            roc_auc(&m.score_all(&d.features), &d.labels).unwrap().auc,
            1.0
        );
        assert!(losses.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn heavy_penalty_predicts_the_prior() {
        let mut d = separable();
        d.labels[0] = 1; // prior 5/8
        let cfg = LogRegConfig {
            l2: 1e9,
            epochs: 2000,
            ..Default::default()
        };
        let (m, _) = train_logreg(&d, &cfg).unwrap();
        assert!(m.weights.iter().all(|w| w.abs() < 1e-8));
        assert!((m.predict_proba(&[0.3]) - 5.0 / 8.0).abs() < 1e-6);
    }

    #[test]
    fn single_class_is_an_error() {
        let d = Dataset::new(vec![vec![1.0], vec![2.0]], vec![0, 0]).unwrap();
        assert!(train_logreg(&d, &LogRegConfig::default()).is_err());
    }
}
