use rand::Rng as _;

use crate::config::{key, Configurable, KvConfig};
use crate::error::{Error, Result};
use crate::rng;
use crate::sage::{adam_step, AdamState};
use crate::skipgram::{log_sigmoid, sigmoid};

use super::{Dataset, Scorer, StandardScaler};

#[derive(Clone, Debug, PartialEq)]
pub struct MlpConfig {
    /// Hidden width; 0 connects inputs straight to the output unit.
    pub hidden_dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden_dim: 32,
            epochs: 300,
            learning_rate: 0.01,
            seed: 1,
        }
    }
}

impl Configurable for MlpConfig {
    fn apply(&mut self, cfg: &KvConfig, p: &str) -> Result<()> {
        cfg.read(&key(p, "hidden_dim"), &mut self.hidden_dim)?;
        cfg.read(&key(p, "epochs"), &mut self.epochs)?;
        cfg.read(&key(p, "learning_rate"), &mut self.learning_rate)?;
        cfg.read(&key(p, "seed"), &mut self.seed)?;
        if !(self.learning_rate > 0.0) {
            return Err(Error::config("MLP learning rate must be positive"));
        }
        Ok(())
    }

    fn echo(&self, p: &str) -> Vec<(String, String)> {
        vec![
            (key(p, "hidden_dim"), self.hidden_dim.to_string()),
            (key(p, "epochs"), self.epochs.to_string()),
            (key(p, "learning_rate"), self.learning_rate.to_string()),
            (key(p, "seed"), self.seed.to_string()),
        ]
    }
}

/// Parameters laid out flat: `W1` (hidden × d, row-major), `b1`, `w2`,
/// `b2`. With no hidden layer: `w` (d), `b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    pub scaler: StandardScaler,
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub theta: Vec<f64>,
}

pub(crate) fn param_count(d: usize, h: usize) -> usize {
    if h == 0 {
        d + 1
    } else {
        h * d + h + h + 1
    }
}

fn logit(theta: &[f64], d: usize, h: usize, x: &[f64], hidden: &mut Vec<f64>) -> f64 {
    if h == 0 {
        return theta[..d].iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + theta[d];
    }
    let (w1, rest) = theta.split_at(h * d);
    let (b1, rest) = rest.split_at(h);
    let (w2, b2) = rest.split_at(h);
    hidden.clear();
    for k in 0..h {
        let a = w1[k * d..(k + 1) * d]
            .iter()
            .zip(x)
            .map(|(w, v)| w * v)
            .sum::<f64>()
            + b1[k];
        hidden.push(a);
    }
    hidden
        .iter()
        .zip(w2)
        .map(|(a, w)| a.max(0.0) * w)
        .sum::<f64>()
        + b2[0]
}

/// Mean log-loss over `rows` (used as given) and its gradient.
pub fn mlp_loss_and_grad(
    theta: &[f64],
    d: usize,
    h: usize,
    rows: &[Vec<f64>],
    labels: &[u8],
) -> (f64, Vec<f64>) {
    let n = rows.len().max(1) as f64;
    let mut grad = vec![0.0; theta.len()];
    let mut loss = 0.0;
    let mut hidden = Vec::with_capacity(h);
    for (x, &y) in rows.iter().zip(labels) {
        let s = logit(theta, d, h, x, &mut hidden);
        let y = y as f64;
        loss -= y * log_sigmoid(s) + (1.0 - y) * log_sigmoid(-s);
        let ds = (sigmoid(s) - y) / n;
        if h == 0 {
            for i in 0..d {
                grad[i] += ds * x[i];
            }
            grad[d] += ds;
            continue;
        }
        let w2 = &theta[h * d + h..h * d + 2 * h];
        for k in 0..h {
            let a = hidden[k];
            grad[h * d + h + k] += ds * a.max(0.0);
            if a > 0.0 {
                let da = ds * w2[k];
                for i in 0..d {
                    grad[k * d + i] += da * x[i];
                }
                grad[h * d + k] += da;
            }
        }
        grad[h * d + 2 * h] += ds;
    }
    (loss / n, grad)
}

impl Mlp {
    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        sigmoid(self.score(x))
    }
}

impl Scorer for Mlp {
    fn score(&self, x: &[f64]) -> f64 {
        let z = self.scaler.transform(x);
        logit(
            &self.theta,
            self.input_dim,
            self.hidden_dim,
            &z,
            &mut Vec::new(),
        )
    }
}

/// Full-batch ADAM on standardised features. Returns the network and the
/// loss per epoch.
pub fn train_mlp(data: &Dataset, config: &MlpConfig) -> Result<(Mlp, Vec<f64>)> {
    data.require_both_classes()?;
    let d = data.dim();
    let h = config.hidden_dim;
    let scaler = StandardScaler::fit(&data.features);
    let rows = scaler.transform_all(&data.features);
    let mut theta = vec![0.0; param_count(d, h)];
    if h > 0 {
        let mut r = rng::stream(config.seed, &[0x31f]);
        let l1 = (6.0 / (d + h) as f64).sqrt();
        for w in &mut theta[..h * d] {
            *w = r.random_range(-l1..=l1);
        }
        let l2 = (6.0 / (h + 1) as f64).sqrt();
        for w in &mut theta[h * d + h..h * d + 2 * h] {
            *w = r.random_range(-l2..=l2);
        }
    }
    let mut adam = AdamState::with_alpha(theta.len(), config.learning_rate);
    let mut losses = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        let (loss, grad) = mlp_loss_and_grad(&theta, d, h, &rows, &data.labels);
        losses.push(loss);
        adam_step(&mut theta, &grad, &mut adam)?;
    }
    Ok((
        Mlp {
            scaler,
            input_dim: d,
            hidden_dim: h,
            theta,
        },
        losses,
    ))
}
