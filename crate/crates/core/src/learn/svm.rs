use std::fmt;
use std::str::FromStr;

use crate::config::{key, Configurable, KvConfig};
use crate::error::{Error, Result};
use crate::kernels::{psd_check, GramMatrix};

use super::{Dataset, Scorer, StandardScaler};

const TAU: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SvmKernel {
    Linear,
    Rbf,
}

impl FromStr for SvmKernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Self::Linear),
            "rbf" => Ok(Self::Rbf),
            other => Err(Error::config(format!("unknown SVM kernel `{other}`"))),
        }
    }
}

impl fmt::Display for SvmKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Linear => "linear",
            Self::Rbf => "rbf",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SvmConfig {
    pub c: f64,
    pub kernel: SvmKernel,
    /// RBF width; 0 means `1 / n_features` on standardised features.
    pub gamma: f64,
    /// Stop when the maximal KKT violation falls below this.
    pub tol: f64,
    /// Cap on solver work, in multiples of the training-set size.
    pub max_passes: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            kernel: SvmKernel::Rbf,
            gamma: 0.0,
            tol: 1e-3,
            max_passes: 10_000,
        }
    }
}

impl Configurable for SvmConfig {
    fn apply(&mut self, cfg: &KvConfig, p: &str) -> Result<()> {
        cfg.read(&key(p, "c"), &mut self.c)?;
        cfg.read(&key(p, "kernel"), &mut self.kernel)?;
        cfg.read(&key(p, "gamma"), &mut self.gamma)?;
        cfg.read(&key(p, "tol"), &mut self.tol)?;
        cfg.read(&key(p, "max_passes"), &mut self.max_passes)?;
        if !(self.c > 0.0) || self.gamma < 0.0 || !(self.tol > 0.0) {
            return Err(Error::config("SVM needs C > 0, gamma ≥ 0 and tol > 0"));
        }
        Ok(())
    }

    fn echo(&self, p: &str) -> Vec<(String, String)> {
        vec![
            (key(p, "c"), self.c.to_string()),
            (key(p, "kernel"), self.kernel.to_string()),
            (key(p, "gamma"), self.gamma.to_string()),
            (key(p, "tol"), self.tol.to_string()),
            (key(p, "max_passes"), self.max_passes.to_string()),
        ]
    }
}

/// Dual solution over a precomputed kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSvm {
    pub alpha: Vec<f64>,
    /// Labels as ±1.
    pub y: Vec<f64>,
    pub bias: f64,
    pub c: f64,
}

impl KernelSvm {
    /// `Σ αᵢ yᵢ k(xᵢ, x) + b`, given kernel values against every training row.
    pub fn decision(&self, k_row: &[f64]) -> f64 {
        self.alpha
            .iter()
            .zip(&self.y)
            .zip(k_row)
            .filter(|((a, _), _)| **a > 0.0)
            .map(|((a, y), k)| a * y * k)
            .sum::<f64>()
            + self.bias
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.alpha.len())
            .filter(|&i| self.alpha[i] > 0.0)
            .collect()
    }
}

/// SMO with maximal-violating-pair selection on
/// `min ½ αᵀQα − Σα, 0 ≤ α ≤ C, yᵀα = 0`.
fn smo(k: &[f64], n: usize, y: &[f64], c: f64, tol: f64, max_iter: usize) -> KernelSvm {
    let q = |i: usize, j: usize| y[i] * y[j] * k[i * n + j];
    let mut alpha = vec![0.0; n];
    let mut g = vec![-1.0; n];
    let up = |a: f64, yi: f64| (yi > 0.0 && a < c) || (yi < 0.0 && a > 0.0);
    let low = |a: f64, yi: f64| (yi > 0.0 && a > 0.0) || (yi < 0.0 && a < c);
    for _ in 0..max_iter {
        let mut i = usize::MAX;
        let mut gmax = f64::NEG_INFINITY;
        let mut j = usize::MAX;
        let mut gmin = f64::INFINITY;
        for t in 0..n {
            let v = -y[t] * g[t];
            if up(alpha[t], y[t]) && v > gmax {
                gmax = v;
                i = t;
            }
            if low(alpha[t], y[t]) && v < gmin {
                gmin = v;
                j = t;
            }
        }
        if i == usize::MAX || j == usize::MAX || gmax - gmin < tol {
            break;
        }
        let (ai, aj) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let mut quad = q(i, i) + q(j, j) + 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (-g[i] - g[j]) / quad;
            let diff = ai - aj;
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let mut quad = q(i, i) + q(j, j) - 2.0 * q(i, j);
            if quad <= 0.0 {
                quad = TAU;
            }
            let delta = (g[i] - g[j]) / quad;
            let sum = ai + aj;
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - ai, alpha[j] - aj);
        for (t, gt) in g.iter_mut().enumerate() {
            *gt += q(i, t) * di + q(j, t) * dj;
        }
    }

    // bias from free vectors, or the midpoint of the feasible interval
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut sum_free, mut n_free) = (0.0, 0usize);
    for t in 0..n {
        let yg = y[t] * g[t];
        if alpha[t] >= c {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if alpha[t] <= 0.0 {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / n_free as f64
    } else {
        (ub + lb) / 2.0
    };
    KernelSvm {
        alpha,
        y: y.to_vec(),
        bias: -rho,
        c,
    }
}

fn signs(labels: &[u8]) -> Result<Vec<f64>> {
    let y: Vec<f64> = labels
        .iter()
        .map(|&l| if l == 1 { 1.0 } else { -1.0 })
        .collect();
    if !y.contains(&1.0) || !y.contains(&-1.0) {
        return Err(Error::data("SVM needs both classes"));
    }
    Ok(y)
}

/// Soft-margin SVM on a square train×train Gram matrix. Rejects matrices
/// that are not PSD within `1e-8 · trace`.
pub fn train_svm_precomputed(
    gram: &GramMatrix,
    labels: &[u8],
    config: &SvmConfig,
) -> Result<KernelSvm> {
    if gram.rows != gram.cols {
        return Err(Error::LengthMismatch(gram.rows, gram.cols));
    }
    if gram.rows != labels.len() {
        return Err(Error::LengthMismatch(gram.rows, labels.len()));
    }
    let y = signs(labels)?;
    let (ok, min_eigenvalue) = psd_check(&gram.values, gram.rows, 1e-8)?;
    if !ok {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    let n = gram.rows;
    Ok(smo(
        &gram.values,
        n,
        &y,
        config.c,
        config.tol,
        config.max_passes.saturating_mul(n.max(1)),
    ))
}

/// SVM on feature vectors with a linear or RBF kernel.
#[derive(Clone, Debug, PartialEq)]
pub struct SvmModel {
    pub scaler: StandardScaler,
    pub kernel: SvmKernel,
    pub gamma: f64,
    pub support_rows: Vec<Vec<f64>>,
    pub dual: KernelSvm,
}

fn kernel_fn(kind: SvmKernel, gamma: f64, a: &[f64], b: &[f64]) -> f64 {
    match kind {
        SvmKernel::Linear => a.iter().zip(b).map(|(x, y)| x * y).sum(),
        SvmKernel::Rbf => {
            (-gamma * a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>()).exp()
        }
    }
}

impl SvmModel {
    pub fn decision(&self, x: &[f64]) -> f64 {
        let z = self.scaler.transform(x);
        let row: Vec<f64> = self
            .support_rows
            .iter()
            .map(|s| kernel_fn(self.kernel, self.gamma, s, &z))
            .collect();
        self.dual.decision(&row)
    }
}

impl Scorer for SvmModel {
    fn score(&self, x: &[f64]) -> f64 {
        self.decision(x)
    }
}

pub fn train_svm(data: &Dataset, config: &SvmConfig) -> Result<SvmModel> {
    let y = signs(&data.labels)?;
    let scaler = StandardScaler::fit(&data.features);
    let rows = scaler.transform_all(&data.features);
    let gamma = if config.gamma > 0.0 {
        config.gamma
    } else {
        1.0 / data.dim().max(1) as f64
    };
    let n = rows.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = kernel_fn(config.kernel, gamma, &rows[i], &rows[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    let full = smo(
        &k,
        n,
        &y,
        config.c,
        config.tol,
        config.max_passes.saturating_mul(n.max(1)),
    );
    // keep only support vectors
    let support = full.support();
    let dual = KernelSvm {
        alpha: support.iter().map(|&i| full.alpha[i]).collect(),
        y: support.iter().map(|&i| full.y[i]).collect(),
        bias: full.bias,
        c: full.c,
    };
    Ok(SvmModel {
        scaler,
        kernel: config.kernel,
        gamma,
        support_rows: support.iter().map(|&i| rows[i].clone()).collect(),
        dual,
    })
}
