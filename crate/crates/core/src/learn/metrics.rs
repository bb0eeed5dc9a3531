use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct RocSummary {
    /// `(threshold, fpr, tpr)` from the strictest threshold down; the first
    /// point is `(+∞, 0, 0)` and the last `(min score, 1, 1)`.
    pub points: Vec<(f64, f64, f64)>,
    pub auc: f64,
}

impl RocSummary {
    /// Trapezoidal area under the curve points.
    pub fn trapezoid(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) * (w[1].2 + w[0].2) / 2.0)
            .sum()
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("threshold\tfpr\ttpr\n");
        for (t, f, p) in &self.points {
            s.push_str(&format!("{t}\t{f}\t{p}\n"));
        }
        s.push_str(&format!("# auc\t{}\n", self.auc));
        s
    }
}

/// ROC curve and AUC. The AUC is the Mann-Whitney statistic with midranks,
/// so tied scores earn half credit.
pub fn roc_auc(scores: &[f64], labels: &[u8]) -> Result<RocSummary> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch(scores.len(), labels.len()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::data("NaN score"));
    }
    let p = labels.iter().filter(|&&y| y == 1).count();
    let n = labels.len() - p;
    if p == 0 || n == 0 {
        return Err(Error::data("ROC needs both classes"));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // ascending midranks (1-based)
    let mut rank_sum_pos = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            if labels[k] == 1 {
                rank_sum_pos += mid;
            }
        }
        i = j + 1;
    }
    let (pf, nf) = (p as f64, n as f64);
    let auc = (rank_sum_pos - pf * (pf + 1.0) / 2.0) / (pf * nf);

    let mut points = vec![(f64::INFINITY, 0.0, 0.0)];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut k = order.len();
    while k > 0 {
        let s = scores[order[k - 1]];
        while k > 0 && scores[order[k - 1]] == s {
            if labels[order[k - 1]] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
            k -= 1;
        }
        points.push((s, fp as f64 / nf, tp as f64 / pf));
    }
    Ok(RocSummary { points, auc })
}

/// `0.9 · min(sd, IQR/1.34) · n^(−1/5)`, falling back to the sample SD
/// when the IQR is zero and to 1 when the samples have no spread.
pub fn silverman_bandwidth(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 1.0;
    }
    let mean = samples.iter().sum::<f64>() / n as f64;
    let sd = (samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64).sqrt();
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = (n - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        s[lo] + (h - lo as f64) * (s[hi] - s[lo])
    };
    let iqr = q(0.75) - q(0.25);
    let spread = if iqr > 0.0 { sd.min(iqr / 1.34) } else { sd };
    if spread > 0.0 {
        0.9 * spread * (n as f64).powf(-0.2)
    } else {
        1.0
    }
}

/// Gaussian kernel density at each grid point.
pub fn kde(samples: &[f64], bandwidth: Option<f64>, grid: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::data("KDE needs at least one sample"));
    }
    let h = bandwidth.unwrap_or_else(|| silverman_bandwidth(samples));
    if !(h > 0.0) {
        return Err(Error::config("KDE bandwidth must be positive"));
    }
    let norm = 1.0 / (samples.len() as f64 * h * (2.0 * PI).sqrt());
    Ok(grid
        .iter()
        .map(|&x| {
            norm * samples
                .iter()
                .map(|&s| (-0.5 * ((x - s) / h).powi(2)).exp())
                .sum::<f64>()
        })
        .collect())
}

pub fn kde_tsv(grid: &[f64], density: &[f64]) -> String {
    let mut s = String::from("x\tdensity\n");
    for (x, d) in grid.iter().zip(density) {
        s.push_str(&format!("{x}\t{d}\n"));
    }
    s
}
