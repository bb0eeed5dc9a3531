use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::learn::RocSummary;

/// Outcome of one pipeline run.
///
/// The TSV form holds everything except the wall time, so reruns with the
/// same seed and configuration produce identical bytes.
#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub method: String,
    pub classifier: String,
    pub seed: u64,
    /// Target adverse event, for per-event runs.
    pub target: Option<String>,
    pub auc: f64,
    pub n_train: usize,
    pub n_test: usize,
    pub roc: RocSummary,
    /// Where the ROC table was written, if it was.
    pub roc_path: Option<String>,
    pub wall_seconds: f64,
    pub config: Vec<(String, String)>,
}

impl RunReport {
    /// Stable file stem, e.g. `metapath_logistic_seed1`.
    pub fn stem(&self) -> String {
        let mut s = format!("{}_{}_seed{}", self.method, self.classifier, self.seed);
        if let Some(t) = &self.target {
            s.push('_');
            s.extend(
                t.chars()
                    .map(|c| if c.is_ascii_alphanumeric() { c } else { '-' }),
            );
        }
        s
    }

    pub fn to_tsv(&self) -> String {
        let mut s = String::from("key\tvalue\n");
        let mut row = |k: &str, v: &str| {
            s.push_str(k);
            s.push('\t');
            s.push_str(v);
            s.push('\n');
        };
        row("method", &self.method);
        row("classifier", &self.classifier);
        row("seed", &self.seed.to_string());
        row("target", self.target.as_deref().unwrap_or(""));
        row("auc", &self.auc.to_string());
        row("n_train", &self.n_train.to_string());
        row("n_test", &self.n_test.to_string());
        row("roc_path", self.roc_path.as_deref().unwrap_or(""));
        for (k, v) in &self.config {
            row(&format!("config.{k}"), v);
        }
        s
    }

    /// Reads a report back from [`RunReport::to_tsv`] output. ROC points and
    /// the wall time are not part of the format and come back empty.
    pub fn parse_tsv(text: &str) -> Result<RunReport> {
        let mut fields: BTreeMap<&str, &str> = BTreeMap::new();
        let mut config = Vec::new();
        for (i, line) in text.lines().enumerate().skip(1) {
            let (k, v) = line.split_once('\t').ok_or_else(|| Error::Row {
                line: i as u64 + 1,
                message: "expected key<TAB>value".into(),
            })?;
            match k.strip_prefix("config.") {
                Some(c) => config.push((c.to_string(), v.to_string())),
                None => {
                    fields.insert(k, v);
                }
            }
        }
        let get = |k: &str| {
            fields
                .get(k)
                .copied()
                .ok_or_else(|| Error::MissingColumn(k.to_string()))
        };
        let num = |k: &str| -> Result<f64> {
            get(k)?
                .parse()
                .map_err(|_| Error::data(format!("bad `{k}` in report")))
        };
        let opt = |k: &str| {
            fields
                .get(k)
                .filter(|v| !v.is_empty())
                .map(|v| v.to_string())
        };
        let auc = num("auc")?;
        Ok(RunReport {
            method: get("method")?.to_string(),
            classifier: get("classifier")?.to_string(),
            seed: num("seed")? as u64,
            target: opt("target"),
            auc,
            n_train: num("n_train")? as usize,
            n_test: num("n_test")? as usize,
            roc: RocSummary {
                points: Vec::new(),
                auc,
            },
            roc_path: opt("roc_path"),
            wall_seconds: 0.0,
            config,
        })
    }
}

/// One row of the comparison table.
#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub method: String,
    pub classifier: String,
    /// `(seed, auc)` in first-seen order; per-event runs of one seed are
    /// averaged into one value.
    pub runs: Vec<(u64, f64)>,
    pub mean: f64,
    /// Sample standard deviation; `None` for a single run.
    pub sd: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonTable {
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonTable {
    pub fn row(&self, method: &str, classifier: &str) -> Option<&ComparisonRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.classifier == classifier)
    }

    /// Values rounded to three decimals.
    pub fn to_tsv(&self) -> String {
        let runs = self.rows.iter().map(|r| r.runs.len()).max().unwrap_or(0);
        let mut s = String::from("method\tclassifier");
        for i in 1..=runs {
            s.push_str(&format!("\trun_{i}"));
        }
        s.push_str("\tmean\tsd\n");
        for r in &self.rows {
            s.push_str(&format!("{}\t{}", r.method, r.classifier));
            for i in 0..runs {
                match r.runs.get(i) {
                    Some((_, a)) => s.push_str(&format!("\t{a:.3}")),
                    None => s.push('\t'),
                }
            }
            s.push_str(&format!("\t{:.3}\t", r.mean));
            if let Some(sd) = r.sd {
                s.push_str(&format!("{sd:.3}"));
            }
            s.push('\n');
        }
        s
    }
}

/// Groups reports by (method, classifier) and summarises the AUCs.
pub fn compare_report(reports: &[RunReport]) -> ComparisonTable {
    // (method, classifier, per-seed AUCs)
    type Group = (String, String, Vec<(u64, Vec<f64>)>);
    let mut rows: Vec<Group> = Vec::new();
    for r in reports {
        let pos = match rows
            .iter()
            .position(|(m, c, _)| *m == r.method && *c == r.classifier)
        {
            Some(p) => p,
            None => {
                rows.push((r.method.clone(), r.classifier.clone(), Vec::new()));
                rows.len() - 1
            }
        };
        let seeds = &mut rows[pos].2;
        match seeds.iter_mut().find(|(s, _)| *s == r.seed) {
            Some((_, v)) => v.push(r.auc),
            None => seeds.push((r.seed, vec![r.auc])),
        }
    }
    let rows = rows
        .into_iter()
        .map(|(method, classifier, seeds)| {
            let runs: Vec<(u64, f64)> = seeds
                .into_iter()
                .map(|(s, v)| (s, v.iter().sum::<f64>() / v.len() as f64))
                .collect();
            let n = runs.len() as f64;
            let mean = runs.iter().map(|r| r.1).sum::<f64>() / n;
            let sd = (runs.len() > 1).then(|| {
                (runs.iter().map(|r| (r.1 - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
            });
            ComparisonRow {
                method,
                classifier,
                runs,
                mean,
                sd,
            }
        })
        .collect();
    ComparisonTable { rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn report(method: &str, seed: u64, auc: f64) -> RunReport {
        RunReport {
            method: method.into(),
            classifier: "logistic".into(),
            seed,
            target: None,
            auc,
            n_train: 10,
            n_test: 4,
            roc: RocSummary {
                points: vec![],
                auc,
            },
            roc_path: None,
            wall_seconds: 1.5,
            config: vec![("walk.length".into(), "40".into())],
        }
    }

    #[test]
    fn three_runs_at_three_decimals() {
        let t = compare_report(&[
            report("m", 1, 0.857),
            report("m", 2, 0.857),
            report("m", 3, 0.848),
        ]);
        let r = &t.rows[0];
        assert_eq!(format!("{:.3}", r.mean), "0.854");
        assert_eq!(format!("{:.3}", r.sd.unwrap()), "0.005");
        assert_eq!(
            t.to_tsv(),
            "method\tclassifier\trun_1\trun_2\trun_3\tmean\tsd\nm\tlogistic\t0.857\t0.857\t0.848\t0.854\t0.005\n"
        );
    }

    #[test]
    fn constant_runs_and_single_run() {
        let t = compare_report(&[
            report("a", 1, 0.8),
            report("a", 2, 0.8),
            report("a", 3, 0.8),
            report("b", 1, 0.7),
        ]);
        let a = t.row("a", "logistic").unwrap();
        assert!((a.mean - 0.8).abs() < 1e-12 && a.sd.unwrap() < 1e-12);
        assert!(t
            .to_tsv()
            .contains("a\tlogistic\t0.800\t0.800\t0.800\t0.800\t0.000\n"));
        let b = t.row("b", "logistic").unwrap();
        assert_eq!(b.sd, None);
        assert!(t.to_tsv().ends_with("b\tlogistic\t0.700\t\t\t0.700\t\n"));
    }

    #[test]
    fn per_event_runs_average_within_seed() {
        let mut a = report("kernel", 1, 0.6);
        a.target = Some("AE_1".into());
        let mut b = report("kernel", 1, 0.8);
        b.target = Some("AE_2".into());
        let t = compare_report(&[a, b]);
        assert_eq!(t.rows[0].runs.len(), 1);
        assert!((t.rows[0].runs[0].1 - 0.7).abs() < 1e-12);
    }

    #[test]
    fn tsv_round_trip_ignores_wall_time() {
        let mut r = report("metapath", 2, 0.75);
        r.target = Some("AE_x y".into());
        let text = r.to_tsv();
        let mut slower = r.clone();
        slower.wall_seconds = 99.0;
        assert_eq!(slower.to_tsv(), text);
        let back = RunReport::parse_tsv(&text).unwrap();
        assert_eq!(back.to_tsv(), text);
        assert_eq!(r.stem(), "metapath_logistic_seed2_AE-x-y");
    }
}
