use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::time::Instant;

use rand::seq::SliceRandom;

use super::report::RunReport;
use super::split::EdgeSplit;
use crate::config::Configurable;
use crate::error::{Error, Result};
use crate::hetgraph::{GraphBuilder, HeteroGraph, NodeId};
use crate::ingest::labels::{ADVERSE_EVENT, BINODAL_EDGE};
use crate::ingest::{TrialRecord, TrialTerms, Vocabulary};
use crate::kernels::{gram_matrix, prepare_graphs, KernelConfig};
use crate::learn::{roc_auc, train_svm_precomputed, ClassifierSpec, Dataset, SvmConfig, SvmKernel};
use crate::rng;
use crate::sage::{predict_links, train_hinsage, SageConfig, SageParams};
use crate::skipgram::{embed_edge, train_embeddings, EdgeEmbedOp, SkipGramConfig};
use crate::walks::{generate_corpus, MetaPathSpec, WalkConfig};

/// Overlap between the evaluation items and each structure a model was
/// fitted on. Every count must be zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LeakageAudit {
    pub structures: Vec<(String, usize)>,
}

impl LeakageAudit {
    /// Records how many of `test` appear in `seen`.
    pub fn record<T: Eq + std::hash::Hash>(
        &mut self,
        structure: &str,
        test: &[T],
        seen: &HashSet<T>,
    ) {
        let hits = test.iter().filter(|t| seen.contains(t)).count();
        self.structures.push((structure.to_string(), hits));
    }

    pub fn check(&self) -> Result<()> {
        let leaks: Vec<String> = self
            .structures
            .iter()
            .filter(|(_, n)| *n > 0)
            .map(|(s, n)| format!("{n} test items in {s}"))
            .collect();
        if leaks.is_empty() {
            Ok(())
        } else {
            Err(Error::data(format!("test leakage: {}", leaks.join(", "))))
        }
    }
}

/// A finished run: its report plus the test scores it was computed from.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub report: RunReport,
    pub scores: Vec<f64>,
    pub labels: Vec<u8>,
    pub audit: LeakageAudit,
    /// Trained HinSAGE parameters, for checkpointing.
    pub model: Option<SageParams>,
}

struct Pending<'a> {
    method: &'a str,
    classifier: String,
    seed: u64,
    target: Option<String>,
    n_train: usize,
    config: Vec<(String, String)>,
    started: Instant,
}

impl Pending<'_> {
    fn finish(self, scores: Vec<f64>, labels: Vec<u8>, audit: LeakageAudit) -> Result<RunOutput> {
        audit.check()?;
        let roc = roc_auc(&scores, &labels)?;
        Ok(RunOutput {
            report: RunReport {
                method: self.method.to_string(),
                classifier: self.classifier,
                seed: self.seed,
                target: self.target,
                auc: roc.auc,
                n_train: self.n_train,
                n_test: labels.len(),
                roc,
                roc_path: None,
                wall_seconds: self.started.elapsed().as_secs_f64(),
                config: self.config,
            },
            scores,
            labels,
            audit,
            model: None,
        })
    }
}

fn unordered(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    (a.min(b), a.max(b))
}

fn pair_set(pairs: &[(NodeId, NodeId)]) -> HashSet<(NodeId, NodeId)> {
    pairs.iter().map(|&(a, b)| unordered(a, b)).collect()
}

fn unordered_all(pairs: &[(NodeId, NodeId)]) -> Vec<(NodeId, NodeId)> {
    pairs.iter().map(|&(a, b)| unordered(a, b)).collect()
}

fn split_echo(split: &EdgeSplit) -> Vec<(String, String)> {
    vec![
        ("split.edge_label".into(), split.edge_label.clone()),
        ("split.seed".into(), split.seed.to_string()),
        ("split.train_pos".into(), split.train_pos.len().to_string()),
        ("split.test_pos".into(), split.test_pos.len().to_string()),
    ]
}

/// Settings of the walk + skip-gram embedding stage.
#[derive(Clone, Debug, PartialEq)]
pub struct MetapathSettings {
    pub walk: WalkConfig,
    pub skipgram: SkipGramConfig,
    pub metapaths: Vec<MetaPathSpec>,
    pub edge_op: EdgeEmbedOp,
}

/// Walk corpus on the residual graph, skip-gram embeddings, edge features
/// by `edge_op`, then `classifier` on the training pairs.
pub fn run_metapath_pipeline(
    split: &EdgeSplit,
    settings: &MetapathSettings,
    classifier: &ClassifierSpec,
    seed: u64,
) -> Result<RunOutput> {
    let started = Instant::now();
    let walk = WalkConfig {
        seed,
        ..settings.walk.clone()
    };
    let sg = SkipGramConfig {
        seed,
        ..settings.skipgram.clone()
    };
    let classifier = classifier.clone().with_seed(seed);
    let corpus = generate_corpus(&split.residual, &settings.metapaths, &walk)?;
    let (table, _) = train_embeddings(&corpus, &sg)?;

    let features = |pairs: &[(NodeId, NodeId)]| -> Vec<Vec<f64>> {
        pairs
            .iter()
            .map(|&(a, b)| embed_edge(a, b, settings.edge_op, &table))
            .collect()
    };
    let (train_pairs, train_y) = split.train_pairs();
    let (test_pairs, test_y) = split.test_pairs();
    let model = classifier.fit(&Dataset::new(features(&train_pairs), train_y)?)?;
    let scores = model.score_all(&features(&test_pairs));

    let test_keys = unordered_all(&test_pairs);
    let mut audit = LeakageAudit::default();
    let walked: HashSet<_> = corpus
        .walks
        .iter()
        .flat_map(|w| w.windows(2).map(|s| unordered(s[0], s[1])))
        .collect();
    audit.record("walk corpus", &test_keys, &walked);
    audit.record("classifier rows", &test_keys, &pair_set(&train_pairs));
    let residual: HashSet<_> = split
        .residual
        .edges()
        .iter()
        .map(|e| unordered(e.u, e.v))
        .collect();
    audit.record("residual graph", &unordered_all(&split.test_pos), &residual);

    let mut config = split_echo(split);
    config.extend(walk.echo("walk"));
    config.extend(sg.echo("skipgram"));
    config.push(("embed.edge_op".into(), settings.edge_op.to_string()));
    config.push((
        "walk.metapaths".into(),
        settings
            .metapaths
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(" | "),
    ));
    config.extend(classifier.echo("classifier"));
    Pending {
        method: "metapath",
        classifier: classifier.name().to_string(),
        seed,
        target: None,
        n_train: train_pairs.len(),
        config,
        started,
    }
    .finish(scores, test_y, audit)
}

/// `(incidence, mean nonzero fraction)` per adverse event counted over the
/// training positives only. Incidence is relative to the number of trials.
pub fn train_prevalence(
    records: &[TrialRecord],
    graph: &HeteroGraph,
    split: &EdgeSplit,
) -> Result<BTreeMap<String, [f64; 2]>> {
    let by_id: HashMap<&str, &TrialRecord> =
        records.iter().map(|r| (r.nct_id.as_str(), r)).collect();
    let mut acc: BTreeMap<String, (usize, f64)> = BTreeMap::new();
    for ae in records
        .first()
        .map(|r| r.adverse_events.keys())
        .into_iter()
        .flatten()
    {
        acc.insert(ae.clone(), (0, 0.0));
    }
    for &(t, a) in &split.train_pos {
        let (trial, ae) = (graph.name_of(t), graph.name_of(a));
        let r = by_id
            .get(trial)
            .ok_or_else(|| Error::data(format!("no record for trial {trial}")))?;
        let frac = r.adverse_events.get(ae).copied().unwrap_or(0.0);
        let slot = acc.entry(ae.to_string()).or_insert((0, 0.0));
        slot.0 += 1;
        slot.1 += frac;
    }
    let n = records.len().max(1) as f64;
    Ok(acc
        .into_iter()
        .map(|(ae, (k, sum))| {
            let mean = if k == 0 { 0.0 } else { sum / k as f64 };
            (ae, [k as f64 / n, mean])
        })
        .collect())
}

/// Feature rows for (trial, AE) pairs: the trial's multi-hot block over a
/// vocabulary built from the training trials, then the AE's training
/// prevalence. Terms unseen in training contribute zeros.
pub fn one_hot_edge_features(
    records: &[TrialRecord],
    split: &EdgeSplit,
) -> Result<(Dataset, Dataset)> {
    let g = &split.residual;
    let by_id: HashMap<&str, &TrialRecord> =
        records.iter().map(|r| (r.nct_id.as_str(), r)).collect();
    let record = |t: NodeId| -> Result<&TrialRecord> {
        by_id
            .get(g.name_of(t))
            .copied()
            .ok_or_else(|| Error::data(format!("no record for trial {}", g.name_of(t))))
    };
    let (train_pairs, train_y) = split.train_pairs();
    let (test_pairs, test_y) = split.test_pairs();
    let train_trials: BTreeSet<NodeId> = train_pairs.iter().map(|p| p.0).collect();
    let train_records: Vec<TrialRecord> = train_trials
        .iter()
        .map(|&t| record(t).cloned())
        .collect::<Result<_>>()?;
    let vocab = Vocabulary::from_records(&train_records);
    let prevalence = train_prevalence(records, g, split)?;

    let rows = |pairs: &[(NodeId, NodeId)]| -> Result<Vec<Vec<f64>>> {
        pairs
            .iter()
            .map(|&(t, a)| {
                let mut x = vocab.one_hot(&TrialTerms::of(record(t)?, &vocab));
                x.extend(prevalence.get(g.name_of(a)).copied().unwrap_or([0.0, 0.0]));
                Ok(x)
            })
            .collect()
    };
    let ids = |pairs: &[(NodeId, NodeId)]| -> Vec<String> {
        pairs
            .iter()
            .map(|&(t, a)| format!("{}|{}", g.name_of(t), g.name_of(a)))
            .collect()
    };
    Ok((
        Dataset::with_ids(rows(&train_pairs)?, train_y, ids(&train_pairs))?,
        Dataset::with_ids(rows(&test_pairs)?, test_y, ids(&test_pairs))?,
    ))
}

/// The array baseline: one-hot edge features and a standard classifier on
/// the same split the graph pipelines use.
pub fn run_array_pipeline(
    records: &[TrialRecord],
    split: &EdgeSplit,
    classifier: &ClassifierSpec,
    seed: u64,
) -> Result<RunOutput> {
    let started = Instant::now();
    let classifier = classifier.clone().with_seed(seed);
    let (train, test) = one_hot_edge_features(records, split)?;
    let model = classifier.fit(&train)?;
    let scores = model.score_all(&test.features);

    let mut audit = LeakageAudit::default();
    let seen: HashSet<String> = train.ids.iter().cloned().collect();
    audit.record("classifier rows", &test.ids, &seen);

    let mut config = split_echo(split);
    config.push(("array.dim".into(), train.dim().to_string()));
    config.extend(classifier.echo("classifier"));
    Pending {
        method: "array",
        classifier: classifier.name().to_string(),
        seed,
        target: None,
        n_train: train.len(),
        config,
        started,
    }
    .finish(scores, test.labels, audit)
}

/// The graph HinSAGE passes messages over: the bi-nodal nodes, with adverse
/// event attributes recomputed from training positives, and a plain edge
/// for every positive pair that is in neither the training nor the test
/// set. Returns the graph and the split pairs mapped onto its ids.
pub fn hinsage_message_graph(
    binodal: &HeteroGraph,
    records: &[TrialRecord],
    split: &EdgeSplit,
) -> Result<(HeteroGraph, EdgeSplit)> {
    let src = &split.residual;
    let map = |v: NodeId| -> Result<NodeId> {
        binodal
            .find_node(src.label_of(v), src.name_of(v))
            .ok_or_else(|| {
                Error::data(format!(
                    "{} `{}` not in bi-nodal graph",
                    src.label_of(v),
                    src.name_of(v)
                ))
            })
    };
    let map_all = |pairs: &[(NodeId, NodeId)]| -> Result<Vec<(NodeId, NodeId)>> {
        pairs.iter().map(|&(a, b)| Ok((map(a)?, map(b)?))).collect()
    };
    let prevalence = train_prevalence(records, src, split)?;
    let mut b = GraphBuilder::new();
    for v in binodal.node_ids() {
        let attrs = match binodal.label_of(v) {
            ADVERSE_EVENT => prevalence.get(binodal.name_of(v)).map(|p| p.to_vec()),
            _ => binodal.attrs(v).map(<[f64]>::to_vec),
        };
        b.add_node(binodal.label_of(v), attrs, binodal.name_of(v))?;
    }
    let held = map_all(&split.train_pos)?
        .into_iter()
        .chain(map_all(&split.test_pos)?)
        .map(|(a, c)| unordered(a, c))
        .collect::<HashSet<_>>();
    for e in binodal.edges() {
        if e.weight.unwrap_or(1.0) > 0.0 && !held.contains(&unordered(e.u, e.v)) {
            b.add_edge(e.u, e.v, BINODAL_EDGE, None)?;
        }
    }
    let mapped = EdgeSplit {
        edge_label: split.edge_label.clone(),
        train_pos: map_all(&split.train_pos)?,
        train_neg: map_all(&split.train_neg)?,
        test_pos: map_all(&split.test_pos)?,
        test_neg: map_all(&split.test_neg)?,
        residual: binodal.filter_edges(|_, _| false),
        seed: split.seed,
    };
    Ok((b.freeze(), mapped))
}

/// Supervised HinSAGE on the training pairs of `split` (built on the
/// knowledge graph; pairs are matched to the bi-nodal graph by name).
pub fn run_hinsage_pipeline(
    binodal: &HeteroGraph,
    records: &[TrialRecord],
    split: &EdgeSplit,
    sage: &SageConfig,
    seed: u64,
) -> Result<RunOutput> {
    let started = Instant::now();
    let sage = SageConfig {
        seed,
        ..sage.clone()
    };
    let (graph, mapped) = hinsage_message_graph(binodal, records, split)?;
    let (train_pairs, train_y) = mapped.train_pairs();
    let (test_pairs, test_y) = mapped.test_pairs();
    let train: Vec<(NodeId, NodeId, f64)> = train_pairs
        .iter()
        .zip(&train_y)
        .map(|(&(a, b), &y)| (a, b, y as f64))
        .collect();
    let (params, _) = train_hinsage(&graph, &train, &sage)?;
    let scores = predict_links(&graph, &params, &test_pairs)?;

    let test_keys = unordered_all(&test_pairs);
    let mut audit = LeakageAudit::default();
    let messages: HashSet<_> = graph.edges().iter().map(|e| unordered(e.u, e.v)).collect();
    audit.record("message graph", &test_keys, &messages);
    audit.record("training pairs", &test_keys, &pair_set(&train_pairs));

    let mut config = split_echo(split);
    config.extend(sage.echo("sage"));
    let mut out = Pending {
        method: "hinsage",
        classifier: "link_head".into(),
        seed,
        target: None,
        n_train: train.len(),
        config,
        started,
    }
    .finish(scores, test_y, audit)?;
    out.model = Some(params);
    Ok(out)
}

/// How the kernel pipeline turns Gram values into a classifier.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelClassifier {
    /// Kernel values against the reference set as a feature vector.
    Features(ClassifierSpec),
    /// SVM on the precomputed train × train Gram matrix; the reference set
    /// is still held out.
    Precomputed(SvmConfig),
}

impl KernelClassifier {
    pub fn name(&self) -> &str {
        match self {
            Self::Features(c) => c.name(),
            Self::Precomputed(_) => "precomputed_svm",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelSettings {
    pub kernel: KernelConfig,
    pub classifier: KernelClassifier,
    pub reference_size: usize,
    /// Fraction of the non-reference graphs used for training.
    pub train_frac: f64,
    /// Null control: permute the training labels before fitting.
    pub shuffle_train_labels: bool,
}

impl Default for KernelSettings {
    fn default() -> Self {
        Self {
            kernel: KernelConfig::default(),
            // the features are already kernel values, so the SVM on top is linear
            classifier: KernelClassifier::Features(ClassifierSpec::Svm(SvmConfig {
                kernel: SvmKernel::Linear,
                ..SvmConfig::default()
            })),
            reference_size: 50,
            train_frac: 0.8,
            shuffle_train_labels: false,
        }
    }
}

/// Per-event graph classification: does the trial report `target_ae`?
///
/// The target's own node is removed from every constituent graph.
pub fn run_kernel_pipeline(
    constituents: &[(String, HeteroGraph)],
    records: &[TrialRecord],
    target_ae: &str,
    settings: &KernelSettings,
    seed: u64,
) -> Result<RunOutput> {
    let started = Instant::now();
    let by_id: HashMap<&str, &TrialRecord> =
        records.iter().map(|r| (r.nct_id.as_str(), r)).collect();
    let labels: Vec<u8> = constituents
        .iter()
        .map(|(id, _)| {
            let r = by_id
                .get(id.as_str())
                .ok_or_else(|| Error::data(format!("no record for trial {id}")))?;
            let frac = r.adverse_events.get(target_ae).ok_or_else(|| {
                Error::data(format!("adverse event `{target_ae}` not in records"))
            })?;
            Ok((*frac > 0.0) as u8)
        })
        .collect::<Result<_>>()?;
    let r = settings.reference_size;
    if r == 0 || r + 10 > constituents.len() {
        return Err(Error::data(format!(
            "reference set of {r} needs at least {} constituent graphs, have {}",
            r + 10,
            constituents.len()
        )));
    }
    let kernel = KernelConfig {
        seed,
        ..settings.kernel.clone()
    };
    let graphs = prepare_graphs(
        constituents,
        kernel.labelling,
        Some((ADVERSE_EVENT, target_ae)),
    );

    let mut order: Vec<usize> = (0..graphs.len()).collect();
    order.shuffle(&mut rng::stream(seed, &[0x6e7]));
    let (reference, rest) = order.split_at(r);
    let n_train = ((rest.len() as f64) * settings.train_frac).round() as usize;
    let (train_idx, test_idx) = rest.split_at(n_train.clamp(1, rest.len() - 1));

    let pick = |idx: &[usize]| idx.iter().map(|&i| graphs[i].clone()).collect::<Vec<_>>();
    let (ref_g, train_g, test_g) = (pick(reference), pick(train_idx), pick(test_idx));
    let mut train_y: Vec<u8> = train_idx.iter().map(|&i| labels[i]).collect();
    if settings.shuffle_train_labels {
        train_y.shuffle(&mut rng::stream(seed, &[0x6e8]));
    }
    let test_y: Vec<u8> = test_idx.iter().map(|&i| labels[i]).collect();

    let scores = match &settings.classifier {
        KernelClassifier::Features(spec) => {
            let spec = spec.clone().with_seed(seed);
            let train_k = gram_matrix(&train_g, &ref_g, &kernel)?;
            let test_k = gram_matrix(&test_g, &ref_g, &kernel)?;
            let rows = |k: &crate::kernels::GramMatrix| {
                (0..k.rows).map(|i| k.row(i).to_vec()).collect::<Vec<_>>()
            };
            let model = spec.fit(&Dataset::new(rows(&train_k), train_y.clone())?)?;
            model.score_all(&rows(&test_k))
        }
        KernelClassifier::Precomputed(svm) => {
            let train_k = gram_matrix(&train_g, &train_g, &kernel)?;
            let test_k = gram_matrix(&test_g, &train_g, &kernel)?;
            let model = train_svm_precomputed(&train_k, &train_y, svm)?;
            (0..test_k.rows)
                .map(|i| model.decision(test_k.row(i)))
                .collect()
        }
    };

    let test_ids: Vec<&str> = test_idx
        .iter()
        .map(|&i| constituents[i].0.as_str())
        .collect();
    let ids = |idx: &[usize]| {
        idx.iter()
            .map(|&i| constituents[i].0.as_str())
            .collect::<HashSet<_>>()
    };
    let mut audit = LeakageAudit::default();
    audit.record("reference set", &test_ids, &ids(reference));
    audit.record("classifier rows", &test_ids, &ids(train_idx));

    let mut config = vec![
        ("kernel.target".to_string(), target_ae.to_string()),
        ("kernel.reference_size".into(), r.to_string()),
        ("kernel.train_frac".into(), settings.train_frac.to_string()),
        (
            "kernel.shuffle_train_labels".into(),
            settings.shuffle_train_labels.to_string(),
        ),
    ];
    config.extend(kernel.echo("kernel"));
    match &settings.classifier {
        KernelClassifier::Features(spec) => {
            config.extend(spec.clone().with_seed(seed).echo("classifier"))
        }
        KernelClassifier::Precomputed(svm) => config.extend(svm.echo("classifier.svm")),
    }
    Pending {
        method: "kernel",
        classifier: settings.classifier.name().to_string(),
        seed,
        target: Some(target_ae.to_string()),
        n_train: train_idx.len(),
        config,
        started,
    }
    .finish(scores, test_y, audit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::labels::EXPRESSES;
    use crate::ingest::{
        build_binodal_graph, build_constituent_graphs, build_knowledge_graph, generate_synthetic,
        SynthConfig,
    };
    use crate::pipeline::split_edges;

    fn records(n_trials: usize) -> Vec<TrialRecord> {
        generate_synthetic(&SynthConfig {
            n_trials,
            n_adverse_events: 8,
            ..SynthConfig::default()
        })
        .unwrap()
    }

    fn knowledge(records: &[TrialRecord]) -> HeteroGraph {
        build_knowledge_graph(records, &Vocabulary::from_records(records)).unwrap()
    }

    #[test]
    fn audit_flags_overlap() {
        let mut audit = LeakageAudit::default();
        let seen: HashSet<u32> = [1, 2, 3].into();
        audit.record("clean", &[4, 5], &seen);
        assert!(audit.check().is_ok());
        audit.record("leaky", &[3, 9], &seen);
        let err = audit.check().unwrap_err();
        assert!(err.to_string().contains("leaky"));
        assert_eq!(
            audit.structures,
            vec![("clean".to_string(), 0), ("leaky".to_string(), 1)]
        );
    }

    #[test]
    fn one_hot_rows_share_one_width() {
        let recs = records(60);
        let split = split_edges(&knowledge(&recs), EXPRESSES, 0.1, 0.4, 3).unwrap();
        let (train, test) = one_hot_edge_features(&recs, &split).unwrap();
        assert_eq!(train.len(), 2 * split.train_pos.len());
        assert_eq!(test.len(), 2 * split.test_pos.len());
        assert!(train.dim() > 2);
        assert!(train
            .features
            .iter()
            .chain(&test.features)
            .all(|r| r.len() == train.dim()));
        // the last two columns are the AE prevalence block
        assert!(train
            .features
            .iter()
            .all(|r| (0.0..=1.0).contains(&r[r.len() - 2])));
    }

    #[test]
    fn array_run_is_deterministic_and_clean() {
        let recs = records(60);
        let split = split_edges(&knowledge(&recs), EXPRESSES, 0.1, 0.4, 5).unwrap();
        let spec = ClassifierSpec::by_name("logistic").unwrap();
        let a = run_array_pipeline(&recs, &split, &spec, 5).unwrap();
        let b = run_array_pipeline(&recs, &split, &spec, 5).unwrap();
        assert_eq!(a.report.to_tsv(), b.report.to_tsv());
        assert_eq!(a.scores, b.scores);
        assert!(a.audit.structures.iter().all(|(_, n)| *n == 0));
        assert_eq!(a.report.n_test, 2 * split.test_pos.len());
    }

    #[test]
    fn untrained_hinsage_scores_are_uninformative() {
        let recs = records(60);
        let split = split_edges(&knowledge(&recs), EXPRESSES, 0.1, 0.4, 2).unwrap();
        let binodal = build_binodal_graph(&recs).unwrap();
        let sage = SageConfig {
            layer_dims: vec![8, 8],
            epochs: 0,
            ..SageConfig::default()
        };
        let out = run_hinsage_pipeline(&binodal, &recs, &split, &sage, 2).unwrap();
        assert!(
            (out.report.auc - 0.5).abs() <= 0.1,
            "auc {}",
            out.report.auc
        );
        assert!(out.model.is_some());
    }

    #[test]
    fn kernel_run_rejects_bad_inputs() {
        let recs = records(40);
        let kg = knowledge(&recs);
        let graphs = build_constituent_graphs(&kg, &recs).unwrap();
        let settings = KernelSettings::default();
        let ae = recs[0].adverse_events.keys().next().unwrap().clone();
        // 50 reference graphs out of 40
        assert!(run_kernel_pipeline(&graphs, &recs, &ae, &settings, 1).is_err());
        let small = KernelSettings {
            reference_size: 10,
            ..settings
        };
        assert!(run_kernel_pipeline(&graphs, &recs, "no such event", &small, 1).is_err());
        let out = run_kernel_pipeline(&graphs, &recs, &ae, &small, 1).unwrap();
        assert_eq!(out.report.target.as_deref(), Some(ae.as_str()));
        assert_eq!(out.report.n_train + out.report.n_test, 30);
    }
}
