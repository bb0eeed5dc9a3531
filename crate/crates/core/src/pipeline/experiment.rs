use std::fmt;
use std::str::FromStr;

use super::report::{compare_report, ComparisonTable, RunReport};
use super::runs::{
    run_array_pipeline, run_hinsage_pipeline, run_kernel_pipeline, run_metapath_pipeline,
    KernelClassifier, KernelSettings, MetapathSettings, RunOutput,
};
use super::split::{split_edges, EdgeSplit};
use crate::config::{key, Configurable, KvConfig};
use crate::error::{Error, Result};
use crate::hetgraph::HeteroGraph;
use crate::ingest::labels::EXPRESSES;
use crate::ingest::{
    adverse_event_prevalence, build_binodal_graph, build_constituent_graphs, build_knowledge_graph,
    generate_synthetic, SynthConfig, TrialRecord, Vocabulary,
};
use crate::learn::{kde, ClassifierSpec, SvmConfig};
use crate::sage::SageConfig;
use crate::skipgram::{EdgeEmbedOp, SkipGramConfig};
use crate::walks::{default_metapaths, WalkConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Metapath,
    Hinsage,
    Kernel,
    Array,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Metapath,
        Method::Hinsage,
        Method::Kernel,
        Method::Array,
    ];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Metapath => "metapath",
            Method::Hinsage => "hinsage",
            Method::Kernel => "kernel",
            Method::Array => "array",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| Error::config(format!("unknown method `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NullControl {
    None,
    /// Training labels permuted before fitting.
    ShuffledLabels,
    /// Generator noise set to infinity, erasing the planted signal.
    InfiniteNoise,
}

impl fmt::Display for NullControl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NullControl::None => "none",
            NullControl::ShuffledLabels => "shuffled_labels",
            NullControl::InfiniteNoise => "infinite_noise",
        })
    }
}

impl FromStr for NullControl {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(NullControl::None),
            "shuffled_labels" => Ok(NullControl::ShuffledLabels),
            "infinite_noise" => Ok(NullControl::InfiniteNoise),
            _ => Err(Error::config(format!("unknown null control `{s}`"))),
        }
    }
}

/// Everything `reproduce` needs. `Default` carries the full-scale
/// parameters; [`ExperimentConfig::desk`] shrinks them to run in minutes.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub synth: SynthConfig,
    pub test_frac: f64,
    pub train_frac: f64,
    pub metapath: MetapathSettings,
    pub sage: SageConfig,
    pub kernel: KernelSettings,
    /// Number of adverse events the kernel pipeline is run for.
    pub kernel_targets: usize,
    /// Classifiers for the metapath and array pipelines.
    pub classifiers: Vec<ClassifierSpec>,
    pub methods: Vec<Method>,
    pub seeds: Vec<u64>,
    pub null_control: NullControl,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            synth: SynthConfig::default(),
            test_frac: 0.10,
            train_frac: 0.40,
            metapath: MetapathSettings {
                walk: WalkConfig::default(),
                skipgram: SkipGramConfig::default(),
                metapaths: default_metapaths(),
                edge_op: EdgeEmbedOp::Hadamard,
            },
            sage: SageConfig::default(),
            kernel: KernelSettings::default(),
            kernel_targets: 5,
            classifiers: vec![ClassifierSpec::by_name("logistic").expect("known classifier")],
            methods: Method::ALL.to_vec(),
            seeds: vec![1, 2, 3],
            null_control: NullControl::None,
        }
    }
}

impl ExperimentConfig {
    /// Desk-scale preset: 64-dimensional embeddings, walks of 40 nodes,
    /// two 32-wide HinSAGE layers.
    pub fn desk() -> Self {
        let mut c = Self::default();
        c.metapath.walk.walk_length = 40;
        c.metapath.skipgram.dim = 64;
        c.sage.layer_dims = vec![32, 32];
        c
    }

    pub fn from_kv(base: Self, cfg: &KvConfig) -> Result<Self> {
        let mut c = base;
        c.apply(cfg, "")?;
        cfg.finish()?;
        Ok(c)
    }

    /// The synthetic generator settings after the null control is applied.
    pub fn effective_synth(&self) -> SynthConfig {
        let mut s = self.synth.clone();
        if self.null_control == NullControl::InfiniteNoise {
            s.noise = f64::INFINITY;
        }
        s
    }
}

fn list<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

impl Configurable for ExperimentConfig {
    fn apply(&mut self, cfg: &KvConfig, p: &str) -> Result<()> {
        self.synth.apply(cfg, &key(p, "synth"))?;
        cfg.read(&key(p, "split.test_frac"), &mut self.test_frac)?;
        cfg.read(&key(p, "split.train_frac"), &mut self.train_frac)?;
        self.metapath.walk.apply(cfg, &key(p, "walk"))?;
        self.metapath.skipgram.apply(cfg, &key(p, "skipgram"))?;
        cfg.read(&key(p, "embed.edge_op"), &mut self.metapath.edge_op)?;
        self.sage.apply(cfg, &key(p, "sage"))?;
        self.kernel.kernel.apply(cfg, &key(p, "kernel"))?;
        cfg.read(
            &key(p, "kernel.reference_size"),
            &mut self.kernel.reference_size,
        )?;
        cfg.read(&key(p, "kernel.train_frac"), &mut self.kernel.train_frac)?;
        cfg.read(&key(p, "kernel.targets"), &mut self.kernel_targets)?;
        let mut kc = self.kernel.classifier.name().to_string();
        cfg.read(&key(p, "kernel.classifier"), &mut kc)?;
        self.kernel.classifier = match kc.as_str() {
            "precomputed_svm" => {
                let mut svm = match &self.kernel.classifier {
                    KernelClassifier::Precomputed(s) => s.clone(),
                    _ => SvmConfig::default(),
                };
                svm.apply(cfg, &key(p, "kernel.svm"))?;
                KernelClassifier::Precomputed(svm)
            }
            name => {
                let mut spec = match &self.kernel.classifier {
                    KernelClassifier::Features(s) if s.name() == name => s.clone(),
                    _ => ClassifierSpec::by_name(name)?,
                };
                spec.apply(cfg, &key(p, "kernel"))?;
                KernelClassifier::Features(spec)
            }
        };
        let mut names: Vec<String> = self
            .classifiers
            .iter()
            .map(|c| c.name().to_string())
            .collect();
        cfg.read_list(&key(p, "classifiers"), &mut names)?;
        let mut specs = Vec::with_capacity(names.len());
        for n in &names {
            let mut spec = match self.classifiers.iter().find(|c| c.name() == n) {
                Some(s) => s.clone(),
                None => ClassifierSpec::by_name(n)?,
            };
            spec.apply(cfg, &key(p, "classifier"))?;
            specs.push(spec);
        }
        self.classifiers = specs;
        cfg.read_list(&key(p, "experiment.methods"), &mut self.methods)?;
        cfg.read_list(&key(p, "experiment.seeds"), &mut self.seeds)?;
        cfg.read(&key(p, "experiment.null_control"), &mut self.null_control)?;
        if !(self.test_frac > 0.0
            && self.train_frac > 0.0
            && self.test_frac + self.train_frac <= 1.0)
        {
            return Err(Error::config(
                "split fractions must be positive and sum to at most 1",
            ));
        }
        if self.seeds.is_empty() || self.methods.is_empty() {
            return Err(Error::config("need at least one seed and one method"));
        }
        if self.classifiers.is_empty() {
            return Err(Error::config("need at least one classifier"));
        }
        Ok(())
    }

    fn echo(&self, p: &str) -> Vec<(String, String)> {
        let mut out = self.synth.echo(&key(p, "synth"));
        out.push((key(p, "split.test_frac"), self.test_frac.to_string()));
        out.push((key(p, "split.train_frac"), self.train_frac.to_string()));
        out.extend(self.metapath.walk.echo(&key(p, "walk")));
        out.extend(self.metapath.skipgram.echo(&key(p, "skipgram")));
        out.push((key(p, "embed.edge_op"), self.metapath.edge_op.to_string()));
        out.extend(self.sage.echo(&key(p, "sage")));
        out.extend(self.kernel.kernel.echo(&key(p, "kernel")));
        out.push((
            key(p, "kernel.reference_size"),
            self.kernel.reference_size.to_string(),
        ));
        out.push((
            key(p, "kernel.train_frac"),
            self.kernel.train_frac.to_string(),
        ));
        out.push((key(p, "kernel.targets"), self.kernel_targets.to_string()));
        out.push((
            key(p, "kernel.classifier"),
            self.kernel.classifier.name().to_string(),
        ));
        match &self.kernel.classifier {
            KernelClassifier::Features(s) => out.extend(s.echo(&key(p, "kernel"))),
            KernelClassifier::Precomputed(s) => out.extend(s.echo(&key(p, "kernel.svm"))),
        }
        let names: Vec<&str> = self.classifiers.iter().map(|c| c.name()).collect();
        out.push((key(p, "classifiers"), names.join(",")));
        for c in &self.classifiers {
            out.extend(c.echo(&key(p, "classifier")));
        }
        out.push((key(p, "experiment.methods"), list(&self.methods)));
        out.push((key(p, "experiment.seeds"), list(&self.seeds)));
        out.push((
            key(p, "experiment.null_control"),
            self.null_control.to_string(),
        ));
        out
    }
}

/// The graphs derived from one set of trial records.
#[derive(Clone, Debug)]
pub struct ExperimentData {
    pub records: Vec<TrialRecord>,
    pub knowledge: HeteroGraph,
    pub binodal: HeteroGraph,
    /// Built only when the kernel pipeline is requested.
    pub constituents: Vec<(String, HeteroGraph)>,
}

impl ExperimentData {
    pub fn from_records(records: Vec<TrialRecord>, with_constituents: bool) -> Result<Self> {
        let vocab = Vocabulary::from_records(&records);
        let knowledge = build_knowledge_graph(&records, &vocab)?;
        let binodal = build_binodal_graph(&records)?;
        let constituents = if with_constituents {
            build_constituent_graphs(&knowledge, &records)?
        } else {
            Vec::new()
        };
        Ok(Self {
            records,
            knowledge,
            binodal,
            constituents,
        })
    }

    pub fn for_config(cfg: &ExperimentConfig) -> Result<Self> {
        let records = generate_synthetic(&cfg.effective_synth())?;
        Self::from_records(records, cfg.methods.contains(&Method::Kernel))
    }

    /// The `n` adverse events whose incidence is closest to one half, ties
    /// broken by name.
    pub fn kernel_targets(&self, n: usize) -> Vec<String> {
        let mut aes: Vec<(f64, String)> = adverse_event_prevalence(&self.records)
            .into_iter()
            .map(|(ae, p)| ((p[0] - 0.5).abs(), ae))
            .collect();
        aes.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        aes.into_iter().take(n).map(|(_, ae)| ae).collect()
    }
}

/// Every requested pipeline for one seed, all on the same split.
pub fn run_seed(
    data: &ExperimentData,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<Vec<RunOutput>> {
    let mut split: EdgeSplit = split_edges(
        &data.knowledge,
        EXPRESSES,
        cfg.test_frac,
        cfg.train_frac,
        seed,
    )?;
    let shuffled = cfg.null_control == NullControl::ShuffledLabels;
    if shuffled {
        split = split.with_shuffled_train_labels(seed);
    }
    let mut out = Vec::new();
    for m in &cfg.methods {
        match m {
            Method::Metapath => {
                for c in &cfg.classifiers {
                    out.push(run_metapath_pipeline(&split, &cfg.metapath, c, seed)?);
                }
            }
            Method::Array => {
                for c in &cfg.classifiers {
                    out.push(run_array_pipeline(&data.records, &split, c, seed)?);
                }
            }
            Method::Hinsage => out.push(run_hinsage_pipeline(
                &data.binodal,
                &data.records,
                &split,
                &cfg.sage,
                seed,
            )?),
            Method::Kernel => {
                let settings = KernelSettings {
                    shuffle_train_labels: shuffled,
                    ..cfg.kernel.clone()
                };
                for ae in data.kernel_targets(cfg.kernel_targets) {
                    out.push(run_kernel_pipeline(
                        &data.constituents,
                        &data.records,
                        &ae,
                        &settings,
                        seed,
                    )?);
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct Reproduction {
    pub runs: Vec<RunOutput>,
    pub comparison: ComparisonTable,
    /// Density of the per-event kernel AUCs on [0, 1], if any kernel runs.
    pub kernel_kde: Option<(Vec<f64>, Vec<f64>)>,
}

impl Reproduction {
    pub fn reports(&self) -> Vec<RunReport> {
        self.runs.iter().map(|r| r.report.clone()).collect()
    }
}

/// All seeds of the comparison. With `parallel_runs` the seeds run
/// concurrently; results are identical either way.
pub fn reproduce(cfg: &ExperimentConfig, parallel_runs: bool) -> Result<Reproduction> {
    let data = ExperimentData::for_config(cfg)?;
    reproduce_on(&data, cfg, parallel_runs)
}

pub fn reproduce_on(
    data: &ExperimentData,
    cfg: &ExperimentConfig,
    parallel_runs: bool,
) -> Result<Reproduction> {
    let per_seed: Vec<Vec<RunOutput>> = if parallel_runs {
        run_seeds_parallel(data, cfg)?
    } else {
        cfg.seeds
            .iter()
            .map(|&s| run_seed(data, cfg, s))
            .collect::<Result<_>>()?
    };
    let runs: Vec<RunOutput> = per_seed.into_iter().flatten().collect();
    let reports: Vec<RunReport> = runs.iter().map(|r| r.report.clone()).collect();
    let comparison = compare_report(&reports);
    let kernel_aucs: Vec<f64> = reports
        .iter()
        .filter(|r| r.method == "kernel")
        .map(|r| r.auc)
        .collect();
    let kernel_kde = if kernel_aucs.is_empty() {
        None
    } else {
        let grid: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
        let density = kde(&kernel_aucs, None, &grid)?;
        Some((grid, density))
    };
    Ok(Reproduction {
        runs,
        comparison,
        kernel_kde,
    })
}

#[cfg(feature = "parallel")]
fn run_seeds_parallel(
    data: &ExperimentData,
    cfg: &ExperimentConfig,
) -> Result<Vec<Vec<RunOutput>>> {
    use rayon::prelude::*;
    cfg.seeds
        .par_iter()
        .map(|&s| run_seed(data, cfg, s))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn run_seeds_parallel(
    data: &ExperimentData,
    cfg: &ExperimentConfig,
) -> Result<Vec<Vec<RunOutput>>> {
    cfg.seeds.iter().map(|&s| run_seed(data, cfg, s)).collect()
}
