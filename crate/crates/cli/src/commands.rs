use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use hetlink_core::config::{Configurable, KvConfig};
use hetlink_core::hetgraph::{write_graph_dir, HeteroGraph, NodeId};
use hetlink_core::ingest::labels::EXPRESSES;
use hetlink_core::ingest::{
    adverse_event_names, build_binodal_graph, build_constituent_graphs, build_knowledge_graph,
    generate_synthetic, parse_trials_csv, write_trials_csv, TrialRecord, Vocabulary,
};
use hetlink_core::learn::{kde, kde_tsv, roc_auc};
use hetlink_core::pipeline::{
    compare_report, reproduce_on, run_array_pipeline, run_hinsage_pipeline, run_kernel_pipeline,
    run_metapath_pipeline, split_edges, ExperimentConfig, ExperimentData, Method, NullControl,
    RunOutput, RunReport,
};
use hetlink_core::rng;
use hetlink_core::sage::{sage_forward, Mode, SageParams};
use hetlink_core::skipgram::train_embeddings;
use hetlink_core::walks::generate_corpus;
use hetlink_core::{Error, Result};

use crate::{Cli, Command, GraphKind, TrainMethod};

pub fn run(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Generate => generate(cli, &cfg),
        Command::Ingest { input } => ingest(cli, input),
        Command::BuildGraph { kind, input } => build_graph(cli, &cfg, *kind, input.as_deref()),
        Command::Embed { input, checkpoint } => match checkpoint {
            Some(ckpt) => embed_hinsage(cli, &cfg, input.as_deref(), ckpt),
            None => embed_metapath(cli, &cfg, input.as_deref()),
        },
        Command::Train {
            method,
            input,
            target,
        } => train(cli, &cfg, *method, input.as_deref(), target.as_deref()),
        Command::Evaluate { scores } => evaluate(cli, scores),
        Command::Compare { reports } => compare(cli, reports),
        Command::Reproduce { input } => reproduce(cli, &cfg, input.as_deref()),
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig> {
    let base = if cli.full_scale {
        ExperimentConfig::default()
    } else {
        ExperimentConfig::desk()
    };
    let kv = match &cli.config {
        Some(p) => KvConfig::load(p)?,
        None => KvConfig::default(),
    };
    let mut cfg = ExperimentConfig::from_kv(base, &kv)?;
    if let Some(s) = cli.seed {
        cfg.seeds = vec![s];
    }
    Ok(cfg)
}

/// The seed of a single-run command.
fn run_seed(cli: &Cli, cfg: &ExperimentConfig) -> u64 {
    cli.seed.unwrap_or(cfg.seeds[0])
}

fn load_records(cfg: &ExperimentConfig, input: Option<&Path>) -> Result<Vec<TrialRecord>> {
    match input {
        Some(p) => parse_trials_csv(p),
        None => generate_synthetic(&cfg.effective_synth()),
    }
}

fn out_dir(cli: &Cli, sub: &str) -> Result<PathBuf> {
    let d = if sub.is_empty() {
        cli.out.clone()
    } else {
        cli.out.join(sub)
    };
    fs::create_dir_all(&d)?;
    Ok(d)
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn generate(cli: &Cli, cfg: &ExperimentConfig) -> Result<()> {
    let mut synth = cfg.effective_synth();
    if let Some(s) = cli.seed {
        synth.seed = s;
    }
    let records = generate_synthetic(&synth)?;
    let path = out_dir(cli, "")?.join("trials.csv");
    write_trials_csv(&records, &path)?;
    println!("{} trials -> {}", records.len(), path.display());
    Ok(())
}

fn ingest(cli: &Cli, input: &Path) -> Result<()> {
    let records = parse_trials_csv(input)?;
    let dir = out_dir(cli, "")?;
    write_trials_csv(&records, &dir.join("trials.csv"))?;
    let aes = adverse_event_names(&records);
    let positives: usize = records
        .iter()
        .map(|r| r.adverse_events.values().filter(|&&f| f > 0.0).count())
        .sum();
    let vocab = Vocabulary::from_records(&records);
    let [c, sc, d, sd] = vocab.block_sizes();
    let rows = [
        ("trials", records.len()),
        ("adverse_events", aes.len()),
        ("positive_pairs", positives),
        ("conditions", c),
        ("specific_conditions", sc),
        ("drugs", d),
        ("specific_drugs", sd),
    ];
    let mut summary = String::from("key\tvalue\n");
    for (k, v) in rows {
        summary.push_str(&format!("{k}\t{v}\n"));
    }
    write(&dir.join("summary.tsv"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn build_graph(
    cli: &Cli,
    cfg: &ExperimentConfig,
    kind: GraphKind,
    input: Option<&Path>,
) -> Result<()> {
    let records = load_records(cfg, input)?;
    let vocab = Vocabulary::from_records(&records);
    match kind {
        GraphKind::Knowledge => {
            let g = build_knowledge_graph(&records, &vocab)?;
            save_graph(&g, &out_dir(cli, "knowledge")?)
        }
        GraphKind::Binodal => {
            let g = build_binodal_graph(&records)?;
            save_graph(&g, &out_dir(cli, "binodal")?)
        }
        GraphKind::Constituent => {
            let kg = build_knowledge_graph(&records, &vocab)?;
            let graphs = build_constituent_graphs(&kg, &records)?;
            let dir = out_dir(cli, "constituent")?;
            for (name, g) in &graphs {
                write_graph_dir(g, &dir.join(name))?;
            }
            println!("{} constituent graphs -> {}", graphs.len(), dir.display());
            Ok(())
        }
    }
}

fn save_graph(g: &HeteroGraph, dir: &Path) -> Result<()> {
    write_graph_dir(g, dir)?;
    println!(
        "{} nodes, {} edges -> {}",
        g.node_count(),
        g.edge_count(),
        dir.display()
    );
    Ok(())
}

fn embed_metapath(cli: &Cli, cfg: &ExperimentConfig, input: Option<&Path>) -> Result<()> {
    let records = load_records(cfg, input)?;
    let g = build_knowledge_graph(&records, &Vocabulary::from_records(&records))?;
    let seed = run_seed(cli, cfg);
    let mut walk = cfg.metapath.walk.clone();
    walk.seed = seed;
    let mut sg = cfg.metapath.skipgram.clone();
    sg.seed = seed;
    let corpus = generate_corpus(&g, &cfg.metapath.metapaths, &walk)?;
    let (table, trace) = train_embeddings(&corpus, &sg)?;
    let dir = out_dir(cli, "")?;
    write(&dir.join("walks.txt"), &corpus.dump())?;
    let mut header = walk.echo("walk");
    header.extend(sg.echo("skipgram"));
    write(&dir.join("embeddings.txt"), &table.dump(&header))?;
    let mut nodes = String::from("id\tlabel\tname\n");
    for v in g.node_ids() {
        nodes.push_str(&format!(
            "{}\t{}\t{}\n",
            v.index(),
            g.label_of(v),
            g.name_of(v)
        ));
    }
    write(&dir.join("nodes.tsv"), &nodes)?;
    let mut loss = String::from("epoch\tmean_loss\n");
    for (i, l) in trace.epoch_mean_loss.iter().enumerate() {
        loss.push_str(&format!("{}\t{l}\n", i + 1));
    }
    write(&dir.join("loss.tsv"), &loss)?;
    println!(
        "{} walks, {} nodes x {} dims -> {}",
        corpus.len(),
        table.num_nodes(),
        table.dim(),
        dir.display()
    );
    Ok(())
}

/// Inductive inference: representations for every node of the bi-nodal
/// graph of `input`, with the nonzero-dropout edges as messages.
fn embed_hinsage(
    cli: &Cli,
    cfg: &ExperimentConfig,
    input: Option<&Path>,
    ckpt: &Path,
) -> Result<()> {
    let params = SageParams::load(ckpt)?;
    let records = load_records(cfg, input)?;
    let binodal = build_binodal_graph(&records)?;
    let messages = binodal.filter_edges(|_, e| e.weight != Some(0.0));
    let ids: Vec<NodeId> = messages.node_ids().collect();
    let mut r = rng::stream(0, &[]);
    let z = sage_forward(&messages, &ids, &params, Mode::Eval, &mut r)?;
    let mut text = String::from("label\tname\tvector\n");
    for (v, row) in ids.iter().zip(&z) {
        let vec: Vec<String> = row.iter().map(f64::to_string).collect();
        text.push_str(&format!(
            "{}\t{}\t{}\n",
            messages.label_of(*v),
            messages.name_of(*v),
            vec.join(" ")
        ));
    }
    let path = out_dir(cli, "")?.join("sage_embeddings.tsv");
    write(&path, &text)?;
    println!(
        "{} nodes x {} dims -> {}",
        ids.len(),
        params.output_dim(),
        path.display()
    );
    Ok(())
}

fn train(
    cli: &Cli,
    cfg: &ExperimentConfig,
    method: TrainMethod,
    input: Option<&Path>,
    target: Option<&str>,
) -> Result<()> {
    let seed = run_seed(cli, cfg);
    let with_constituents = matches!(method, TrainMethod::Kernel);
    let data = ExperimentData::from_records(load_records(cfg, input)?, with_constituents)?;
    let shuffled = cfg.null_control == NullControl::ShuffledLabels;
    let mut split = split_edges(
        &data.knowledge,
        EXPRESSES,
        cfg.test_frac,
        cfg.train_frac,
        seed,
    )?;
    if shuffled {
        split = split.with_shuffled_train_labels(seed);
    }
    let mut outputs = Vec::new();
    match method {
        TrainMethod::Metapath => {
            for c in &cfg.classifiers {
                outputs.push(run_metapath_pipeline(&split, &cfg.metapath, c, seed)?);
            }
        }
        TrainMethod::Array => {
            for c in &cfg.classifiers {
                outputs.push(run_array_pipeline(&data.records, &split, c, seed)?);
            }
        }
        TrainMethod::Hinsage => {
            outputs.push(run_hinsage_pipeline(
                &data.binodal,
                &data.records,
                &split,
                &cfg.sage,
                seed,
            )?);
        }
        TrainMethod::Kernel => {
            let mut settings = cfg.kernel.clone();
            settings.shuffle_train_labels = shuffled;
            let targets = match target {
                Some(t) => vec![t.to_string()],
                None => data.kernel_targets(cfg.kernel_targets),
            };
            for ae in &targets {
                outputs.push(run_kernel_pipeline(
                    &data.constituents,
                    &data.records,
                    ae,
                    &settings,
                    seed,
                )?);
            }
        }
    }
    for out in &mut outputs {
        save_run(cli, out)?;
        println!("{}\tauc={:.3}", out.report.stem(), out.report.auc);
    }
    if outputs.len() > 1 && matches!(method, TrainMethod::Kernel) {
        let aucs: Vec<f64> = outputs.iter().map(|o| o.report.auc).collect();
        let grid = kde_grid();
        let density = kde(&aucs, None, &grid)?;
        write(
            &out_dir(cli, "")?.join("kde.tsv"),
            &kde_tsv(&grid, &density),
        )?;
    }
    Ok(())
}

fn kde_grid() -> Vec<f64> {
    (0..=200).map(|i| i as f64 / 200.0).collect()
}

/// Writes the report, ROC curve and test scores of one run (and the model
/// checkpoint when there is one), recording the ROC path in the report.
fn save_run(cli: &Cli, out: &mut RunOutput) -> Result<()> {
    let stem = out.report.stem();
    let roc_rel = format!("roc/{stem}.tsv");
    out.report.roc_path = Some(roc_rel.clone());
    write(
        &out_dir(cli, "roc")?.join(format!("{stem}.tsv")),
        &out.report.roc.to_tsv(),
    )?;
    write(
        &out_dir(cli, "reports")?.join(format!("{stem}.tsv")),
        &out.report.to_tsv(),
    )?;
    let mut scores = String::from("score\tlabel\n");
    for (s, y) in out.scores.iter().zip(&out.labels) {
        scores.push_str(&format!("{s}\t{y}\n"));
    }
    write(
        &out_dir(cli, "scores")?.join(format!("{stem}.tsv")),
        &scores,
    )?;
    if let Some(model) = &out.model {
        let path = out_dir(cli, "models")?.join(format!("{stem}.ckpt"));
        model.save(&path)?;
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

fn parse_scores(path: &Path, text: &str) -> Result<(Vec<f64>, Vec<u8>)> {
    let bad = |line: usize, msg: String| Error::Parse {
        path: path.to_path_buf(),
        message: format!("line {line}: {msg}"),
    };
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || (i == 0 && line.starts_with("score")) {
            continue;
        }
        let mut cols = line.split('\t');
        let (Some(s), Some(y), None) = (cols.next(), cols.next(), cols.next()) else {
            return Err(bad(i + 1, "expected score<TAB>label".into()));
        };
        let s: f64 = s
            .trim()
            .parse()
            .map_err(|e| bad(i + 1, format!("score: {e}")))?;
        let y: u8 = match y.trim() {
            "0" => 0,
            "1" => 1,
            other => return Err(bad(i + 1, format!("label `{other}` is not 0 or 1"))),
        };
        scores.push(s);
        labels.push(y);
    }
    Ok((scores, labels))
}

fn evaluate(cli: &Cli, path: &Path) -> Result<()> {
    let text = fs::read_to_string(path)?;
    let (scores, labels) = parse_scores(path, &text)?;
    let roc = roc_auc(&scores, &labels)?;
    write(&out_dir(cli, "")?.join("roc.tsv"), &roc.to_tsv())?;
    println!("auc\t{}", roc.auc);
    Ok(())
}

fn compare(cli: &Cli, paths: &[PathBuf]) -> Result<()> {
    let reports = paths
        .iter()
        .map(|p| {
            let text = fs::read_to_string(p)?;
            RunReport::parse_tsv(&text).map_err(|e| Error::Parse {
                path: p.clone(),
                message: e.to_string(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let table = compare_report(&reports).to_tsv();
    write(&out_dir(cli, "")?.join("comparison.tsv"), &table)?;
    print!("{table}");
    Ok(())
}

fn reproduce(cli: &Cli, cfg: &ExperimentConfig, input: Option<&Path>) -> Result<()> {
    let started = Instant::now();
    let with_constituents = cfg.methods.contains(&Method::Kernel);
    let data = ExperimentData::from_records(load_records(cfg, input)?, with_constituents)?;
    let mut rep = reproduce_on(&data, cfg, cli.parallel_runs)?;
    let dir = out_dir(cli, "")?;
    let mut timing = String::from("run\twall_seconds\n");
    for out in &mut rep.runs {
        save_run(cli, out)?;
        timing.push_str(&format!(
            "{}\t{:.3}\n",
            out.report.stem(),
            out.report.wall_seconds
        ));
    }
    timing.push_str(&format!("total\t{:.3}\n", started.elapsed().as_secs_f64()));
    let table = rep.comparison.to_tsv();
    write(&dir.join("comparison.tsv"), &table)?;
    write(&dir.join("timing.tsv"), &timing)?;
    if let Some((grid, density)) = &rep.kernel_kde {
        write(&dir.join("kde.tsv"), &kde_tsv(grid, density))?;
    }
    let echo: String = cfg
        .echo("")
        .into_iter()
        .map(|(k, v)| format!("{k}={v}\n"))
        .collect();
    write(&dir.join("config.txt"), &echo)?;
    print!("{table}");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scores_file_parses_with_header_and_comments() {
        let (s, y) =
            parse_scores(Path::new("x"), "score\tlabel\n0.9\t1\n# note\n0.1\t0\n").unwrap();
        assert_eq!(s, vec![0.9, 0.1]);
        assert_eq!(y, vec![1, 0]);
    }

    #[test]
    fn scores_file_rejects_bad_rows() {
        assert!(parse_scores(Path::new("x"), "0.9\t2\n").is_err());
        assert!(parse_scores(Path::new("x"), "0.9\n").is_err());
        assert!(parse_scores(Path::new("x"), "abc\t1\n").is_err());
    }
}
