//! One checker per acceptance criterion. Each returns whether it passed and
//! the measured quantities. Tolerances are pinned here.

use std::collections::BTreeMap;

use hetlink_core::hetgraph::{GraphBuilder, HeteroGraph, NodeId};
use hetlink_core::ingest::labels::{ADVERSE_EVENT, CLINICAL_TRIAL, EXPRESSES};
use hetlink_core::ingest::{
    build_binodal_graph, build_knowledge_graph, generate_synthetic, SynthConfig, Vocabulary,
};
use hetlink_core::kernels::{
    gram_matrix, prepare_graphs, psd_check, KernelConfig, KernelKind, Labelling,
};
use hetlink_core::learn::{logreg_loss_and_grad, mlp_loss_and_grad, roc_auc, RocSummary};
use hetlink_core::pipeline::{
    compare_report, run_seed, split_edges, ExperimentConfig, ExperimentData, RunReport,
};
use hetlink_core::rng::{self, Rng};
use hetlink_core::sage::{
    link_loss_and_grads, sage_forward, unsupervised_loss_grads, Mode, SageConfig, SageParams,
};
use hetlink_core::skipgram::{sgns_loss_and_grads, EmbeddingTable};
use hetlink_core::walks::{metapath_walk, MetaPathSpec, WalkConfig};
use rand::seq::SliceRandom;
use rand::Rng as _;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::{
    brute_auc, brute_force_forward, fd_max_rel_err, permute_nodes, random_attributed_graph,
    random_constituent_graph,
};

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: String) -> Self {
        Self { pass, detail }
    }
}

// gradient suites
pub const GRAD_INSTANCES: usize = 25;
pub const GRAD_TOL: f64 = 1e-4;
pub const LOGREG_GRAD_TOL: f64 = 1e-6;
const FD_STEP: f64 = 1e-5;
/// Denominator floor of the relative error, so exact zeros compare on an
/// absolute scale.
const REL_FLOOR: f64 = 1e-3;

// forward oracle
pub const ORACLE_GRAPHS: usize = 50;
pub const ORACLE_MAX_NODES: usize = 6;
pub const ORACLE_TOL: f64 = 1e-10;

// AUC oracle
pub const AUC_INSTANCES: usize = 1000;

// kernel validity
pub const KERNEL_GRAPHS: usize = 30;
pub const SYMMETRY_TOL: f64 = 1e-10;
pub const DIAGONAL_TOL: f64 = 1e-10;
pub const PSD_REL_TOL: f64 = 1e-8;
pub const PERMUTATION_TOL: f64 = 1e-12;

// walks
pub const CONFORMANCE_WALKS: usize = 10_000;
pub const CHI2_STEPS: usize = 10_000;
pub const CHI2_MIN_P: f64 = 0.01;

fn skipgram_gradients(r: &mut Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..GRAD_INSTANCES {
        let (n, d) = (r.random_range(3..8), r.random_range(2..6));
        let mut rows = |n: usize| -> Vec<Vec<f64>> {
            (0..n)
                .map(|_| (0..d).map(|_| r.random_range(-0.8..0.8)).collect())
                .collect()
        };
        let (input, output) = (rows(n), rows(n));
        let center = NodeId(r.random_range(0..n));
        let context = NodeId(r.random_range(0..n));
        let negatives: Vec<NodeId> = (0..r.random_range(1..6))
            .map(|_| NodeId(r.random_range(0..n)))
            .collect();
        let table = EmbeddingTable::from_rows(input.clone(), output.clone()).unwrap();
        let (_, g) = sgns_loss_and_grads(center, context, &negatives, &table);
        // parameters: all input rows, then all output rows
        let flat: Vec<f64> = input.iter().chain(&output).flatten().copied().collect();
        let mut analytic = vec![0.0; flat.len()];
        analytic[center.0 * d..(center.0 + 1) * d].copy_from_slice(&g.d_center);
        for (v, dv) in &g.d_context {
            analytic[(n + v.0) * d..(n + v.0 + 1) * d].copy_from_slice(dv);
        }
        let err = fd_max_rel_err(&flat, &analytic, FD_STEP, REL_FLOOR, |x| {
            let rows: Vec<Vec<f64>> = x.chunks(d).map(<[f64]>::to_vec).collect();
            let t = EmbeddingTable::from_rows(rows[..n].to_vec(), rows[n..].to_vec()).unwrap();
            sgns_loss_and_grads(center, context, &negatives, &t).0
        });
        worst = worst.max(err);
    }
    worst
}

fn random_sage_params(g: &HeteroGraph, r: &mut Rng) -> SageParams {
    let depth = r.random_range(1..=3);
    let config = SageConfig {
        layer_dims: (0..depth).map(|_| r.random_range(2..5)).collect(),
        fanout: vec![3; depth],
        dropout: 0.0,
        seed: r.random(),
        ..SageConfig::default()
    };
    let mut params = SageParams::for_graph(g, &config).unwrap();
    let (w, b) = params.head_mut();
    for x in w.iter_mut() {
        *x = r.random_range(-1.0..1.0);
    }
    *b = r.random_range(-0.5..0.5);
    params
}

fn sage_gradients(r: &mut Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..GRAD_INSTANCES {
        let g = random_attributed_graph(r, 6);
        let params = random_sage_params(&g, r);
        let n = g.node_count();
        let pairs: Vec<(NodeId, NodeId, f64)> = (0..r.random_range(1..5))
            .map(|_| {
                let y = if r.random::<bool>() { 1.0 } else { 0.0 };
                (
                    NodeId(r.random_range(0..n)),
                    NodeId(r.random_range(0..n)),
                    y,
                )
            })
            .collect();
        let mut s = rng::stream(0, &[]);
        let (_, grad) = link_loss_and_grads(&g, &pairs, &params, Mode::Eval, &mut s).unwrap();
        let err = fd_max_rel_err(&params.theta, &grad, FD_STEP, REL_FLOOR, |theta| {
            let mut p = params.clone();
            p.theta.copy_from_slice(theta);
            link_loss_and_grads(&g, &pairs, &p, Mode::Eval, &mut s)
                .unwrap()
                .0
        });
        worst = worst.max(err);
    }
    // the unsupervised objective on representations
    for _ in 0..GRAD_INSTANCES {
        let d = r.random_range(2..6);
        let k = r.random_range(1..4);
        let q = r.random_range(1..6);
        let flat: Vec<f64> = (0..d * (2 + k))
            .map(|_| r.random_range(-1.0..1.0))
            .collect();
        let split = |x: &[f64]| -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
            let negs = x[2 * d..].chunks(d).map(<[f64]>::to_vec).collect();
            (x[..d].to_vec(), x[d..2 * d].to_vec(), negs)
        };
        let (zu, zp, zn) = split(&flat);
        let (_, gu, gp, gn) = unsupervised_loss_grads(&zu, &zp, &zn, q);
        let analytic: Vec<f64> = gu
            .iter()
            .chain(&gp)
            .chain(gn.iter().flatten())
            .copied()
            .collect();
        let err = fd_max_rel_err(&flat, &analytic, FD_STEP, REL_FLOOR, |x| {
            let (zu, zp, zn) = split(x);
            unsupervised_loss_grads(&zu, &zp, &zn, q).0
        });
        worst = worst.max(err);
    }
    worst
}

fn random_rows(r: &mut Rng, n: usize, d: usize) -> (Vec<Vec<f64>>, Vec<u8>) {
    let rows = (0..n)
        .map(|_| (0..d).map(|_| r.random_range(-2.0..2.0)).collect())
        .collect();
    let labels = (0..n).map(|_| r.random_range(0..2)).collect();
    (rows, labels)
}

fn logreg_gradients(r: &mut Rng) -> f64 {
    let mut worst = 0.0f64;
    for _ in 0..GRAD_INSTANCES {
        let (n, d) = (r.random_range(2..12), r.random_range(1..6));
        let (rows, labels) = random_rows(r, n, d);
        let l2 = if r.random::<bool>() {
            0.0
        } else {
            r.random_range(0.0..0.5)
        };
        let x: Vec<f64> = (0..=d).map(|_| r.random_range(-1.0..1.0)).collect();
        let (_, gw, gb) = logreg_loss_and_grad(&x[..d], x[d], &rows, &labels, l2);
        let analytic: Vec<f64> = gw.into_iter().chain([gb]).collect();
        let err = fd_max_rel_err(&x, &analytic, FD_STEP, REL_FLOOR, |x| {
            logreg_loss_and_grad(&x[..d], x[d], &rows, &labels, l2).0
        });
        worst = worst.max(err);
    }
    worst
}

fn mlp_gradients(r: &mut Rng) -> f64 {
    let mut worst = 0.0f64;
    let mut done = 0;
    while done < GRAD_INSTANCES {
        let (n, d, h) = (
            r.random_range(2..10),
            r.random_range(1..5),
            r.random_range(1..6),
        );
        let (rows, labels) = random_rows(r, n, d);
        let theta: Vec<f64> = (0..h * d + 2 * h + 1)
            .map(|_| r.random_range(-1.0..1.0))
            .collect();
        // keep every hidden pre-activation away from the relu kink
        let near_kink = rows.iter().any(|x| {
            (0..h).any(|k| {
                let a: f64 =
                    (0..d).map(|j| theta[k * d + j] * x[j]).sum::<f64>() + theta[h * d + k];
                a.abs() < 1e-3
            })
        });
        if near_kink {
            continue;
        }
        let (_, grad) = mlp_loss_and_grad(&theta, d, h, &rows, &labels);
        let err = fd_max_rel_err(&theta, &grad, FD_STEP, REL_FLOOR, |t| {
            mlp_loss_and_grad(t, d, h, &rows, &labels).0
        });
        worst = worst.max(err);
        done += 1;
    }
    worst
}

/// Skip-gram, GNN, logistic regression and MLP gradients against central
/// differences.
pub fn gradients() -> Outcome {
    let mut r = rng::stream(3, &[]);
    let sg = skipgram_gradients(&mut r);
    let sage = sage_gradients(&mut r);
    let lr = logreg_gradients(&mut r);
    let mlp = mlp_gradients(&mut r);
    let pass = sg <= GRAD_TOL && sage <= GRAD_TOL && mlp <= GRAD_TOL && lr <= LOGREG_GRAD_TOL;
    Outcome::new(
        pass,
        format!(
            "{GRAD_INSTANCES} instances each, max rel err: skipgram {sg:.1e}, gnn {sage:.1e}, mlp {mlp:.1e} (tol {GRAD_TOL:e}), logistic {lr:.1e} (tol {LOGREG_GRAD_TOL:e})"
        ),
    )
}

/// Forward pass against the full-graph oracle.
pub fn sage_oracle() -> Outcome {
    let mut r = rng::stream(4, &[]);
    let mut worst = 0.0f64;
    for _ in 0..ORACLE_GRAPHS {
        let g = random_attributed_graph(&mut r, ORACLE_MAX_NODES);
        let params = random_sage_params(&g, &mut r);
        let ids: Vec<NodeId> = g.node_ids().collect();
        let mut s = rng::stream(0, &[]);
        let got = sage_forward(&g, &ids, &params, Mode::Eval, &mut s).unwrap();
        let want = brute_force_forward(&g, &params);
        for (a, b) in got.iter().zip(&want) {
            for (x, y) in a.iter().zip(b) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Outcome::new(
        worst <= ORACLE_TOL,
        format!("{ORACLE_GRAPHS} graphs with |V| <= {ORACLE_MAX_NODES}, max abs diff {worst:.1e} (tol {ORACLE_TOL:e})"),
    )
}

/// Mann-Whitney AUC against pair counting.
pub fn auc_oracle() -> Outcome {
    let mut r = rng::stream(5, &[]);
    let mut mismatches = 0;
    for i in 0..AUC_INSTANCES {
        let n = r.random_range(2..60);
        let levels = if i % 2 == 0 {
            r.random_range(1..6)
        } else {
            1000
        };
        let mut labels: Vec<u8> = (0..n).map(|_| r.random_range(0..2)).collect();
        labels[0] = 0;
        labels[1] = 1;
        let scores: Vec<f64> = (0..n)
            .map(|_| r.random_range(0..levels) as f64 / levels as f64)
            .collect();
        if roc_auc(&scores, &labels).unwrap().auc != brute_auc(&scores, &labels) {
            mismatches += 1;
        }
    }
    let example = roc_auc(&[0.9, 0.2, 0.8, 0.3], &[1, 0, 0, 1]).unwrap().auc;
    Outcome::new(
        mismatches == 0 && example == 0.75,
        format!("{mismatches}/{AUC_INSTANCES} mismatches (half the instances heavily tied); 4-point example {example}"),
    )
}

/// Gram matrices of all kernels over random per-trial graphs: symmetric,
/// unit diagonal, PSD, and unchanged by node relabelling.
pub fn kernel_validity() -> Outcome {
    let mut r = rng::stream(6, &[]);
    let graphs: Vec<(String, HeteroGraph)> = (0..KERNEL_GRAPHS)
        .map(|i| (format!("g{i}"), random_constituent_graph(&mut r, i)))
        .collect();
    let permuted: Vec<(String, HeteroGraph)> = graphs
        .iter()
        .map(|(id, g)| {
            let mut perm: Vec<usize> = (0..g.node_count()).collect();
            perm.shuffle(&mut r);
            (id.clone(), permute_nodes(g, &perm))
        })
        .collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for kind in KernelKind::ALL {
        let config = KernelConfig {
            kind,
            ..KernelConfig::default()
        };
        let kg = prepare_graphs(&graphs, Labelling::Fine, None);
        let kp = prepare_graphs(&permuted, Labelling::Fine, None);
        let gram = gram_matrix(&kg, &kg, &config).unwrap();
        let gram_p = gram_matrix(&kp, &kp, &config).unwrap();
        let n = gram.rows;
        let mut asym = 0.0f64;
        let mut diag = 0.0f64;
        for i in 0..n {
            diag = diag.max((gram.get(i, i) - 1.0).abs());
            for j in 0..n {
                asym = asym.max((gram.get(i, j) - gram.get(j, i)).abs());
            }
        }
        let trace: f64 = (0..n).map(|i| gram.get(i, i)).sum();
        let (_, min_eig) = psd_check(&gram.values, n, PSD_REL_TOL).unwrap();
        let psd = min_eig >= -PSD_REL_TOL * trace;
        // invariance is checked on raw values so normalisation cannot mask it
        let raw = KernelConfig {
            normalize: false,
            ..config.clone()
        };
        let (a, b) = (
            gram_matrix(&kg, &kg, &raw).unwrap(),
            gram_matrix(&kp, &kp, &raw).unwrap(),
        );
        let perm_diff = a
            .values
            .iter()
            .zip(&b.values)
            .chain(gram.values.iter().zip(&gram_p.values))
            .map(|(x, y)| (x - y).abs())
            .fold(0.0f64, f64::max);
        let ok =
            asym <= SYMMETRY_TOL && diag <= DIAGONAL_TOL && psd && perm_diff <= PERMUTATION_TOL;
        pass &= ok;
        parts.push(format!(
            "{kind}: asym {asym:.0e} diag {diag:.0e} min eig {min_eig:.2e} perm {perm_diff:.0e}"
        ));
    }
    Outcome::new(
        pass,
        format!("{KERNEL_GRAPHS} graphs; {}", parts.join("; ")),
    )
}

fn random_walk_graph(r: &mut Rng) -> HeteroGraph {
    let labels = ["A", "B", "C", "D"];
    let n = r.random_range(3..25);
    let mut b = GraphBuilder::new();
    let ids: Vec<NodeId> = (0..n)
        .map(|i| {
            b.add_node(
                labels[r.random_range(0..labels.len())],
                None,
                format!("v{i}"),
            )
            .unwrap()
        })
        .collect();
    for _ in 0..r.random_range(n..4 * n) {
        let (u, v) = (ids[r.random_range(0..n)], ids[r.random_range(0..n)]);
        if u != v {
            b.add_edge(u, v, "e", None).unwrap();
        }
    }
    b.freeze()
}

/// Chi-squared p-value of `counts` against equal cell probabilities.
fn uniform_chi2_p(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    let expect = total as f64 / counts.len() as f64;
    let stat: f64 = counts
        .iter()
        .map(|&c| (c as f64 - expect).powi(2) / expect)
        .sum();
    let dist = ChiSquared::new((counts.len() - 1) as f64).unwrap();
    1.0 - dist.cdf(stat)
}

/// Walk conformance over random graphs, then the first two steps on a
/// complete bipartite trial-event graph against the uniform law.
pub fn walk_conformance() -> Outcome {
    let mut r = rng::stream(7, &[]);
    let mut walks = 0;
    let mut bad = 0;
    let mut steps = 0;
    while walks < CONFORMANCE_WALKS {
        let g = random_walk_graph(&mut r);
        let alphabet = g.node_alphabet().to_vec();
        let len = r.random_range(2..5);
        let mut labels: Vec<String> = (0..len - 1)
            .map(|_| alphabet[r.random_range(0..alphabet.len())].clone())
            .collect();
        labels.push(labels[0].clone());
        let Ok(mp) = MetaPathSpec::new(&labels).unwrap().resolve(&g) else {
            continue;
        };
        let config = WalkConfig {
            walk_length: r.random_range(2..30),
            walks_per_node: 1,
            p: r.random_range(0.25..4.0),
            q: r.random_range(0.25..4.0),
            seed: 0,
        };
        for start in g.nodes_with_label(mp.anchor()) {
            let w = metapath_walk(&g, start, &mp, &config, &mut r).unwrap();
            let labels_ok = w
                .iter()
                .enumerate()
                .all(|(i, &v)| g.label_id_of(v) == mp.label_at(i));
            let edges_ok = w.windows(2).all(|p| g.has_edge(p[0], p[1]));
            if !(labels_ok && edges_ok) || w.len() > config.walk_length {
                bad += 1;
            }
            steps += w.len() - 1;
            walks += 1;
        }
    }

    let (n_trials, n_events) = (6, 8);
    let mut b = GraphBuilder::new();
    let trials: Vec<NodeId> = (0..n_trials)
        .map(|i| b.add_node(CLINICAL_TRIAL, None, format!("t{i}")).unwrap())
        .collect();
    let events: Vec<NodeId> = (0..n_events)
        .map(|i| b.add_node(ADVERSE_EVENT, None, format!("e{i}")).unwrap())
        .collect();
    for &t in &trials {
        for &e in &events {
            b.add_edge(t, e, EXPRESSES, None).unwrap();
        }
    }
    let g = b.freeze();
    let mp = MetaPathSpec::new(&[CLINICAL_TRIAL, ADVERSE_EVENT, CLINICAL_TRIAL])
        .unwrap()
        .resolve(&g)
        .unwrap();
    let config = WalkConfig {
        walk_length: 3,
        ..WalkConfig::default()
    };
    let mut first = vec![0; n_events];
    let mut second = vec![0; n_trials];
    let mut s = rng::stream(8, &[]);
    for _ in 0..CHI2_STEPS {
        let w = metapath_walk(&g, trials[0], &mp, &config, &mut s).unwrap();
        first[w[1].0 - n_trials] += 1;
        second[w[2].0] += 1;
    }
    let (p1, p2) = (uniform_chi2_p(&first), uniform_chi2_p(&second));
    Outcome::new(
        bad == 0 && p1 > CHI2_MIN_P && p2 > CHI2_MIN_P,
        format!(
            "{bad}/{walks} walks violate ({steps} steps); chi2 p-values {p1:.3} (trial->event), {p2:.3} (event->trial) over {CHI2_STEPS} walks (min {CHI2_MIN_P})"
        ),
    )
}

/// A trial-event graph with exactly `edges` expresses edges.
pub fn expresses_graph(n_trials: usize, n_events: usize, edges: usize) -> HeteroGraph {
    let mut b = GraphBuilder::new();
    let trials: Vec<NodeId> = (0..n_trials)
        .map(|i| b.add_node(CLINICAL_TRIAL, None, format!("t{i}")).unwrap())
        .collect();
    let events: Vec<NodeId> = (0..n_events)
        .map(|i| b.add_node(ADVERSE_EVENT, None, format!("e{i}")).unwrap())
        .collect();
    let mut k = 0;
    'outer: for &t in &trials {
        for &e in &events {
            if k == edges {
                break 'outer;
            }
            if (t.0 * 7 + e.0 * 3) % 2 == 0 || n_trials * n_events - k <= edges {
                b.add_edge(t, e, EXPRESSES, None).unwrap();
                k += 1;
            }
        }
    }
    assert_eq!(k, edges);
    b.freeze()
}

/// Edge-count identities of the graph builders and the split arithmetic.
pub fn structural() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (n_trials, n_events) in [(300, 20), (57, 11)] {
        let records = generate_synthetic(&SynthConfig {
            n_trials,
            n_adverse_events: n_events,
            ..SynthConfig::default()
        })
        .unwrap();
        let binodal = build_binodal_graph(&records).unwrap();
        let kg = build_knowledge_graph(&records, &Vocabulary::from_records(&records)).unwrap();
        let brute: usize = records
            .iter()
            .map(|r| r.adverse_events.values().filter(|&&f| f > 0.0).count())
            .sum();
        let (_, by_label) = kg.count_by_label();
        let expresses = by_label.get(EXPRESSES).copied().unwrap_or(0);
        let ones = binodal
            .edges()
            .iter()
            .filter(|e| e.weight == Some(1.0))
            .count();
        let ok = binodal.edge_count() == n_trials * n_events && expresses == brute && ones == brute;
        pass &= ok;
        parts.push(format!(
            "{n_trials}x{n_events}: bi-nodal {} edges, expresses {expresses} = brute {brute}",
            binodal.edge_count()
        ));
    }
    let g = expresses_graph(20, 10, 100);
    let s = split_edges(&g, EXPRESSES, 0.10, 0.40, 1).unwrap();
    let counts = [
        s.test_pos.len(),
        s.test_neg.len(),
        s.train_pos.len(),
        s.train_neg.len(),
    ];
    let removed = g.edge_count() - s.residual.edge_count();
    let ok = counts == [10, 10, 40, 40] && removed == 50;
    pass &= ok;
    parts.push(format!(
        "100-edge split test {}+{} train {}+{}, residual -{removed}",
        counts[0], counts[1], counts[2], counts[3]
    ));
    Outcome::new(pass, parts.join("; "))
}

/// Config used for the rerun check: every pipeline, one seed, smaller data.
pub fn determinism_config() -> ExperimentConfig {
    let mut c = ExperimentConfig::desk();
    c.synth.n_trials = 150;
    c.kernel_targets = 2;
    c.seeds = vec![2];
    c
}

/// Every pipeline run twice with the same seed and config.
pub fn determinism() -> Outcome {
    let cfg = determinism_config();
    let data = ExperimentData::for_config(&cfg).unwrap();
    let tsvs = || -> BTreeMap<String, String> {
        run_seed(&data, &cfg, cfg.seeds[0])
            .unwrap()
            .into_iter()
            .map(|o| (o.report.stem(), o.report.to_tsv()))
            .collect()
    };
    let (a, b) = (tsvs(), tsvs());
    let same = a.len() == b.len() && a.iter().zip(&b).all(|(x, y)| x == y);
    let methods: std::collections::BTreeSet<String> = a
        .keys()
        .map(|k| k.split('_').next().unwrap().to_string())
        .collect();
    Outcome::new(
        same && methods.len() == 4,
        format!(
            "{} run reports over {{{}}}, byte-identical on rerun: {same}",
            a.len(),
            methods.into_iter().collect::<Vec<_>>().join(", ")
        ),
    )
}

fn report(auc: f64, seed: u64) -> RunReport {
    RunReport {
        method: "metapath".into(),
        classifier: "logistic".into(),
        seed,
        target: None,
        auc,
        n_train: 0,
        n_test: 0,
        roc: RocSummary {
            points: vec![],
            auc,
        },
        roc_path: None,
        wall_seconds: 0.0,
        config: vec![],
    }
}

/// Mean and sample SD of three runs, rounded to three decimals.
pub fn compare_arithmetic() -> Outcome {
    let table = compare_report(&[report(0.857, 1), report(0.857, 2), report(0.848, 3)]);
    let row = &table.rows[0];
    let mean = format!("{:.3}", row.mean);
    let sd = row.sd.map(|s| format!("{s:.3}")).unwrap_or_default();
    Outcome::new(
        mean == "0.854" && sd == "0.005" && table.to_tsv().ends_with("\t0.854\t0.005\n"),
        format!("runs 0.857, 0.857, 0.848 -> mean {mean}, sd {sd}"),
    )
}
