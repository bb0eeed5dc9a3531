//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::criteria::{self, Outcome};
use hetlink_core::pipeline::{
    reproduce_on, ComparisonTable, ExperimentConfig, ExperimentData, NullControl,
};

const SEEDS: [u64; 3] = [1, 2, 3];
const MIN_MARGIN_OVER_ARRAY: f64 = 0.03;
const MIN_MARGIN_OVER_CHANCE: f64 = 0.15;
const NULL_BAND: (f64, f64) = (0.43, 0.57);
const ORDERING_BUDGET_SECS: f64 = 300.0;
const GRADIENT_BUDGET_SECS: f64 = 30.0;

fn desk(null_control: NullControl) -> ExperimentConfig {
    let mut c = ExperimentConfig::desk();
    c.seeds = SEEDS.to_vec();
    c.null_control = null_control;
    if null_control == NullControl::InfiniteNoise {
        c.synth.noise = f64::INFINITY;
    }
    c
}

fn run(cfg: &ExperimentConfig) -> ComparisonTable {
    let data = ExperimentData::for_config(cfg).expect("dataset");
    reproduce_on(&data, cfg, true)
        .expect("reproduce")
        .comparison
}

fn mean_auc(table: &ComparisonTable, method: &str) -> f64 {
    table.row(method, "logistic").map_or(f64::NAN, |r| r.mean)
}

fn ordering() -> Outcome {
    let start = Instant::now();
    let table = run(&desk(NullControl::None));
    let secs = start.elapsed().as_secs_f64();
    let (metapath, array) = (mean_auc(&table, "metapath"), mean_auc(&table, "array"));
    let pass = metapath - array >= MIN_MARGIN_OVER_ARRAY
        && metapath - 0.5 >= MIN_MARGIN_OVER_CHANCE
        && array - 0.5 >= MIN_MARGIN_OVER_CHANCE
        && secs <= ORDERING_BUDGET_SECS;
    Outcome {
        pass,
        detail: format!(
            "metapath+logistic {metapath:.3}, array+logistic {array:.3} (margin >= {MIN_MARGIN_OVER_ARRAY}, both >= 0.5+{MIN_MARGIN_OVER_CHANCE}); all four pipelines in {secs:.1}s (budget {ORDERING_BUDGET_SECS}s)"
        ),
    }
}

fn null_controls() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for control in [NullControl::ShuffledLabels, NullControl::InfiniteNoise] {
        let table = run(&desk(control));
        let means: Vec<String> = table
            .rows
            .iter()
            .map(|r| {
                pass &= (NULL_BAND.0..=NULL_BAND.1).contains(&r.mean);
                format!("{} {:.3}", r.method, r.mean)
            })
            .collect();
        parts.push(format!("{control}: {}", means.join(", ")));
    }
    Outcome {
        pass,
        detail: format!(
            "band [{}, {}]; {}",
            NULL_BAND.0,
            NULL_BAND.1,
            parts.join("; ")
        ),
    }
}

fn timed_gradients() -> Outcome {
    let start = Instant::now();
    let mut o = criteria::gradients();
    let secs = start.elapsed().as_secs_f64();
    o.pass &= secs <= GRADIENT_BUDGET_SECS;
    o.detail = format!("{}; {secs:.1}s (budget {GRADIENT_BUDGET_SECS}s)", o.detail);
    o
}

fn main() -> ExitCode {
    type Check = (&'static str, fn() -> Outcome);
    let checks: [Check; 10] = [
        ("relative ordering on planted data", ordering),
        ("null controls near chance", null_controls),
        ("gradients match finite differences", timed_gradients),
        (
            "forward pass matches brute-force oracle",
            criteria::sage_oracle,
        ),
        ("AUC matches pair counting", criteria::auc_oracle),
        ("kernel Gram matrices valid", criteria::kernel_validity),
        (
            "walk conformance and uniformity",
            criteria::walk_conformance,
        ),
        ("structural identities", criteria::structural),
        ("byte-identical reruns", criteria::determinism),
        ("comparison table arithmetic", criteria::compare_arithmetic),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        checks.len() - failed,
        checks.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
