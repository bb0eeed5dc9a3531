//! Outputs compared byte for byte with hand-written files.

use hetlink_core::learn::{kde, roc_auc, RocSummary};
use hetlink_core::pipeline::{compare_report, RunReport};

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!(
        "{}/tests/golden/{name}",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap()
}

fn report(method: &str, auc: f64, seed: u64) -> RunReport {
    RunReport {
        method: method.into(),
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

#[test]
fn roc_table_of_the_four_point_example() {
    let roc = roc_auc(&[0.9, 0.2, 0.8, 0.3], &[1, 0, 0, 1]).unwrap();
    assert_eq!(roc.to_tsv(), golden("roc_four_points.tsv"));
}

#[test]
fn comparison_table_with_a_single_run_row() {
    let reports = [
        report("metapath", 0.857, 1),
        report("metapath", 0.857, 2),
        report("metapath", 0.848, 3),
        report("array", 0.7, 1),
    ];
    assert_eq!(compare_report(&reports).to_tsv(), golden("comparison.tsv"));
}

#[test]
fn kde_of_one_sample_is_the_normal_density() {
    let d = kde(&[0.0], Some(1.0), &[0.0, 1.0]).unwrap();
    assert!((d[0] - 0.398_942_280_401_432_7).abs() < 1e-15);
    assert!((d[1] - 0.241_970_724_519_143_37).abs() < 1e-15);
}
