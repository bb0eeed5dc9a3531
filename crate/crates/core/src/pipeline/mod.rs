//! Edge splits, the four link-prediction pipelines, reports, and the
//! multi-seed comparison.

mod experiment;
mod report;
mod runs;
mod split;

pub use experiment::{
    reproduce, reproduce_on, run_seed, ExperimentConfig, ExperimentData, Method, NullControl,
    Reproduction,
};
pub use report::{compare_report, ComparisonRow, ComparisonTable, RunReport};
pub use runs::{
    hinsage_message_graph, one_hot_edge_features, run_array_pipeline, run_hinsage_pipeline,
    run_kernel_pipeline, run_metapath_pipeline, train_prevalence, KernelClassifier, KernelSettings,
    LeakageAudit, MetapathSettings, RunOutput,
};
pub use split::{split_edges, EdgeSplit};
