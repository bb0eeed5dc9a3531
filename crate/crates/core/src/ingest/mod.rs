//! Trial records → graphs.
//!
//! CSV ingestion, keyword extraction over condition and drug entries, the
//! knowledge / bi-nodal / constituent graph builders, and a synthetic
//! dataset generator.

mod build;
mod keywords;
mod records;
mod synth;

pub use build::{
    adverse_event_prevalence, build_binodal_graph, build_constituent_graphs, build_knowledge_graph,
    TrialTerms, Vocabulary,
};
pub use keywords::{extract_keywords, normalize, KeywordSplit};
pub use records::{
    adverse_event_names, parse_trials, parse_trials_csv, write_trials, write_trials_csv,
    TrialRecord,
};
pub use synth::{generate_synthetic, SynthConfig};

/// Node and edge label names used by the graph builders.
pub mod labels {
    pub const CLINICAL_TRIAL: &str = "Clinical Trial";
    pub const ADVERSE_EVENT: &str = "Adverse Event";
    pub const DRUG: &str = "Drug";
    pub const SPECIFIC_DRUG: &str = "Specific Drug";
    pub const CONDITION: &str = "Condition";
    pub const SPECIFIC_CONDITION: &str = "Specific Condition";

    pub const EXPRESSES: &str = "Expresses";
    pub const DIAGNOSIS: &str = "Diagnosis";
    pub const SPECIFIC_DIAGNOSIS: &str = "Specific Diagnosis";
    pub const TREATMENT: &str = "Treatment";
    pub const SPECIFIC_TREATMENT: &str = "Specific Treatment";
    pub const CONDITION_SPECIFICATION: &str = "Condition Specification";
    pub const DRUG_SPECIFICATION: &str = "Drug Specification";
    pub const TREATMENT_TARGETING: &str = "Treatment Targeting";

    /// Edge label of the bi-nodal graph, whose edges are otherwise unlabelled.
    pub const BINODAL_EDGE: &str = "Trial-Event";
}
