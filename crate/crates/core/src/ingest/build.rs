use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::keywords::{extract_keywords, KeywordSplit};
use super::labels::*;
use super::records::{adverse_event_names, TrialRecord};
use crate::error::{Error, Result};
use crate::hetgraph::{GraphBuilder, HeteroGraph, NodeId};

/// Condition and drug keyword splits of a dataset.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub conditions: KeywordSplit,
    pub drugs: KeywordSplit,
}

impl Vocabulary {
    pub fn from_records(records: &[TrialRecord]) -> Self {
        Self {
            conditions: extract_keywords(records.iter().flat_map(|r| r.condition_entries())),
            drugs: extract_keywords(records.iter().flat_map(|r| &r.drugs)),
        }
    }

    /// Sizes of the condition, specific-condition, drug and specific-drug
    /// blocks of a trial's one-hot vector.
    pub fn block_sizes(&self) -> [usize; 4] {
        [
            self.conditions.keywords.len(),
            self.conditions.specifics.len(),
            self.drugs.keywords.len(),
            self.drugs.specifics.len(),
        ]
    }

    pub fn one_hot_dim(&self) -> usize {
        self.block_sizes().iter().sum()
    }

    /// Multi-hot vector over conditions ⧺ specific conditions ⧺ drugs ⧺
    /// specific drugs, each block in lexicographic order. Terms outside the
    /// vocabulary are ignored.
    pub fn one_hot(&self, terms: &TrialTerms) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.one_hot_dim());
        let blocks: [(&BTreeSet<String>, &BTreeSet<String>); 4] = [
            (&self.conditions.keywords, &terms.conditions),
            (&self.conditions.specifics, &terms.specific_conditions),
            (&self.drugs.keywords, &terms.drugs),
            (&self.drugs.specifics, &terms.specific_drugs),
        ];
        for (vocab, present) in blocks {
            out.extend(
                vocab
                    .iter()
                    .map(|v| if present.contains(v) { 1.0 } else { 0.0 }),
            );
        }
        out
    }
}

/// The vocabulary terms one trial touches.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TrialTerms {
    pub conditions: BTreeSet<String>,
    pub specific_conditions: BTreeSet<String>,
    /// Specific conditions from the Disease column only.
    pub disease_specifics: BTreeSet<String>,
    pub drugs: BTreeSet<String>,
    pub specific_drugs: BTreeSet<String>,
}

impl TrialTerms {
    pub fn of(record: &TrialRecord, vocab: &Vocabulary) -> Self {
        let mut t = TrialTerms::default();
        for e in record.condition_entries() {
            t.conditions.extend(vocab.conditions.keywords_in(e));
            t.specific_conditions
                .extend(vocab.conditions.specific_for(e));
        }
        for e in &record.diseases {
            t.disease_specifics.extend(vocab.conditions.specific_for(e));
        }
        for e in &record.drugs {
            t.drugs.extend(vocab.drugs.keywords_in(e));
            t.specific_drugs.extend(vocab.drugs.specific_for(e));
        }
        t
    }
}

fn check_nonempty(records: &[TrialRecord]) -> Result<()> {
    if records.is_empty() {
        Err(Error::data("no trial records"))
    } else {
        Ok(())
    }
}

/// The complete knowledge graph: six node labels, eight edge labels, no
/// parallel edges.
///
/// Node order: trials (record order), adverse events, conditions, specific
/// conditions, drugs, specific drugs (each sorted).
pub fn build_knowledge_graph(records: &[TrialRecord], vocab: &Vocabulary) -> Result<HeteroGraph> {
    check_nonempty(records)?;
    let mut b = GraphBuilder::new();
    let trials: Vec<NodeId> = records
        .iter()
        .map(|r| b.add_node(CLINICAL_TRIAL, None, r.nct_id.clone()))
        .collect::<Result<_>>()?;

    let mut index: HashMap<(&str, &str), NodeId> = HashMap::new();
    let ae_names = adverse_event_names(records);
    let groups: [(&str, Vec<&String>); 5] = [
        (ADVERSE_EVENT, ae_names.iter().collect()),
        (CONDITION, vocab.conditions.keywords.iter().collect()),
        (
            SPECIFIC_CONDITION,
            vocab.conditions.specifics.iter().collect(),
        ),
        (DRUG, vocab.drugs.keywords.iter().collect()),
        (SPECIFIC_DRUG, vocab.drugs.specifics.iter().collect()),
    ];
    for (label, names) in &groups {
        for name in names {
            let id = b.add_node(label, None, name.as_str())?;
            index.insert((label, name.as_str()), id);
        }
    }
    let node = |label: &'static str, name: &str| -> NodeId { index[&(label, name)] };

    let mut by_label: BTreeMap<usize, BTreeSet<(NodeId, NodeId)>> = BTreeMap::new();
    let mut add = |slot: usize, a: NodeId, c: NodeId| {
        by_label.entry(slot).or_default().insert((a, c));
    };

    for (r, &t) in records.iter().zip(&trials) {
        let terms = TrialTerms::of(r, vocab);
        for (ae, &frac) in &r.adverse_events {
            if frac > 0.0 {
                add(0, t, node(ADVERSE_EVENT, ae));
            }
        }
        for c in &terms.conditions {
            add(1, t, node(CONDITION, c));
        }
        for s in &terms.specific_conditions {
            add(2, t, node(SPECIFIC_CONDITION, s));
        }
        for d in &terms.drugs {
            add(3, t, node(DRUG, d));
        }
        for s in &terms.specific_drugs {
            add(4, t, node(SPECIFIC_DRUG, s));
        }
        for s in &terms.disease_specifics {
            for d in &terms.drugs {
                add(7, node(SPECIFIC_CONDITION, s), node(DRUG, d));
            }
        }
    }
    for (spec, kws) in &vocab.conditions.membership {
        for k in kws {
            add(5, node(CONDITION, k), node(SPECIFIC_CONDITION, spec));
        }
    }
    for (spec, kws) in &vocab.drugs.membership {
        for k in kws {
            add(6, node(DRUG, k), node(SPECIFIC_DRUG, spec));
        }
    }

    const EDGE_LABELS: [&str; 8] = [
        EXPRESSES,
        DIAGNOSIS,
        SPECIFIC_DIAGNOSIS,
        TREATMENT,
        SPECIFIC_TREATMENT,
        CONDITION_SPECIFICATION,
        DRUG_SPECIFICATION,
        TREATMENT_TARGETING,
    ];
    for (slot, pairs) in by_label {
        for (u, v) in pairs {
            b.add_edge(u, v, EDGE_LABELS[slot], None)?;
        }
    }
    Ok(b.freeze())
}

/// `(incidence rate, mean nonzero fraction)` per adverse event.
pub fn adverse_event_prevalence(records: &[TrialRecord]) -> BTreeMap<String, [f64; 2]> {
    let n = records.len().max(1) as f64;
    adverse_event_names(records)
        .into_iter()
        .map(|ae| {
            let nonzero: Vec<f64> = records
                .iter()
                .map(|r| r.adverse_events[&ae])
                .filter(|&f| f > 0.0)
                .collect();
            let rate = nonzero.len() as f64 / n;
            let mean = if nonzero.is_empty() {
                0.0
            } else {
                nonzero.iter().sum::<f64>() / nonzero.len() as f64
            };
            (ae, [rate, mean])
        })
        .collect()
}

/// The bi-nodal graph: trials and adverse events only, every pair connected
/// with weight 1 (nonzero dropout) or 0.
///
/// Node order matches [`build_knowledge_graph`] on the first
/// `n_trials + n_events` ids.
pub fn build_binodal_graph(records: &[TrialRecord]) -> Result<HeteroGraph> {
    check_nonempty(records)?;
    let vocab = Vocabulary::from_records(records);
    let mut b = GraphBuilder::new();
    let trials: Vec<NodeId> = records
        .iter()
        .map(|r| {
            let attrs = vocab.one_hot(&TrialTerms::of(r, &vocab));
            b.add_node(CLINICAL_TRIAL, Some(attrs), r.nct_id.clone())
        })
        .collect::<Result<_>>()?;
    let prevalence = adverse_event_prevalence(records);
    let events: Vec<(String, NodeId)> = prevalence
        .iter()
        .map(|(ae, p)| {
            Ok((
                ae.clone(),
                b.add_node(ADVERSE_EVENT, Some(p.to_vec()), ae.clone())?,
            ))
        })
        .collect::<Result<_>>()?;
    for (r, &t) in records.iter().zip(&trials) {
        for (ae, e) in &events {
            let w = if r.adverse_events[ae] > 0.0 { 1.0 } else { 0.0 };
            b.add_edge(t, *e, BINODAL_EDGE, Some(w))?;
        }
    }
    Ok(b.freeze())
}

/// Per-trial induced subgraphs of the knowledge graph: the trial, its
/// neighbours, and the specification/targeting partners of those neighbours.
pub fn build_constituent_graphs(
    kg: &HeteroGraph,
    records: &[TrialRecord],
) -> Result<Vec<(String, HeteroGraph)>> {
    let expand: Vec<_> = [
        CONDITION_SPECIFICATION,
        DRUG_SPECIFICATION,
        TREATMENT_TARGETING,
    ]
    .iter()
    .filter_map(|l| kg.edge_label_id(l))
    .collect();
    let one = |r: &TrialRecord| -> Result<(String, HeteroGraph)> {
        let t = kg
            .find_node(CLINICAL_TRIAL, &r.nct_id)
            .ok_or_else(|| Error::data(format!("trial {} not in knowledge graph", r.nct_id)))?;
        let mut keep: BTreeSet<NodeId> = BTreeSet::from([t]);
        for &(n, _) in kg.adjacency(t) {
            keep.insert(n);
            for &(m, e) in kg.adjacency(n) {
                if expand.contains(&kg.edge(e).label) {
                    keep.insert(m);
                }
            }
        }
        Ok((r.nct_id.clone(), kg.induced_subgraph(&keep)?))
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        records.par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        records.iter().map(one).collect()
    }
}
