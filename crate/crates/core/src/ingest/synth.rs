//! Synthetic trial datasets with a planted latent-factor signal.
//!
//! Every condition, drug and adverse event gets a latent vector and a scalar
//! bias. A trial aggregates the latents of the conditions and drugs it lists;
//! its propensity for an adverse event is
//!
//! ```text
//! s = main · (bias_ae + bias_trial) + interaction · ⟨x_trial, v_ae⟩ / √k + noise · ε
//! ```
//!
//! The default has no main effect, so incidence depends on the latent dot
//! product alone. The `positive_rate` fraction of highest-scoring (trial, event) pairs
//! gets a nonzero dropout fraction `0.02 + 0.5 · logistic(s − τ)`.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use super::records::TrialRecord;
use crate::config::{key, Configurable, KvConfig};
use crate::error::{Error, Result};
use crate::rng;

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub n_trials: usize,
    pub n_conditions: usize,
    pub n_drugs: usize,
    pub n_adverse_events: usize,
    pub latent_dim: usize,
    /// Standard deviation of the additive Gaussian noise; `inf` destroys the
    /// signal entirely.
    pub noise: f64,
    /// Weight of the additive per-item biases; 0 leaves a pure dot-product
    /// model.
    pub main_effect: f64,
    pub interaction: f64,
    pub positive_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            n_trials: 300,
            n_conditions: 20,
            n_drugs: 15,
            n_adverse_events: 20,
            latent_dim: 4,
            noise: 0.1,
            main_effect: 0.0,
            interaction: 1.0,
            positive_rate: 0.3,
            seed: 1,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("n_trials", self.n_trials),
            ("n_conditions", self.n_conditions),
            ("n_drugs", self.n_drugs),
            ("n_adverse_events", self.n_adverse_events),
            ("latent_dim", self.latent_dim),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::config(format!("synth.{name} must be positive")));
            }
        }
        if self.n_conditions < 2 || self.n_drugs < 2 {
            return Err(Error::config(
                "synth needs at least 2 conditions and 2 drugs",
            ));
        }
        if self.noise.is_nan() || self.noise < 0.0 {
            return Err(Error::config("synth.noise must be non-negative"));
        }
        if !(self.positive_rate > 0.0 && self.positive_rate < 1.0) {
            return Err(Error::config("synth.positive_rate must lie in (0, 1)"));
        }
        Ok(())
    }
}

impl Configurable for SynthConfig {
    fn apply(&mut self, cfg: &KvConfig, p: &str) -> Result<()> {
        cfg.read(&key(p, "n_trials"), &mut self.n_trials)?;
        cfg.read(&key(p, "n_conditions"), &mut self.n_conditions)?;
        cfg.read(&key(p, "n_drugs"), &mut self.n_drugs)?;
        cfg.read(&key(p, "n_adverse_events"), &mut self.n_adverse_events)?;
        cfg.read(&key(p, "latent_dim"), &mut self.latent_dim)?;
        cfg.read(&key(p, "noise"), &mut self.noise)?;
        cfg.read(&key(p, "main_effect"), &mut self.main_effect)?;
        cfg.read(&key(p, "interaction"), &mut self.interaction)?;
        cfg.read(&key(p, "positive_rate"), &mut self.positive_rate)?;
        cfg.read(&key(p, "seed"), &mut self.seed)?;
        self.validate()
    }

    fn echo(&self, p: &str) -> Vec<(String, String)> {
        vec![
            (key(p, "n_trials"), self.n_trials.to_string()),
            (key(p, "n_conditions"), self.n_conditions.to_string()),
            (key(p, "n_drugs"), self.n_drugs.to_string()),
            (
                key(p, "n_adverse_events"),
                self.n_adverse_events.to_string(),
            ),
            (key(p, "latent_dim"), self.latent_dim.to_string()),
            (key(p, "noise"), self.noise.to_string()),
            (key(p, "main_effect"), self.main_effect.to_string()),
            (key(p, "interaction"), self.interaction.to_string()),
            (key(p, "positive_rate"), self.positive_rate.to_string()),
            (key(p, "seed"), self.seed.to_string()),
        ]
    }
}

const ORGANS: [&str; 16] = [
    "Pulmonary",
    "Cardiac",
    "Renal",
    "Hepatic",
    "Gastric",
    "Cerebral",
    "Dermal",
    "Ocular",
    "Thyroid",
    "Pancreatic",
    "Vascular",
    "Bronchial",
    "Colonic",
    "Spinal",
    "Ovarian",
    "Prostatic",
];
const PATHOLOGIES: [&str; 16] = [
    "Fibrosis",
    "Hypertension",
    "Failure",
    "Carcinoma",
    "Inflammation",
    "Insufficiency",
    "Stenosis",
    "Infection",
    "Lymphoma",
    "Edema",
    "Ischemia",
    "Neuropathy",
    "Dysplasia",
    "Sclerosis",
    "Hemorrhage",
    "Atrophy",
];
const SYLLABLES: [&str; 14] = [
    "ni", "te", "da", "pir", "fe", "lo", "ma", "zo", "ri", "va", "ce", "tu", "xa", "bo",
];
const ENDINGS: [&str; 8] = [
    "nib", "mab", "done", "pril", "statin", "vir", "olol", "sartan",
];
const FORMS: [&str; 6] = [
    "Oral",
    "Sodium",
    "Hydrochloride",
    "Injection",
    "Extended Release",
    "Mesylate",
];
const EVENTS: [&str; 24] = [
    "AST_ALT",
    "COPD",
    "Thrombosis",
    "Nausea",
    "Rash",
    "Fatigue",
    "Neutropenia",
    "Diarrhea",
    "Headache",
    "Anemia",
    "Insomnia",
    "Arrhythmia",
    "Hypotension",
    "Vomiting",
    "Dizziness",
    "Pneumonia",
    "Edema",
    "Pruritus",
    "Myalgia",
    "Anorexia",
    "Alopecia",
    "Cough",
    "Fever",
    "Stomatitis",
];

fn condition_names(n: usize, r: &mut rng::Rng) -> Vec<String> {
    let mut combos: Vec<String> = ORGANS
        .iter()
        .flat_map(|o| PATHOLOGIES.iter().map(move |p| format!("{o} {p}")))
        .collect();
    combos.shuffle(r);
    let base = combos.len();
    (0..n)
        .map(|i| {
            if i < base {
                combos[i].clone()
            } else {
                format!("{} Type{}", combos[i % base], i / base)
            }
        })
        .collect()
}

fn stem_names(n: usize, r: &mut rng::Rng) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(n);
    let mut attempts = 0;
    while out.len() < n {
        let s = format!(
            "{}{}{}",
            SYLLABLES[r.random_range(0..SYLLABLES.len())],
            SYLLABLES[r.random_range(0..SYLLABLES.len())],
            ENDINGS[r.random_range(0..ENDINGS.len())]
        );
        attempts += 1;
        let s = if attempts > 10_000 {
            format!("{s}{}", out.len())
        } else {
            s
        };
        let mut c = s.chars();
        let s: String = c
            .next()
            .map(|f| f.to_uppercase().chain(c).collect())
            .unwrap_or_default();
        if !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

/// About 60% of drugs are bare stems; the rest are a stem plus a dosage form,
/// so stems and forms recur across entries and become keywords.
fn drug_names(n: usize, r: &mut rng::Rng) -> Vec<String> {
    let n_stems = (n * 3).div_ceil(5).max(1);
    let stems = stem_names(n_stems, r);
    (0..n)
        .map(|i| {
            if i < n_stems {
                stems[i].clone()
            } else {
                let j = i - n_stems;
                format!(
                    "{} {}",
                    stems[j % n_stems],
                    FORMS[(j / n_stems + j) % FORMS.len()]
                )
            }
        })
        .collect()
}

fn event_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if i < EVENTS.len() {
                format!("AE_{}", EVENTS[i])
            } else {
                format!("AE_Event{i}")
            }
        })
        .collect()
}

fn gaussian_vec(k: usize, r: &mut rng::Rng) -> Vec<f64> {
    (0..k).map(|_| StandardNormal.sample(r)).collect()
}

fn pick_distinct(pool: usize, count: usize, exclude: &[usize], r: &mut rng::Rng) -> Vec<usize> {
    let mut out = Vec::with_capacity(count);
    let available = pool.saturating_sub(exclude.len());
    while out.len() < count.min(available) {
        let c = r.random_range(0..pool);
        if !exclude.contains(&c) && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

struct Item {
    latent: Vec<f64>,
    bias: f64,
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Generates a dataset. Identical configs give identical records.
pub fn generate_synthetic(config: &SynthConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let k = config.latent_dim;
    let mut names_rng = rng::stream(config.seed, &[0]);
    let conditions = condition_names(config.n_conditions, &mut names_rng);
    let drugs = drug_names(config.n_drugs, &mut names_rng);
    let events = event_names(config.n_adverse_events);

    let mut latent_rng = rng::stream(config.seed, &[1]);
    let mut items = |n: usize| -> Vec<Item> {
        (0..n)
            .map(|_| Item {
                latent: gaussian_vec(k, &mut latent_rng),
                bias: StandardNormal.sample(&mut latent_rng),
            })
            .collect()
    };
    let cond_items = items(config.n_conditions);
    let drug_items = items(config.n_drugs);
    let event_items = items(config.n_adverse_events);

    let mut trial_rng = rng::stream(config.seed, &[2]);
    struct Draft {
        diseases: Vec<usize>,
        mesh: Vec<usize>,
        drugs: Vec<usize>,
    }
    let drafts: Vec<Draft> = (0..config.n_trials)
        .map(|_| {
            let nd = trial_rng.random_range(1..=2);
            let diseases = pick_distinct(config.n_conditions, nd, &[], &mut trial_rng);
            let nm = trial_rng.random_range(0..=2);
            let mesh = pick_distinct(config.n_conditions, nm, &diseases, &mut trial_rng);
            let ng = trial_rng.random_range(1..=2);
            let drugs = pick_distinct(config.n_drugs, ng, &[], &mut trial_rng);
            Draft {
                diseases,
                mesh,
                drugs,
            }
        })
        .collect();

    let mut noise_rng = rng::stream(config.seed, &[3]);

    let sqrt_k = (k as f64).sqrt();
    let mut scores = vec![0.0; config.n_trials * config.n_adverse_events];
    for (i, d) in drafts.iter().enumerate() {
        let members: Vec<&Item> = d
            .diseases
            .iter()
            .chain(&d.mesh)
            .map(|&c| &cond_items[c])
            .chain(d.drugs.iter().map(|&g| &drug_items[g]))
            .collect();
        let norm = (members.len() as f64).sqrt();
        let mut x = vec![0.0; k];
        let mut bias = 0.0;
        for m in &members {
            for (xi, li) in x.iter_mut().zip(&m.latent) {
                *xi += li / norm;
            }
            bias += m.bias / norm;
        }
        for (j, ev) in event_items.iter().enumerate() {
            let eps: f64 = StandardNormal.sample(&mut noise_rng);
            let s = if config.noise.is_infinite() {
                eps
            } else {
                let dot: f64 = x.iter().zip(&ev.latent).map(|(a, b)| a * b).sum();
                config.main_effect * (ev.bias + bias)
                    + config.interaction * dot / sqrt_k
                    + config.noise * eps
            };
            scores[i * config.n_adverse_events + j] = s;
        }
    }

    let mut sorted = scores.clone();
    sorted.sort_by(f64::total_cmp);
    let cut = ((1.0 - config.positive_rate) * sorted.len() as f64).floor() as usize;
    let threshold = sorted[cut.min(sorted.len() - 1)];

    Ok(drafts
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let adverse_events: BTreeMap<String, f64> = events
                .iter()
                .enumerate()
                .map(|(j, name)| {
                    let s = scores[i * config.n_adverse_events + j];
                    let frac = if s >= threshold {
                        0.02 + 0.5 * logistic(s - threshold)
                    } else {
                        0.0
                    };
                    (name.clone(), frac)
                })
                .collect();
            TrialRecord {
                nct_id: format!("NCT{:08}", 10_000 + i),
                trial_id: (100_000 + i).to_string(),
                diseases: d.diseases.iter().map(|&c| conditions[c].clone()).collect(),
                mesh_terms: d.mesh.iter().map(|&c| conditions[c].clone()).collect(),
                drugs: d.drugs.iter().map(|&g| drugs[g].clone()).collect(),
                adverse_events,
            }
        })
        .collect())
}
