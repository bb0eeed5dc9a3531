use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const COL_NCT: &str = "NCT_id";
pub const COL_TRIAL: &str = "Trial ID";
pub const COL_DISEASE: &str = "Disease";
pub const COL_MESH: &str = "MeSH Term";
pub const COL_DRUG: &str = "Drug";
pub const AE_PREFIX: &str = "AE_";

/// One trial. Adverse-event keys are the full column names (`AE_COPD`).
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub nct_id: String,
    pub trial_id: String,
    pub diseases: Vec<String>,
    pub mesh_terms: Vec<String>,
    pub drugs: Vec<String>,
    pub adverse_events: BTreeMap<String, f64>,
}

impl TrialRecord {
    /// Disease and MeSH entries together.
    pub fn condition_entries(&self) -> impl Iterator<Item = &String> {
        self.diseases.iter().chain(&self.mesh_terms)
    }
}

/// AE column names of a dataset (identical for every record).
pub fn adverse_event_names(records: &[TrialRecord]) -> Vec<String> {
    records
        .first()
        .map(|r| r.adverse_events.keys().cloned().collect())
        .unwrap_or_default()
}

fn split_cell(cell: &str) -> impl Iterator<Item = String> + '_ {
    cell.split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
}

fn push_unique(dst: &mut Vec<String>, items: impl Iterator<Item = String>) {
    for it in items {
        if !dst.contains(&it) {
            dst.push(it);
        }
    }
}

struct Partial {
    record: TrialRecord,
    first_line: u64,
}

/// Parses trial CSV from any reader.
///
/// Rows sharing an `NCT_id` are merged: multi-valued fields are unioned in
/// order of first appearance, and adverse-event fractions must agree. Cells
/// may hold several `;`-separated values. An empty AE cell means "not given
/// on this row"; every AE must be given on at least one row of a trial.
pub fn parse_trials<R: Read>(reader: R) -> Result<Vec<TrialRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let nct = col(COL_NCT)?;
    let trial = col(COL_TRIAL)?;
    let disease = col(COL_DISEASE)?;
    let mesh = col(COL_MESH)?;
    let drug = col(COL_DRUG)?;
    let ae_cols: Vec<(usize, String)> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| h.trim().starts_with(AE_PREFIX))
        .map(|(i, h)| (i, h.trim().to_string()))
        .collect();

    let mut order: Vec<String> = Vec::new();
    let mut partial: HashMap<String, Partial> = HashMap::new();

    for row in rdr.records() {
        let row = row?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let id = row[nct].trim().to_string();
        if id.is_empty() {
            return Err(Error::Row {
                line,
                message: format!("empty {COL_NCT}"),
            });
        }
        let entry = partial.entry(id.clone()).or_insert_with(|| {
            order.push(id.clone());
            Partial {
                record: TrialRecord {
                    nct_id: id.clone(),
                    trial_id: String::new(),
                    diseases: vec![],
                    mesh_terms: vec![],
                    drugs: vec![],
                    adverse_events: BTreeMap::new(),
                },
                first_line: line,
            }
        });
        let rec = &mut entry.record;

        let tid = row[trial].trim();
        if !tid.is_empty() {
            if rec.trial_id.is_empty() {
                rec.trial_id = tid.to_string();
            } else if rec.trial_id != tid {
                return Err(Error::Row {
                    line,
                    message: format!(
                        "conflicting {COL_TRIAL} for {id}: {} vs {tid}",
                        rec.trial_id
                    ),
                });
            }
        }
        push_unique(&mut rec.diseases, split_cell(&row[disease]));
        push_unique(&mut rec.mesh_terms, split_cell(&row[mesh]));
        push_unique(&mut rec.drugs, split_cell(&row[drug]));

        for (i, name) in &ae_cols {
            let cell = row[*i].trim();
            if cell.is_empty() {
                continue;
            }
            let value: f64 = cell.parse().map_err(|_| Error::Row {
                line,
                message: format!("cannot parse `{cell}` in column `{name}`"),
            })?;
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::OutOfRange {
                    line,
                    column: name.clone(),
                    value,
                });
            }
            match rec.adverse_events.get(name) {
                Some(&prev) if prev != value => {
                    return Err(Error::Row {
                        line,
                        message: format!(
                            "conflicting value for `{name}` in {id}: {prev} vs {value}"
                        ),
                    })
                }
                _ => {
                    rec.adverse_events.insert(name.clone(), value);
                }
            }
        }
    }

    order
        .into_iter()
        .map(|id| {
            let p = partial.remove(&id).expect("ordered id present");
            if let Some((_, missing)) = ae_cols
                .iter()
                .find(|(_, n)| !p.record.adverse_events.contains_key(n))
            {
                return Err(Error::Row {
                    line: p.first_line,
                    message: format!("{id}: no value for `{missing}`"),
                });
            }
            Ok(p.record)
        })
        .collect()
}

pub fn parse_trials_csv(path: &Path) -> Result<Vec<TrialRecord>> {
    let f = std::fs::File::open(path).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_trials(std::io::BufReader::new(f))
}

/// Writes one row per trial, multi-valued fields joined with `;`.
pub fn write_trials<W: Write>(records: &[TrialRecord], writer: W) -> Result<()> {
    let ae_names = adverse_event_names(records);
    if let Some(bad) = ae_names.iter().find(|n| !n.starts_with(AE_PREFIX)) {
        return Err(Error::data(format!(
            "adverse event `{bad}` lacks the `{AE_PREFIX}` column prefix"
        )));
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec![
        COL_NCT.to_string(),
        COL_TRIAL.to_string(),
        COL_DISEASE.to_string(),
    ];
    header.extend(ae_names.iter().cloned());
    header.push(COL_MESH.to_string());
    header.push(COL_DRUG.to_string());
    w.write_record(&header)?;
    for r in records {
        let mut row = vec![r.nct_id.clone(), r.trial_id.clone(), r.diseases.join(";")];
        for name in &ae_names {
            let v = r
                .adverse_events
                .get(name)
                .ok_or_else(|| Error::data(format!("{} lacks adverse event `{name}`", r.nct_id)))?;
            row.push(v.to_string());
        }
        row.push(r.mesh_terms.join(";"));
        row.push(r.drugs.join(";"));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trials_csv(records: &[TrialRecord], path: &Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    write_trials(records, std::io::BufWriter::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "NCT_id,Trial ID,Disease,AE_AST_ALT,AE_COPD,MeSH Term,Drug\n";

    #[test]
    fn sample_row() {
        let csv = format!("{HEADER}NCT00001596,161979,Pulmonary,0.028571429,0.575600801,Sleep Apnea,Pirfenidone\n");
        let recs = parse_trials(csv.as_bytes()).unwrap();
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert_eq!(r.nct_id, "NCT00001596");
        assert_eq!(r.trial_id, "161979");
        assert_eq!(r.diseases, vec!["Pulmonary"]);
        assert_eq!(r.drugs, vec!["Pirfenidone"]);
        assert_eq!(r.adverse_events["AE_AST_ALT"], 0.028571429);
    }

    #[test]
    fn header_only_is_empty() {
        assert!(parse_trials(HEADER.as_bytes()).unwrap().is_empty());
    }

    #[test]
    fn rows_with_same_id_are_merged() {
        let csv = format!(
            "{HEADER}NCT1,1,Pulmonary,0.1,0,Sleep Apnea,Pirfenidone\nNCT1,1,Pulmonary,,,Fibrosis,\n"
        );
        let recs = parse_trials(csv.as_bytes()).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].mesh_terms, vec!["Sleep Apnea", "Fibrosis"]);
        assert_eq!(recs[0].diseases, vec!["Pulmonary"]);
    }

    #[test]
    fn quoted_multi_value_cells() {
        let csv = format!("{HEADER}NCT1,1,\"Pulmonary, Fibrosis;Asthma\",0.1,0,,\"A;B\"\n");
        let recs = parse_trials(csv.as_bytes()).unwrap();
        assert_eq!(recs[0].diseases, vec!["Pulmonary, Fibrosis", "Asthma"]);
        assert_eq!(recs[0].drugs, vec!["A", "B"]);
        assert!(recs[0].mesh_terms.is_empty());
    }

    #[test]
    fn schema_and_row_errors() {
        let err = parse_trials("NCT_id,Trial ID,Disease,MeSH Term\n".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::MissingColumn(c) if c == "Drug"));

        let bad = format!("{HEADER}NCT1,1,P,abc,0,,D\n");
        assert!(matches!(
            parse_trials(bad.as_bytes()).unwrap_err(),
            Error::Row { line: 2, .. }
        ));

        let range = format!("{HEADER}NCT1,1,P,1.5,0,,D\n");
        assert!(matches!(
            parse_trials(range.as_bytes()).unwrap_err(),
            Error::OutOfRange { line: 2, .. }
        ));

        let conflict = format!("{HEADER}NCT1,1,P,0.1,0,,D\nNCT1,1,P,0.2,0,,D\n");
        assert!(matches!(
            parse_trials(conflict.as_bytes()).unwrap_err(),
            Error::Row { line: 3, .. }
        ));
    }

    #[test]
    fn write_then_parse() {
        let csv = format!("{HEADER}NCT1,1,Pulmonary;Asthma,0.1,0,Sleep Apnea,Pirfenidone\nNCT2,2,Renal,0,0.3333333333333333,,X\n");
        let recs = parse_trials(csv.as_bytes()).unwrap();
        let mut out = Vec::new();
        write_trials(&recs, &mut out).unwrap();
        assert_eq!(parse_trials(&out[..]).unwrap(), recs);
    }
}
