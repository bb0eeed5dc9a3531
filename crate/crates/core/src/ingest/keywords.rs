use std::collections::{BTreeMap, BTreeSet};

/// Lower-cases, turns punctuation into whitespace and collapses runs of
/// whitespace.
pub fn normalize(entry: &str) -> String {
    let cleaned: String = entry
        .chars()
        .map(|c| {
            if c.is_alphanumeric() || c.is_whitespace() {
                c
            } else {
                ' '
            }
        })
        .collect::<String>()
        .to_lowercase();
    cleaned.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Keywords (tokens shared by several entries) and the specific entries
/// that contain them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KeywordSplit {
    pub keywords: BTreeSet<String>,
    pub specifics: BTreeSet<String>,
    /// specific → keywords occurring in it
    pub membership: BTreeMap<String, BTreeSet<String>>,
}

impl KeywordSplit {
    /// Keywords occurring as tokens of `entry`.
    pub fn keywords_in(&self, entry: &str) -> BTreeSet<String> {
        normalize(entry)
            .split(' ')
            .filter(|t| self.keywords.contains(*t))
            .map(str::to_string)
            .collect()
    }

    /// The specific term for `entry`, or `None` when the whole entry is a
    /// keyword (or empty after normalization).
    pub fn specific_for(&self, entry: &str) -> Option<String> {
        let e = normalize(entry);
        self.specifics.contains(&e).then_some(e)
    }
}

/// Splits a multiset of raw entries into keywords and specifics.
///
/// A token becomes a keyword when it occurs in at least two distinct
/// normalized entries. Every distinct entry that is not itself a keyword is a
/// specific.
pub fn extract_keywords<I, S>(entries: I) -> KeywordSplit
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let distinct: BTreeSet<String> = entries
        .into_iter()
        .map(|e| normalize(e.as_ref()))
        .filter(|e| !e.is_empty())
        .collect();

    let mut doc_freq: BTreeMap<&str, usize> = BTreeMap::new();
    for e in &distinct {
        let tokens: BTreeSet<&str> = e.split(' ').collect();
        for t in tokens {
            *doc_freq.entry(t).or_insert(0) += 1;
        }
    }
    let keywords: BTreeSet<String> = doc_freq
        .into_iter()
        .filter(|&(_, n)| n >= 2)
        .map(|(t, _)| t.to_string())
        .collect();

    let specifics: BTreeSet<String> = distinct
        .iter()
        .filter(|e| !keywords.contains(*e))
        .cloned()
        .collect();
    let membership = specifics
        .iter()
        .map(|s| {
            let ks = s
                .split(' ')
                .filter(|t| keywords.contains(*t))
                .map(str::to_string)
                .collect();
            (s.clone(), ks)
        })
        .collect();

    KeywordSplit {
        keywords,
        specifics,
        membership,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[&str]) -> BTreeSet<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn pulmonary_example() {
        let s = extract_keywords(["Pulmonary Fibrosis", "Pulmonary Hypertension"]);
        assert_eq!(s.keywords, set(&["pulmonary"]));
        assert_eq!(
            s.specifics,
            set(&["pulmonary fibrosis", "pulmonary hypertension"])
        );
        for sp in &s.specifics {
            assert_eq!(s.membership[sp], set(&["pulmonary"]));
        }
    }

    #[test]
    fn single_entry_has_no_keywords() {
        let s = extract_keywords(["Asthma"]);
        assert!(s.keywords.is_empty());
        assert_eq!(s.specifics, set(&["asthma"]));
    }

    #[test]
    fn cyclic_tokens() {
        // document frequencies: a=2, b=2, c=2
        let s = extract_keywords(["a b", "b c", "c a"]);
        assert_eq!(s.keywords, set(&["a", "b", "c"]));
        assert_eq!(s.specifics, set(&["a b", "b c", "c a"]));
        assert_eq!(s.membership["a b"], set(&["a", "b"]));
    }

    #[test]
    fn repeated_entry_counts_once() {
        let s = extract_keywords(["Renal Failure", "renal failure", "Renal-Failure"]);
        assert!(s.keywords.is_empty());
        assert_eq!(s.specifics, set(&["renal failure"]));
    }

    #[test]
    fn entry_equal_to_keyword_is_not_specific() {
        let s = extract_keywords(["Pulmonary", "Pulmonary Fibrosis"]);
        assert_eq!(s.keywords, set(&["pulmonary"]));
        assert_eq!(s.specifics, set(&["pulmonary fibrosis"]));
        assert!(s.keywords.is_disjoint(&s.specifics));
        assert_eq!(s.specific_for("PULMONARY"), None);
        assert_eq!(s.keywords_in("Pulmonary"), set(&["pulmonary"]));
    }
}
