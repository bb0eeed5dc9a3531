//! Flat `key=value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys are dotted
//! (`walk.length=40`); each component reads the keys under its own prefix and
//! [`KvConfig::finish`] rejects anything nobody claimed.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Default, Clone)]
pub struct KvConfig {
    entries: BTreeMap<String, String>,
    used: RefCell<BTreeSet<String>>,
}

impl KvConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!(
                    "line {}: expected key=value, got `{line}`",
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::config(format!("line {}: empty key", lineno + 1)));
            }
            if entries
                .insert(key.to_string(), value.trim().to_string())
                .is_some()
            {
                return Err(Error::config(format!("duplicate key `{key}`")));
            }
        }
        Ok(Self {
            entries,
            used: RefCell::default(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        let v = self.entries.get(key)?;
        self.used.borrow_mut().insert(key.to_string());
        Some(v.as_str())
    }

    /// Parses `key` if present, leaving `slot` untouched otherwise.
    pub fn read<T>(&self, key: &str, slot: &mut T) -> Result<()>
    where
        T: FromStr,
        T::Err: Display,
    {
        if let Some(v) = self.raw(key) {
            *slot = v
                .parse()
                .map_err(|e| Error::config(format!("`{key}={v}`: {e}")))?;
        }
        Ok(())
    }

    /// Comma-separated list.
    pub fn read_list<T>(&self, key: &str, slot: &mut Vec<T>) -> Result<()>
    where
        T: FromStr,
        T::Err: Display,
    {
        if let Some(v) = self.raw(key) {
            *slot = v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse()
                        .map_err(|e| Error::config(format!("`{key}={v}`: {e}")))
                })
                .collect::<Result<_>>()?;
        }
        Ok(())
    }

    /// Errors on keys that were never read.
    pub fn finish(&self) -> Result<()> {
        let used = self.used.borrow();
        let unknown: Vec<_> = self
            .entries
            .keys()
            .filter(|k| !used.contains(*k))
            .cloned()
            .collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::config(format!(
                "unknown keys: {}",
                unknown.join(", ")
            )))
        }
    }

    pub fn to_text(&self) -> String {
        self.entries
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect()
    }
}

/// Config structs echo themselves as `key=value` lines and read overrides.
pub trait Configurable {
    fn apply(&mut self, cfg: &KvConfig, prefix: &str) -> Result<()>;
    fn echo(&self, prefix: &str) -> Vec<(String, String)>;
}

pub(crate) fn key(prefix: &str, name: &str) -> String {
    if prefix.is_empty() {
        name.to_string()
    } else {
        format!("{prefix}.{name}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_tracks_usage() {
        let cfg =
            KvConfig::parse("# comment\nwalk.length = 40\nsage.dims=32,16\n\nextra=1").unwrap();
        let mut len = 0usize;
        let mut dims: Vec<usize> = vec![];
        cfg.read("walk.length", &mut len).unwrap();
        cfg.read_list("sage.dims", &mut dims).unwrap();
        assert_eq!(len, 40);
        assert_eq!(dims, vec![32, 16]);
        let err = cfg.finish().unwrap_err();
        assert!(err.to_string().contains("extra"));
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(KvConfig::parse("novalue").unwrap_err().is_config());
        assert!(KvConfig::parse("a=1\na=2").unwrap_err().is_config());
        let cfg = KvConfig::parse("n=abc").unwrap();
        let mut n = 0u32;
        assert!(cfg.read("n", &mut n).unwrap_err().is_config());
    }
}
