//! Flat `key = value` text documents, used for run configs, manifests and
//! summaries. Blank lines and `#` comments are ignored; later keys override
//! earlier ones.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KvDoc {
    entries: BTreeMap<String, String>,
    order: Vec<String>,
}

impl KvDoc {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut doc = KvDoc::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: n + 1,
                msg: format!("expected key=value, got {line:?}"),
            })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(Error::Parse {
                    line: n + 1,
                    msg: "empty key".into(),
                });
            }
            doc.set(k, v.trim());
        }
        Ok(doc)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        if !self.entries.contains_key(key) {
            self.order.push(key.to_string());
        }
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.order.iter().map(String::as_str)
    }

    /// Parse a typed value if the key is present.
    pub fn get_parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::InvalidInput(format!("bad value for {key}: {v:?}"))),
        }
    }

    /// Comma-separated list of typed values.
    pub fn get_list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse()
                        .map_err(|_| Error::InvalidInput(format!("bad value for {key}: {s:?}")))
                })
                .collect::<Result<Vec<T>>>()
                .map(Some),
        }
    }

    /// Entries of `other` override ours.
    pub fn merge(&mut self, other: &KvDoc) {
        for k in other.keys() {
            self.set(k, other.get(k).unwrap_or_default());
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for k in &self.order {
            let _ = writeln!(s, "{k} = {}", self.entries[k]);
        }
        s
    }
}
