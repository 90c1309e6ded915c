//! Counting how often expected patterns were reported.

use serde::{Deserialize, Serialize};

use super::engine::SearchResult;
use crate::mining::{ModelKind, Pattern};

/// A predicate over reported patterns: one of `kinds`, involving every
/// column in `columns`, and carrying every tag in `tags`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct PatternDescriptor {
    pub kinds: Vec<ModelKind>,
    pub columns: Vec<String>,
    #[serde(default)]
    pub tags: Vec<String>,
}

impl PatternDescriptor {
    pub fn new(kinds: &[ModelKind], columns: &[&str]) -> Self {
        PatternDescriptor {
            kinds: kinds.to_vec(),
            columns: columns.iter().map(|c| (*c).to_owned()).collect(),
            tags: Vec::new(),
        }
    }

    pub fn with_tags(mut self, tags: &[&str]) -> Self {
        self.tags = tags.iter().map(|t| (*t).to_owned()).collect();
        self
    }

    pub fn matches(&self, p: &Pattern) -> bool {
        self.kinds.contains(&p.kind)
            && self.columns.iter().all(|c| p.columns.contains(c))
            && self.tags.iter().all(|t| p.tags.contains(t))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Metric {
    pub count: usize,
    pub found: usize,
}

/// `count` is the number of matching patterns, `found = min(count, 1)`.
pub fn collect_metrics(result: &SearchResult, expected: &[PatternDescriptor]) -> Vec<Metric> {
    expected
        .iter()
        .map(|e| {
            let count = result.patterns.iter().filter(|p| e.matches(p)).count();
            Metric {
                count,
                found: count.min(1),
            }
        })
        .collect()
}
