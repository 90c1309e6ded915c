//! Run reports: canonical JSON and markdown renderings of a search result.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mining::Pattern;
use crate::search::{SearchConfig, SearchResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunMetadata {
    pub input: Option<String>,
    pub preset: Option<String>,
    pub config: SearchConfig,
    pub seed: u64,
    pub iterations: u64,
    /// Seconds; `None` unless timing was requested.
    pub wall_time: Option<f64>,
    pub node_count: usize,
    pub model_action_count: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub run: RunMetadata,
    /// Sorted by interestingness, highest first.
    pub patterns: Vec<Pattern>,
}

impl ReportDocument {
    pub fn new(result: &SearchResult, config: &SearchConfig, input: Option<String>, preset: Option<String>) -> Self {
        let mut patterns = result.patterns.clone();
        patterns.sort_by(|a, b| {
            b.interestingness
                .total_cmp(&a.interestingness)
                .then(a.iteration.cmp(&b.iteration))
                .then_with(|| a.state_key.cmp(&b.state_key))
        });
        ReportDocument {
            schema_version: SCHEMA_VERSION,
            run: RunMetadata {
                input,
                preset,
                config: config.clone(),
                seed: config.seed,
                iterations: result.iterations,
                wall_time: result.wall_time,
                node_count: result.node_count,
                model_action_count: result.model_action_count,
            },
            patterns,
        }
    }

    /// Pretty JSON with object keys sorted at every level.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("report serializes");
        let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ReportDocument =
            serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("malformed report: {e}")))?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "report schema version {} is not {SCHEMA_VERSION}",
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    pub fn to_markdown(&self) -> String {
        let r = &self.run;
        let mut out = String::from("# Insight report\n\n");
        if let Some(input) = &r.input {
            let _ = writeln!(out, "- Input: `{input}`");
        }
        if let Some(preset) = &r.preset {
            let _ = writeln!(out, "- Preset: {preset}");
        }
        let _ = writeln!(out, "- Seed: {}", r.seed);
        let _ = writeln!(out, "- Iterations: {}", r.iterations);
        let _ = writeln!(out, "- Nodes: {}", r.node_count);
        let _ = writeln!(out, "- Model actions: {}", r.model_action_count);
        if let Some(t) = r.wall_time {
            let _ = writeln!(out, "- Wall time: {t:.2} s");
        }
        let _ = writeln!(out, "- Patterns: {}\n", self.patterns.len());
        for (i, p) in self.patterns.iter().enumerate() {
            let _ = writeln!(out, "## {}. {} ({:.3})\n", i + 1, p.kind.as_str(), p.interestingness);
            let _ = writeln!(out, "{}\n", p.summary);
            let _ = writeln!(out, "- Columns: {}", p.columns.join(", "));
            if !p.tags.is_empty() {
                let _ = writeln!(out, "- Tags: {}", p.tags.join(", "));
            }
            let _ = writeln!(out, "- Path: `{}`", p.state_path.join(" → "));
            let _ = writeln!(out, "- Found at iteration {}\n", p.iteration);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::{run_search, Preset};
    use crate::tabular::student_table;

    fn report() -> ReportDocument {
        let cfg = Preset::C6.config(120, 4);
        let result = run_search(&student_table(), &cfg).unwrap();
        ReportDocument::new(&result, &cfg, Some("students.csv".into()), Some("C6".into()))
    }

    #[test]
    fn json_round_trips() {
        let doc = report();
        assert!(!doc.patterns.is_empty());
        let text = doc.to_json();
        assert_eq!(ReportDocument::from_json(&text).unwrap(), doc);
        assert_eq!(ReportDocument::from_json(&text).unwrap().to_json(), text);
    }

    #[test]
    fn patterns_are_sorted_and_above_threshold() {
        let doc = report();
        assert!(doc
            .patterns
            .windows(2)
            .all(|w| w[0].interestingness >= w[1].interestingness));
        assert!(doc.patterns.iter().all(|p| p.interestingness > 0.5));
    }

    #[test]
    fn keys_are_sorted() {
        let text = report().to_json();
        let top: Vec<&str> = text
            .lines()
            .filter(|l| l.starts_with("  \""))
            .map(|l| l.trim().split('"').nth(1).unwrap())
            .collect();
        assert_eq!(top, ["patterns", "run", "schemaVersion"]);
        let markdown = report().to_markdown();
        assert!(markdown.starts_with("# Insight report"));
    }

    #[test]
    fn wrong_version_is_rejected() {
        let text = report().to_json().replace("\"schemaVersion\": 1", "\"schemaVersion\": 9");
        assert!(ReportDocument::from_json(&text).is_err());
    }
}
