//! Scoring runs against planted patterns and ranking configurations.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::planted::PlantedPatternSpec;
use crate::error::{Error, Result};
use crate::search::{Metric, SearchResult};
use crate::tabular::{write_csv, Dataset, Schema};

/// Per-spec metrics plus the number of reported patterns matching no spec.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Evaluation {
    pub per_spec: Vec<Metric>,
    pub other_count: usize,
}

impl Evaluation {
    pub fn expected_count(&self) -> usize {
        self.per_spec.iter().map(|m| m.count).sum()
    }

    pub fn found_count(&self) -> usize {
        self.per_spec.iter().map(|m| m.found).sum()
    }
}

pub fn evaluate_run(result: &SearchResult, specs: &[PlantedPatternSpec]) -> Evaluation {
    let mut per_spec = vec![Metric { count: 0, found: 0 }; specs.len()];
    let mut other_count = 0;
    for p in &result.patterns {
        let mut matched = false;
        for (m, s) in per_spec.iter_mut().zip(specs) {
            if s.matches(p) {
                m.count += 1;
                m.found = 1;
                matched = true;
            }
        }
        if !matched {
            other_count += 1;
        }
    }
    Evaluation { per_spec, other_count }
}

/// Mean `found` per spec over several runs.
pub fn mean_found(runs: &[Evaluation]) -> Vec<f64> {
    let Some(first) = runs.first() else {
        return Vec::new();
    };
    (0..first.per_spec.len())
        .map(|i| runs.iter().map(|r| r.per_spec[i].found as f64).sum::<f64>() / runs.len() as f64)
        .collect()
}

/// Average rank of each configuration over datasets. Within a dataset rank
/// 1 is best and ties share their mean rank.
pub fn rank_configurations(
    table: &BTreeMap<(String, String), f64>,
    higher_is_better: bool,
) -> Result<BTreeMap<String, f64>> {
    let configs: BTreeSet<&str> = table.keys().map(|(c, _)| c.as_str()).collect();
    let datasets: BTreeSet<&str> = table.keys().map(|(_, d)| d.as_str()).collect();
    let mut totals: BTreeMap<String, f64> = configs.iter().map(|c| ((*c).to_owned(), 0.0)).collect();
    for d in &datasets {
        let mut scores = Vec::with_capacity(configs.len());
        for c in &configs {
            let s = table
                .get(&((*c).to_owned(), (*d).to_owned()))
                .ok_or_else(|| Error::InvalidArgument(format!("no score for {c} on {d}")))?;
            if s.is_nan() {
                return Err(Error::InvalidArgument(format!("score for {c} on {d} is NaN")));
            }
            scores.push((*c, if higher_is_better { -s } else { *s }));
        }
        scores.sort_by(|a, b| a.1.total_cmp(&b.1));
        let mut i = 0;
        while i < scores.len() {
            let mut j = i;
            while j + 1 < scores.len() && scores[j + 1].1 == scores[i].1 {
                j += 1;
            }
            let rank = (i + j) as f64 / 2.0 + 1.0;
            for (c, _) in &scores[i..=j] {
                *totals.get_mut(*c).expect("known config") += rank;
            }
            i = j + 1;
        }
    }
    let n = datasets.len().max(1) as f64;
    Ok(totals.into_iter().map(|(c, t)| (c, t / n)).collect())
}

/// Writes `<name>.csv`, `<name>.schema.json` and `<name>.specs.json` into
/// `dir` so the dataset can be rerun through the command line.
pub fn export_dataset(dir: &Path, name: &str, d: &Dataset, specs: &[PlantedPatternSpec]) -> Result<()> {
    let io = |path: &Path, e: std::io::Error| Error::Io {
        path: path.to_owned(),
        source: e,
    };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let csv_path = dir.join(format!("{name}.csv"));
    let file = fs::File::create(&csv_path).map_err(|e| io(&csv_path, e))?;
    write_csv(d, std::io::BufWriter::new(file))?;
    let schema_path = dir.join(format!("{name}.schema.json"));
    let schema = serde_json::to_string_pretty(&Schema::of(d)).expect("schema serializes");
    fs::write(&schema_path, schema + "\n").map_err(|e| io(&schema_path, e))?;
    let specs_path = dir.join(format!("{name}.specs.json"));
    let text = serde_json::to_string_pretty(specs).expect("specs serialize");
    fs::write(&specs_path, text + "\n").map_err(|e| io(&specs_path, e))?;
    Ok(())
}
