//! Fixed English templates turning fitted models into pattern summaries.

use serde::{Deserialize, Serialize};

use super::model::{Artifacts, FittedModel, Item, ModelKind, Rule};
use crate::actions::Action;

/// A reported insight: the textual summary of a fitted model with its
/// interestingness and the action path that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Pattern {
    pub summary: String,
    pub interestingness: f64,
    pub kind: ModelKind,
    /// Base columns involved, sorted.
    pub columns: Vec<String>,
    pub tags: Vec<String>,
    pub state_path: Vec<String>,
    pub state_key: String,
    /// Search iteration at which the pattern was first found.
    pub iteration: u64,
}

fn items(items: &[Item]) -> String {
    items
        .iter()
        .map(|i| format!("{}={}", i.column, i.value))
        .collect::<Vec<_>>()
        .join(" and ")
}

/// The rule maximizing `kulc · (1 − ir)`, first on ties.
pub fn best_rule(rules: &[Rule]) -> Option<&Rule> {
    let score = |r: &Rule| r.kulc * (1.0 - r.ir);
    rules.iter().fold(None, |best: Option<&Rule>, r| match best {
        Some(b) if score(b) >= score(r) => Some(b),
        _ => Some(r),
    })
}

fn summary(m: &FittedModel) -> (String, Vec<String>) {
    match m.artifacts() {
        Artifacts::Tree(t) => {
            let depth = match m.action().action() {
                Action::DecisionTree { max_depth, .. } => *max_depth,
                _ => 0,
            };
            let split = t.top_split.as_ref().map_or_else(
                || "it has no split".to_owned(),
                |s| format!("top split: {} <= {}", s.feature, s.threshold),
            );
            if t.classification {
                let covered = (t.coverage * t.class_count as f64).round() as usize;
                (
                    format!(
                        "A depth-{depth} decision tree predicts {} with macro F1 {:.3} (target entropy {:.3}, {covered} of {} classes predicted); {split}.",
                        t.target, t.score, t.target_entropy, t.class_count
                    ),
                    vec!["classification".into()],
                )
            } else {
                (
                    format!(
                        "A depth-{depth} regression tree explains {} with R² {:.3} (target entropy {:.3}); {split}.",
                        t.target, t.score, t.target_entropy
                    ),
                    vec!["regression".into()],
                )
            }
        }
        Artifacts::UnivariateOutliers(u) => {
            let top = u.flagged.iter().fold(None, |best: Option<&super::model::FlaggedValue>, f| {
                let better = if u.quantitative {
                    best.is_none_or(|b| f.out > b.out)
                } else {
                    best.is_none_or(|b| f.out < b.out)
                };
                if better {
                    Some(f)
                } else {
                    best
                }
            });
            let text = match top {
                None => format!("{} has no outlier values.", u.column),
                Some(f) if u.quantitative => format!(
                    "{} has {} outlier value(s); the most extreme is {} with z-score {:.2}.",
                    u.column,
                    u.flagged.len(),
                    f.value,
                    f.out
                ),
                Some(f) => format!(
                    "{} is dominated by one value; {} outlier value(s), the rarest being {} with frequency {:.3}.",
                    u.column,
                    u.flagged.len(),
                    f.value,
                    f.out
                ),
            };
            (text, Vec::new())
        }
        Artifacts::BivariateOutliers(b) => {
            let top = b.flagged.iter().fold(None, |best: Option<&super::model::FlaggedPair>, f| {
                if best.is_none_or(|x| f.z > x.z) {
                    Some(f)
                } else {
                    best
                }
            });
            let text = match top {
                None => format!(
                    "{} and {} (correlation {:.3}) have no outlier pairs.",
                    b.first, b.second, b.correlation
                ),
                Some(f) => format!(
                    "{} and {} are correlated ({:.3}); the pair ({}, {}) is an outlier with z-score {:.2} among {} flagged pair(s).",
                    b.first,
                    b.second,
                    b.correlation,
                    f.first,
                    f.second,
                    f.z,
                    b.flagged.len()
                ),
            };
            (text, Vec::new())
        }
        Artifacts::Clustering(c) => {
            let assoc = c.association.as_ref().map_or_else(String::new, |(col, v)| {
                format!(", most associated with {col} (Cramér's V {v:.3})")
            });
            (
                format!(
                    "k-means with k = {} finds clusters of sizes {:?} with silhouette {:.3}{assoc}.",
                    c.k, c.sizes, c.silhouette
                ),
                Vec::new(),
            )
        }
        Artifacts::Trend(t) => {
            let mut parts = Vec::new();
            let mut tags = Vec::new();
            if t.trend {
                let dir = if t.mk_s > 0.0 { "increasing" } else { "decreasing" };
                parts.push(format!("an {dir} trend (Mann-Kendall p = {:.2e})", t.mk_p));
                tags.push("trend".to_owned());
            }
            if t.period {
                parts.push(format!(
                    "periodicity at lag {} (autocorrelation {:.3})",
                    t.best_lag, t.max_autocorrelation
                ));
                tags.push("period".to_owned());
            }
            if t.outliers {
                parts.push(format!("outliers around its linear trend (max z-score {:.2})", t.max_residual_z));
                tags.push("outliers".to_owned());
            }
            let body = if parts.is_empty() {
                "shows no trend, periodicity or outliers".to_owned()
            } else {
                format!("shows {}", parts.join(", "))
            };
            (format!("{} over {} {body}.", t.target, t.time), tags)
        }
        Artifacts::AssociationRules { rules } => match best_rule(rules) {
            None => ("No association rule meets the support and confidence thresholds.".to_owned(), Vec::new()),
            Some(r) => (
                format!(
                    "Rule {} => {} holds with confidence {:.3}, Kulczynski {:.3} and imbalance ratio {:.3} ({} rule(s) mined).",
                    items(&r.antecedent),
                    items(&r.consequent),
                    r.confidence,
                    r.kulc,
                    r.ir,
                    rules.len()
                ),
                Vec::new(),
            ),
        },
    }
}

/// Renders the pattern of `m` with interestingness `intr`, reached by the
/// canonical action `path`. State key and iteration are left for the
/// search to fill in.
pub fn render_pattern(m: &FittedModel, intr: f64, path: &[String]) -> Pattern {
    let (summary, tags) = summary(m);
    Pattern {
        summary,
        interestingness: intr,
        kind: m.kind(),
        columns: m.involved_columns().to_vec(),
        tags,
        state_path: path.to_vec(),
        state_key: String::new(),
        iteration: 0,
    }
}
