//! Grounding a template by walking its parameter tree under a policy.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::action::{ActionKind, GroundAction};
use super::precondition::{check_precondition, PreconditionContext, Verdict};
use super::template::{ActionTemplate, ParamNode};
use crate::tabular::Dataset;

/// Exploration floor for weighted-random parameter selection.
pub const WEIGHT_FLOOR: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "policy")]
pub enum ParameterPolicy {
    Random,
    WeightedRandom,
    Uct { c: f64 },
}

/// Running interestingness delta credited to one parameter value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamValueStats {
    pub delta_sum: f64,
    pub visits: u64,
}

impl ParamValueStats {
    pub fn mean_delta(&self) -> Option<f64> {
        (self.visits > 0).then(|| self.delta_sum / self.visits as f64)
    }
}

/// Parameter statistics keyed by (action kind, parameter name, value).
#[derive(Debug, Clone, Default)]
pub struct ParamStatsStore {
    stats: HashMap<(ActionKind, String, String), ParamValueStats>,
}

impl ParamStatsStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, kind: ActionKind, param: &str, value: &str) -> Option<&ParamValueStats> {
        self.stats.get(&(kind, param.to_owned(), value.to_owned()))
    }

    pub fn record_value(&mut self, kind: ActionKind, param: &str, value: &str, delta: f64) {
        let s = self.stats.entry((kind, param.to_owned(), value.to_owned())).or_default();
        s.delta_sum += delta;
        s.visits += 1;
    }

    /// Credits `delta` to every parameter value bound in `a`.
    pub fn record(&mut self, a: &GroundAction, delta: f64) {
        for (param, value) in a.bindings() {
            self.record_value(a.kind(), param, value, delta);
        }
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }
}

/// Sampling weights of the weighted-random policy over `labels`.
pub fn selection_weights(kind: ActionKind, param: &str, labels: &[String], stats: &ParamStatsStore) -> Vec<f64> {
    labels
        .iter()
        .map(|v| {
            stats
                .get(kind, param, v)
                .and_then(ParamValueStats::mean_delta)
                .map_or(WEIGHT_FLOOR, |m| m.max(WEIGHT_FLOOR))
        })
        .collect()
}

/// Chooses the index of one of `labels` (non-empty) under `policy`.
pub fn choose_value<R: Rng + ?Sized>(
    policy: ParameterPolicy,
    kind: ActionKind,
    param: &str,
    labels: &[String],
    stats: &ParamStatsStore,
    rng: &mut R,
) -> usize {
    assert!(!labels.is_empty(), "no candidate values for `{param}`");
    match policy {
        ParameterPolicy::Random => rng.random_range(0..labels.len()),
        ParameterPolicy::WeightedRandom => {
            let weights = selection_weights(kind, param, labels, stats);
            let total: f64 = weights.iter().sum();
            let mut x = rng.random::<f64>() * total;
            for (i, w) in weights.iter().enumerate() {
                if x < *w {
                    return i;
                }
                x -= w;
            }
            labels.len() - 1
        }
        ParameterPolicy::Uct { c } => {
            let seen: Vec<Option<&ParamValueStats>> = labels
                .iter()
                .map(|v| stats.get(kind, param, v).filter(|s| s.visits > 0))
                .collect();
            let unvisited: Vec<usize> = (0..labels.len()).filter(|&i| seen[i].is_none()).collect();
            if !unvisited.is_empty() {
                return unvisited[rng.random_range(0..unvisited.len())];
            }
            let total: u64 = seen.iter().flatten().map(|s| s.visits).sum();
            let ln_total = (total as f64).ln();
            let score = |s: &ParamValueStats| {
                s.mean_delta().unwrap_or(0.0) + c * (ln_total / s.visits as f64).sqrt()
            };
            let mut best = 0;
            for i in 1..labels.len() {
                if score(seen[i].expect("visited")) > score(seen[best].expect("visited")) {
                    best = i;
                }
            }
            best
        }
    }
}

/// Every path of the template failed; the caller deactivates it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NoValidAction {
    /// Ground actions that were built but rejected, with their verdicts.
    pub rejected: Vec<(String, Verdict)>,
}

/// Grounds `t` on `d`: walks the tree top-down choosing values by
/// `policy`, and on a precondition failure or a dead-end level excludes
/// that path prefix and walks again, until an action passes every
/// precondition or the tree is exhausted.
pub fn instantiate<R: Rng + ?Sized>(
    t: &ActionTemplate,
    d: &Dataset,
    ctx: &PreconditionContext,
    policy: ParameterPolicy,
    stats: &ParamStatsStore,
    rng: &mut R,
) -> Result<GroundAction, NoValidAction> {
    let mut nodes: HashMap<Vec<String>, Option<ParamNode>> = HashMap::new();
    let mut excluded: HashSet<Vec<String>> = HashSet::new();
    let mut failure = NoValidAction::default();
    'walk: loop {
        let mut partial = Vec::new();
        let mut path: Vec<String> = Vec::new();
        loop {
            let node = nodes
                .entry(path.clone())
                .or_insert_with(|| t.next_node(d, &partial))
                .clone();
            let Some(node) = node else { break };
            let open: Vec<usize> = (0..node.candidates.len())
                .filter(|&i| {
                    let mut p = path.clone();
                    p.push(node.candidates[i].to_string());
                    !excluded.contains(&p)
                })
                .collect();
            if open.is_empty() {
                if path.is_empty() {
                    return Err(failure);
                }
                excluded.insert(path);
                continue 'walk;
            }
            let labels: Vec<String> = open.iter().map(|&i| node.candidates[i].to_string()).collect();
            let pick = choose_value(policy, t.kind(), &node.name, &labels, stats, rng);
            partial.push(node.candidates[open[pick]].clone());
            path.push(labels[pick].clone());
        }
        let a = t.ground(d, &partial);
        match check_precondition(&a, d, ctx) {
            Verdict::Ok => return Ok(a),
            verdict => {
                failure.rejected.push((a.canonical_form().to_owned(), verdict));
                if path.is_empty() {
                    return Err(failure);
                }
                excluded.insert(path);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{student_table, Column};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn select_is_reproducible_under_seed() {
        let d = Dataset::new(vec![
            Column::categorical("Student", vec![Some("a"), Some("b")]),
            Column::numerical("Score", vec![Some(1.0), Some(2.0)]),
        ])
        .unwrap()
        .empty_state();
        let t = ActionTemplate::new(ActionKind::Select);
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            instantiate(&t, &d, &PreconditionContext::default(), ParameterPolicy::Random, &ParamStatsStore::new(), &mut rng)
                .unwrap()
                .canonical_form()
                .to_owned()
        };
        let first = run(3);
        assert!(first == "select(Student)" || first == "select(Score)");
        assert_eq!(first, run(3));
        let seen: HashSet<String> = (0..32).map(run).collect();
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn weighted_random_normalizes_mean_deltas() {
        let mut stats = ParamStatsStore::new();
        stats.record_value(ActionKind::Where, "value", "v1", 0.3);
        stats.record_value(ActionKind::Where, "value", "v2", 0.1);
        let labels = vec!["v1".to_owned(), "v2".to_owned()];
        let w = selection_weights(ActionKind::Where, "value", &labels, &stats);
        let total: f64 = w.iter().sum();
        assert!((w[0] / total - 0.75).abs() < 1e-12);
        assert!((w[1] / total - 0.25).abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 20_000;
        let hits = (0..n)
            .filter(|_| choose_value(ParameterPolicy::WeightedRandom, ActionKind::Where, "value", &labels, &stats, &mut rng) == 0)
            .count();
        assert!((hits as f64 / n as f64 - 0.75).abs() < 0.02);
    }

    #[test]
    fn uct_tries_unvisited_values_first() {
        let mut stats = ParamStatsStore::new();
        stats.record_value(ActionKind::Clustering, "clusters", "2", 0.9);
        let labels = vec!["2".to_owned(), "3".to_owned()];
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let policy = ParameterPolicy::Uct { c: 2f64.sqrt() };
        assert_eq!(choose_value(policy, ActionKind::Clustering, "clusters", &labels, &stats, &mut rng), 1);
        stats.record_value(ActionKind::Clustering, "clusters", "3", 0.1);
        assert_eq!(choose_value(policy, ActionKind::Clustering, "clusters", &labels, &stats, &mut rng), 0);
    }

    #[test]
    fn groupby_can_reach_the_mixed_aggregation() {
        let d = student_table();
        let t = ActionTemplate::new(ActionKind::Groupby);
        let target = "group(Student;max(Exam Date),avg(Score),freq(Course Duration,6 months))";
        let found = (0..2000).any(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            instantiate(&t, &d, &PreconditionContext::default(), ParameterPolicy::Random, &ParamStatsStore::new(), &mut rng)
                .is_ok_and(|a| a.canonical_form() == target)
        });
        assert!(found);
    }

    #[test]
    fn exhausted_template_reports_no_valid_action() {
        let d = student_table();
        let t = ActionTemplate::new(ActionKind::Where);
        // Four rows can never keep five.
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = instantiate(&t, &d, &PreconditionContext::default(), ParameterPolicy::Random, &ParamStatsStore::new(), &mut rng)
            .unwrap_err();
        assert!(!err.rejected.is_empty());
        assert!(err
            .rejected
            .iter()
            .all(|(_, v)| matches!(v, Verdict::QualitativeFail(_) | Verdict::SearchFail(_))));
    }
}
