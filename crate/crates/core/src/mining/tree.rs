//! CART decision and regression trees on numerically encoded features.

use std::collections::HashMap;
use std::sync::Arc;

use super::model::{Artifacts, FittedModel, ModelKind, TreeArtifacts, TreeSplit};
use crate::actions::GroundAction;
use crate::error::{Error, Result};
use crate::tabular::stats::{histogram, normalized_entropy_of_counts, HISTOGRAM_BINS};
use crate::tabular::{Column, ColumnType, Dataset, Origin, Value};

pub const MIN_LEAF: usize = 5;

/// Feature columns usable for predicting `target`: every other column that
/// is not model-generated and shares no source column with the target
/// (a column derived from the target would leak it).
pub fn tree_features<'a>(d: &'a Dataset, target: &str) -> Vec<&'a Arc<Column>> {
    let Some(t) = d.column(target) else {
        return Vec::new();
    };
    d.columns()
        .iter()
        .filter(|c| {
            c.name() != target
                && c.origin() != Origin::ModelGenerated
                && !c.sources().iter().any(|s| t.sources().contains(s))
        })
        .collect()
}

enum Node {
    Leaf { prediction: f64 },
    Split { feature: usize, threshold: f64, left: Box<Node>, right: Box<Node> },
}

impl Node {
    fn predict(&self, x: &[Vec<f64>], row: usize) -> f64 {
        match self {
            Node::Leaf { prediction } => *prediction,
            Node::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                // NaN (null) compares false and goes right.
                if x[*feature][row] <= *threshold {
                    left.predict(x, row)
                } else {
                    right.predict(x, row)
                }
            }
        }
    }

    fn leaves(&self) -> usize {
        match self {
            Node::Leaf { .. } => 1,
            Node::Split { left, right, .. } => left.leaves() + right.leaves(),
        }
    }
}

/// Target either as class indices or as values.
struct Target {
    y: Vec<f64>,
    classes: Option<usize>,
}

impl Target {
    /// Impurity sum for a subset: Gini·n for classes, SSE for values.
    fn impurity(&self, rows: &[usize]) -> f64 {
        let n = rows.len() as f64;
        match self.classes {
            Some(k) => {
                let mut counts = vec![0usize; k];
                for &r in rows {
                    counts[self.y[r] as usize] += 1;
                }
                n * (1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>())
            }
            None => {
                let mean = rows.iter().map(|&r| self.y[r]).sum::<f64>() / n;
                rows.iter().map(|&r| (self.y[r] - mean).powi(2)).sum()
            }
        }
    }

    fn prediction(&self, rows: &[usize]) -> f64 {
        match self.classes {
            Some(k) => {
                let mut counts = vec![0usize; k];
                for &r in rows {
                    counts[self.y[r] as usize] += 1;
                }
                // Majority class, lowest index on ties.
                let best = *counts.iter().max().expect("non-empty");
                counts.iter().position(|&c| c == best).expect("present") as f64
            }
            None => rows.iter().map(|&r| self.y[r]).sum::<f64>() / rows.len() as f64,
        }
    }
}

/// Running impurity of a growing prefix, for O(n) threshold scans.
struct Accumulator {
    counts: Vec<usize>,
    sum: f64,
    sum_sq: f64,
    n: usize,
}

impl Accumulator {
    fn new(classes: Option<usize>) -> Self {
        Accumulator {
            counts: vec![0; classes.unwrap_or(0)],
            sum: 0.0,
            sum_sq: 0.0,
            n: 0,
        }
    }

    fn add(&mut self, y: f64, sign: f64) {
        if self.counts.is_empty() {
            self.sum += sign * y;
            self.sum_sq += sign * y * y;
        } else if sign > 0.0 {
            self.counts[y as usize] += 1;
        } else {
            self.counts[y as usize] -= 1;
        }
        if sign > 0.0 {
            self.n += 1;
        } else {
            self.n -= 1;
        }
    }

    fn impurity(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        let n = self.n as f64;
        if self.counts.is_empty() {
            (self.sum_sq - self.sum * self.sum / n).max(0.0)
        } else {
            n * (1.0 - self.counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>())
        }
    }
}

struct Builder<'a> {
    x: &'a [Vec<f64>],
    target: &'a Target,
    max_depth: u32,
}

impl Builder<'_> {
    fn grow(&self, rows: Vec<usize>, depth: u32) -> Node {
        let leaf = Node::Leaf {
            prediction: self.target.prediction(&rows),
        };
        if depth >= self.max_depth || rows.len() < 2 * MIN_LEAF {
            return leaf;
        }
        let parent = self.target.impurity(&rows);
        if parent <= 1e-12 {
            return leaf;
        }
        let mut best: Option<(f64, usize, f64)> = None;
        for (f, column) in self.x.iter().enumerate() {
            let mut order: Vec<usize> = rows.iter().copied().filter(|&r| !column[r].is_nan()).collect();
            order.sort_by(|&a, &b| column[a].total_cmp(&column[b]));
            let nulls: Vec<usize> = rows.iter().copied().filter(|&r| column[r].is_nan()).collect();
            let mut left = Accumulator::new(self.target.classes);
            let mut right = Accumulator::new(self.target.classes);
            for &r in order.iter().chain(&nulls) {
                right.add(self.target.y[r], 1.0);
            }
            for i in 0..order.len().saturating_sub(1) {
                let r = order[i];
                left.add(self.target.y[r], 1.0);
                right.add(self.target.y[r], -1.0);
                let (a, b) = (column[r], column[order[i + 1]]);
                if a == b || left.n < MIN_LEAF || right.n < MIN_LEAF {
                    continue;
                }
                let gain = parent - left.impurity() - right.impurity();
                if gain > 1e-12 && best.is_none_or(|(g, _, _)| gain > g + 1e-12) {
                    best = Some((gain, f, a + (b - a) / 2.0));
                }
            }
        }
        let Some((_, feature, threshold)) = best else {
            return leaf;
        };
        let (l, r): (Vec<usize>, Vec<usize>) = rows.iter().partition(|&&row| self.x[feature][row] <= threshold);
        Node::Split {
            feature,
            threshold,
            left: Box::new(self.grow(l, depth + 1)),
            right: Box::new(self.grow(r, depth + 1)),
        }
    }
}

fn f1_macro(truth: &[f64], predicted: &[f64], classes: usize) -> f64 {
    let mut total = 0.0;
    for c in 0..classes {
        let c = c as f64;
        let tp = truth.iter().zip(predicted).filter(|(t, p)| **t == c && **p == c).count() as f64;
        let fp = truth.iter().zip(predicted).filter(|(t, p)| **t != c && **p == c).count() as f64;
        let fneg = truth.iter().zip(predicted).filter(|(t, p)| **t == c && **p != c).count() as f64;
        if tp > 0.0 {
            total += 2.0 * tp / (2.0 * tp + fp + fneg);
        }
    }
    total / classes as f64
}

fn render_threshold(c: &Column, threshold: f64) -> String {
    match c.kind() {
        ColumnType::Datetime | ColumnType::Timedelta | ColumnType::Numerical => {
            Value::Number(threshold).render(c.kind())
        }
        _ => format!("{threshold}"),
    }
}

/// Fits a depth-limited tree predicting `target` from [`tree_features`].
/// Qualitative targets give a decision tree, quantitative ones a
/// regression tree. Rows with a null target are ignored.
pub fn fit_tree(d: &Dataset, a: &GroundAction, target: &str, max_depth: u32) -> Result<FittedModel> {
    let t = d.column_or_err(target)?;
    let features = tree_features(d, target);
    if features.is_empty() {
        return Err(Error::Precondition("no usable feature columns".into()));
    }
    let rows: Vec<usize> = (0..d.row_count()).filter(|&r| !t.is_null(r)).collect();
    if rows.len() < 10 {
        return Err(Error::Degenerate(format!("{} labelled rows, need 10", rows.len())));
    }
    if t.distinct_count() < 2 {
        return Err(Error::Degenerate(format!("target `{target}` is constant")));
    }
    let classification = t.kind().is_qualitative();
    let (target_values, classes) = if classification {
        let mut index: HashMap<String, usize> = HashMap::new();
        let labels = t.labels();
        let y = rows
            .iter()
            .map(|&r| {
                let label = labels[r].clone().expect("non-null");
                let next = index.len();
                *index.entry(label).or_insert(next) as f64
            })
            .collect::<Vec<_>>();
        (y, Some(index.len()))
    } else {
        let enc = t.encode();
        (rows.iter().map(|&r| enc[r].expect("non-null")).collect(), None)
    };
    let x: Vec<Vec<f64>> = features
        .iter()
        .map(|c| {
            let enc = c.encode();
            rows.iter().map(|&r| enc[r].unwrap_or(f64::NAN)).collect()
        })
        .collect();
    let target_data = Target {
        y: target_values,
        classes,
    };
    let builder = Builder {
        x: &x,
        target: &target_data,
        max_depth,
    };
    let local: Vec<usize> = (0..rows.len()).collect();
    let root = builder.grow(local.clone(), 0);
    let predicted: Vec<f64> = local.iter().map(|&r| root.predict(&x, r)).collect();
    let y = &target_data.y;

    let (score, target_entropy, coverage, class_count) = match classes {
        Some(k) => {
            let mut counts = vec![0usize; k];
            for &v in y {
                counts[v as usize] += 1;
            }
            let mut hit = vec![false; k];
            for &p in &predicted {
                hit[p as usize] = true;
            }
            let covered = hit.iter().filter(|&&h| h).count();
            (
                f1_macro(y, &predicted, k),
                normalized_entropy_of_counts(&counts),
                covered as f64 / k as f64,
                k,
            )
        }
        None => {
            let mean = y.iter().sum::<f64>() / y.len() as f64;
            let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
            let sse: f64 = y.iter().zip(&predicted).map(|(v, p)| (v - p).powi(2)).sum();
            let r2 = if sst > 0.0 { 1.0 - sse / sst } else { 0.0 };
            (r2, normalized_entropy_of_counts(&histogram(y, HISTOGRAM_BINS)), 1.0, 0)
        }
    };
    let top_split = match &root {
        Node::Split { feature, threshold, .. } => Some(TreeSplit {
            feature: features[*feature].name().to_owned(),
            threshold: render_threshold(features[*feature], *threshold),
        }),
        Node::Leaf { .. } => None,
    };
    let mut involved: Vec<String> = t.sources().to_vec();
    if let Some(split) = &top_split {
        if let Some(c) = d.column(&split.feature) {
            involved.extend(c.sources().iter().cloned());
        }
    }
    Ok(FittedModel::new(
        a,
        if classification {
            ModelKind::DecisionTree
        } else {
            ModelKind::RegressionTree
        },
        Artifacts::Tree(TreeArtifacts {
            target: target.to_owned(),
            classification,
            score,
            target_entropy,
            coverage,
            class_count,
            top_split,
            leaves: root.leaves(),
        }),
        None,
        involved,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::Action;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fit(d: &Dataset, target: &str, depth: u32) -> TreeArtifacts {
        let a = GroundAction::new(
            Action::DecisionTree {
                target: target.into(),
                max_depth: depth,
            },
            d,
        );
        match fit_tree(d, &a, target, depth).unwrap().artifacts() {
            Artifacts::Tree(t) => t.clone(),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn separable_target_is_perfectly_predicted() {
        let x: Vec<Option<f64>> = (0..40).map(|i| Some(f64::from(i))).collect();
        let y: Vec<Option<&str>> = (0..40).map(|i| Some(if i < 20 { "lo" } else { "hi" })).collect();
        let d = Dataset::new(vec![Column::numerical("x", x), Column::categorical("y", y)]).unwrap();
        let t = fit(&d, "y", 2);
        assert_eq!(t.score, 1.0);
        assert_eq!(t.coverage, 1.0);
        assert_eq!(t.target_entropy, 1.0);
        let split = t.top_split.unwrap();
        assert_eq!(split.feature, "x");
        assert_eq!(split.threshold, "19.5");
    }

    #[test]
    fn independent_target_has_low_r2() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<Option<f64>> = (0..1000).map(|_| Some(rng.random::<f64>())).collect();
        let y: Vec<Option<f64>> = (0..1000).map(|_| Some(rng.random::<f64>())).collect();
        let d = Dataset::new(vec![Column::numerical("x", x), Column::numerical("y", y)]).unwrap();
        let t = fit(&d, "y", 3);
        assert!(!t.classification);
        assert!(t.score <= 0.1, "{}", t.score);
    }

    #[test]
    fn rare_class_is_not_covered() {
        // 30 rows: class a for x<14, b for x>=14 except three c rows
        // scattered among the b rows; depth 2 with leaf size 5 cannot
        // isolate them.
        let x: Vec<Option<f64>> = (0..30).map(|i| Some(f64::from(i))).collect();
        let y: Vec<Option<&str>> = (0..30)
            .map(|i| {
                Some(match i {
                    16 | 22 | 28 => "c",
                    i if i < 14 => "a",
                    _ => "b",
                })
            })
            .collect();
        let d = Dataset::new(vec![Column::numerical("x", x), Column::categorical("y", y)]).unwrap();
        let t = fit(&d, "y", 2);
        assert_eq!(t.class_count, 3);
        assert!((t.coverage - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn derived_copies_of_the_target_are_not_features() {
        let d = crate::tabular::student_table();
        assert!(tree_features(&d, "Score").iter().all(|c| c.name() != "Score"));
        let a = GroundAction::new(
            Action::Discretize {
                column: "Score".into(),
                method: crate::actions::Discretization::Bins(2),
            },
            &d,
        );
        let d2 = crate::actions::apply_data_action(&d, &a).unwrap();
        assert!(tree_features(&d2, "Score").iter().all(|c| c.name() != "Score_bins2"));
    }
}
