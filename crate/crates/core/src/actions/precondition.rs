//! Action preconditions, by class: hard (feasibility), qualitative (state
//! quality) and search (duplicate avoidance).

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::action::{Action, Aggregator, Discretization, GroundAction, BIN_COUNTS, QUANTILE_COUNTS};
use super::apply::{derive_column, groups, where_keep};
use crate::mining::{clustering_features, distinct_rows, tree_features};
use crate::tabular::stats::pearson;
use crate::tabular::{ColumnType, Dataset, Value};

pub const DEFAULT_MIN_ROWS: usize = 5;
/// Row minimum for tree, trend and rule mining.
pub const MIN_MODEL_ROWS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PreconditionClass {
    Hard,
    Qualitative,
    Search,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    HardFail(String),
    QualitativeFail(String),
    SearchFail(String),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok)
    }

    pub fn class(&self) -> Option<PreconditionClass> {
        match self {
            Verdict::Ok => None,
            Verdict::HardFail(_) => Some(PreconditionClass::Hard),
            Verdict::QualitativeFail(_) => Some(PreconditionClass::Qualitative),
            Verdict::SearchFail(_) => Some(PreconditionClass::Search),
        }
    }
}

/// What the search already knows at the node an action is instantiated for.
#[derive(Debug, Clone)]
pub struct PreconditionContext {
    /// Canonical forms already on the node's path or already instantiated
    /// at the node.
    pub taken: HashSet<String>,
    /// Minimum rows a `where` action must keep.
    pub min_rows: usize,
}

impl Default for PreconditionContext {
    fn default() -> Self {
        PreconditionContext {
            taken: HashSet::new(),
            min_rows: DEFAULT_MIN_ROWS,
        }
    }
}

impl PreconditionContext {
    /// Context for a dataset whose lineage counts as the path.
    pub fn for_dataset(d: &Dataset) -> Self {
        PreconditionContext {
            taken: d.lineage_forms().into_iter().collect(),
            ..Self::default()
        }
    }
}

pub fn check_precondition(a: &GroundAction, d: &Dataset, ctx: &PreconditionContext) -> Verdict {
    let hard = check_hard(a, d);
    if !hard.is_ok() {
        return hard;
    }
    if ctx.taken.contains(a.canonical_form()) {
        return Verdict::SearchFail(format!("{a} already applied on this path or node"));
    }
    if let Some(name) = a.action().derived_name() {
        if d.contains(&name) {
            return Verdict::SearchFail(format!("column `{name}` already exists"));
        }
    }
    check_qualitative(a, d, ctx)
}

fn hard(reason: impl Into<String>) -> Verdict {
    Verdict::HardFail(reason.into())
}

fn value_matches(kind: ColumnType, v: &Value) -> bool {
    matches!(
        (kind.is_quantitative(), kind, v),
        (true, _, Value::Number(_)) | (false, ColumnType::Boolean, Value::Bool(_)) | (false, ColumnType::Categorical, Value::Text(_))
    )
}

pub(crate) fn check_hard(a: &GroundAction, d: &Dataset) -> Verdict {
    let kind_of = |name: &str| d.column(name).map(|c| c.kind());
    match a.action() {
        Action::Select { column } => {
            if d.base().column(column).is_none() {
                hard(format!("`{column}` is not a column of the base table"))
            } else if d.contains(column) {
                hard(format!("`{column}` is already selected"))
            } else {
                Verdict::Ok
            }
        }
        Action::Discretize { column, method } => match (kind_of(column), method) {
            (None, _) => hard(format!("unknown column `{column}`")),
            (Some(ColumnType::Numerical | ColumnType::Timedelta), Discretization::Bins(n)) if BIN_COUNTS.contains(n) => {
                Verdict::Ok
            }
            (Some(ColumnType::Numerical | ColumnType::Timedelta), Discretization::Quantiles(n))
                if QUANTILE_COUNTS.contains(n) =>
            {
                Verdict::Ok
            }
            (Some(ColumnType::Datetime), Discretization::Time(_)) => Verdict::Ok,
            (Some(kind), _) => hard(format!("cannot discretize {kind} column `{column}` that way")),
        },
        Action::BinaryOp { op, left, right } => match (kind_of(left), kind_of(right)) {
            _ if left == right => hard("binary operation on a single column"),
            (Some(l), Some(r)) if op.result_type(l, r).is_some() => Verdict::Ok,
            (Some(l), Some(r)) => hard(format!("{l} {} {r} is undefined", op.symbol())),
            _ => hard("unknown operand"),
        },
        Action::Where { column, op, value } => match kind_of(column) {
            None => hard(format!("unknown column `{column}`")),
            Some(kind) if !op.applies_to(kind) => hard(format!("`{}` does not apply to {kind}", op.symbol())),
            Some(kind) if !value_matches(kind, value) => hard(format!("value does not match {kind} column")),
            Some(_) => Verdict::Ok,
        },
        Action::GroupBy { grouper, aggregations } => {
            if !d.contains(grouper) {
                return hard(format!("unknown grouper `{grouper}`"));
            }
            let expected: Vec<&str> = d.column_names().into_iter().filter(|n| n != grouper).collect();
            let bound: Vec<&str> = aggregations.iter().map(|(c, _)| c.as_str()).collect();
            if expected != bound {
                return hard("groupby must aggregate every non-grouper column once, in order");
            }
            for (c, agg) in aggregations {
                let kind = kind_of(c).expect("checked above");
                if agg.result_type(kind).is_none() {
                    return hard(format!("{} cannot aggregate {kind} column `{c}`", agg.name()));
                }
                if let Aggregator::Freq(v) = agg {
                    if !value_matches(kind, v) {
                        return hard(format!("freq value does not match `{c}`"));
                    }
                }
            }
            Verdict::Ok
        }
        Action::DecisionTree { target, max_depth } => {
            if !(2..=3).contains(max_depth) {
                hard("tree depth must be 2 or 3")
            } else if !d.contains(target) {
                hard(format!("unknown target `{target}`"))
            } else if d.row_count() < MIN_MODEL_ROWS {
                hard(format!("trees need at least {MIN_MODEL_ROWS} rows"))
            } else if tree_features(d, target).is_empty() {
                hard("no usable feature columns")
            } else {
                Verdict::Ok
            }
        }
        Action::UnivariateOutliers { column } => match d.column(column) {
            None => hard(format!("unknown column `{column}`")),
            Some(c) if c.non_null_count() < 3 => hard("outlier detection needs 3 values"),
            Some(_) => Verdict::Ok,
        },
        Action::BivariateOutliers { first, second } => match (d.column(first), d.column(second)) {
            _ if first == second => hard("outlier pair needs two columns"),
            (Some(a), Some(b)) if pearson(&a.encode(), &b.encode()).is_some() => Verdict::Ok,
            (Some(_), Some(_)) => hard("correlation of the pair is undefined"),
            _ => hard("unknown column in pair"),
        },
        Action::Clustering { k } => {
            let k = *k as usize;
            let features = clustering_features(d);
            if !(2..=10).contains(&k) {
                hard("k must lie in 2..=10")
            } else if features.is_empty() {
                hard("no quantitative feature to cluster")
            } else if d.row_count() < 2 * k {
                hard(format!("k={k} needs at least {} rows", 2 * k))
            } else if distinct_rows(&features) < k {
                hard(format!("fewer than {k} distinct rows"))
            } else {
                Verdict::Ok
            }
        }
        Action::Trend { time, target } => match (d.column(time), d.column(target)) {
            _ if time == target => hard("trend target equals the time column"),
            (Some(t), Some(y)) if t.kind() == ColumnType::Datetime && y.kind().is_quantitative() => {
                let joint = (0..d.row_count()).filter(|&r| !t.is_null(r) && !y.is_null(r)).count();
                if joint < MIN_MODEL_ROWS {
                    hard(format!("trend analysis needs {MIN_MODEL_ROWS} timestamped values"))
                } else {
                    Verdict::Ok
                }
            }
            (Some(_), Some(_)) => hard("trend needs a datetime and a quantitative column"),
            _ => hard("unknown trend column"),
        },
        Action::AssociationRules => {
            if !d.columns().iter().any(|c| c.kind().is_qualitative()) {
                hard("rule mining needs a qualitative column")
            } else if d.row_count() < MIN_MODEL_ROWS {
                hard(format!("rule mining needs at least {MIN_MODEL_ROWS} rows"))
            } else {
                Verdict::Ok
            }
        }
    }
}

fn check_qualitative(a: &GroundAction, d: &Dataset, ctx: &PreconditionContext) -> Verdict {
    match a.action() {
        Action::Discretize { .. } | Action::BinaryOp { .. } => match derive_column(d, a) {
            Ok(c) if c.distinct_count() >= 2 => Verdict::Ok,
            Ok(c) => Verdict::QualitativeFail(format!("derived column `{}` is constant", c.name())),
            Err(e) => Verdict::HardFail(e.to_string()),
        },
        Action::Where { column, op, value } => {
            let kept = where_keep(d.column(column).expect("hard-checked"), *op, value).len();
            if kept == d.row_count() {
                Verdict::QualitativeFail(format!("{a} removes no rows"))
            } else if kept < ctx.min_rows {
                Verdict::QualitativeFail(format!("{a} keeps {kept} rows, fewer than {}", ctx.min_rows))
            } else {
                Verdict::Ok
            }
        }
        Action::GroupBy { grouper, .. } => {
            let n = groups(d.column(grouper).expect("hard-checked")).len();
            if n < 2 {
                Verdict::QualitativeFail(format!("grouping by `{grouper}` yields {n} group(s)"))
            } else {
                Verdict::Ok
            }
        }
        Action::DecisionTree { target, .. } => {
            if d.column(target).expect("hard-checked").distinct_count() < 2 {
                Verdict::QualitativeFail(format!("target `{target}` is constant"))
            } else {
                Verdict::Ok
            }
        }
        _ => Verdict::Ok,
    }
}
