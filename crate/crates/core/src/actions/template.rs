//! Action templates: lazily expanded labelled parameter trees. Each level
//! of a tree is a parameter; a root-to-leaf path of chosen values denotes
//! one ground action.

use std::fmt;

use super::action::{
    Action, ActionKind, Aggregator, BinaryOperator, Comparison, Discretization, GroundAction, BIN_COUNTS,
    QUANTILE_COUNTS,
};
use super::apply::groups;
use super::precondition::{check_hard, check_precondition, PreconditionContext, Verdict, MIN_MODEL_ROWS};
use crate::mining::{clustering_features, distinct_rows, tree_features, FittedModel};
use crate::tabular::stats::{pearson, sorted};
use crate::tabular::time::TimeUnit;
use crate::tabular::{Column, ColumnType, Dataset, Origin, Value};

/// Most frequent qualitative values offered as `where`/`freq` arguments.
pub const MAX_VALUE_CANDIDATES: usize = 20;
pub const TREE_DEPTHS: [u32; 2] = [2, 3];
pub const CLUSTER_COUNTS: std::ops::RangeInclusive<u32> = 2..=10;

/// One candidate value of a parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Column(String),
    Pair(String, String),
    Int(u32),
    Symbol(&'static str),
    Cell { value: Value, text: String },
}

impl ParamValue {
    fn cell(value: Value, kind: ColumnType) -> Self {
        let text = value.render(kind);
        ParamValue::Cell { value, text }
    }

    fn column(&self) -> &str {
        match self {
            ParamValue::Column(c) => c,
            other => panic!("expected a column parameter, got {other:?}"),
        }
    }

    fn int(&self) -> u32 {
        match self {
            ParamValue::Int(n) => *n,
            other => panic!("expected an integer parameter, got {other:?}"),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            ParamValue::Symbol(s) => s,
            other => panic!("expected a symbol parameter, got {other:?}"),
        }
    }

    fn value(&self) -> &Value {
        match self {
            ParamValue::Cell { value, .. } => value,
            other => panic!("expected a cell parameter, got {other:?}"),
        }
    }
}

/// Renders as in the action's bindings, which key parameter statistics.
impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Column(c) => f.write_str(c),
            ParamValue::Pair(a, b) => write!(f, "{a},{b}"),
            ParamValue::Int(n) => write!(f, "{n}"),
            ParamValue::Symbol(s) => f.write_str(s),
            ParamValue::Cell { text, .. } => f.write_str(text),
        }
    }
}

/// A lifted tree level: parameter name and its candidate values.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamNode {
    pub name: String,
    pub candidates: Vec<ParamValue>,
}

impl ParamNode {
    fn new(name: impl Into<String>, candidates: Vec<ParamValue>) -> Self {
        ParamNode {
            name: name.into(),
            candidates,
        }
    }
}

/// The parameter tree of one action kind over one dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionTemplate {
    kind: ActionKind,
}

fn model_target(c: &Column) -> bool {
    c.origin() != Origin::ModelGenerated
}

fn columns_where(d: &Dataset, keep: impl Fn(&Column) -> bool) -> Vec<ParamValue> {
    d.columns()
        .iter()
        .filter(|c| keep(c))
        .map(|c| ParamValue::Column(c.name().to_owned()))
        .collect()
}

/// Values a `where` or `freq` parameter may take: the five quartile
/// boundary values of a quantitative column, or the most frequent values
/// of a qualitative one.
pub fn value_candidates(c: &Column) -> Vec<ParamValue> {
    if c.kind().is_quantitative() {
        let s = sorted(&c.numbers());
        if s.is_empty() {
            return Vec::new();
        }
        let last = (s.len() - 1) as f64;
        let mut out: Vec<f64> = [0.0, 0.25, 0.5, 0.75, 1.0]
            .iter()
            .map(|q| s[(q * last).round() as usize])
            .collect();
        out.dedup();
        out.into_iter()
            .map(|x| ParamValue::cell(Value::Number(x), c.kind()))
            .collect()
    } else {
        let mut counts = c.value_counts();
        // Stable: equally frequent values keep first-appearance order.
        counts.sort_by_key(|c| std::cmp::Reverse(c.1));
        counts
            .into_iter()
            .take(MAX_VALUE_CANDIDATES)
            .map(|(v, _)| ParamValue::cell(v, c.kind()))
            .collect()
    }
}

fn binop_compatible(d: &Dataset, op: BinaryOperator, left: &Column) -> Vec<ParamValue> {
    columns_where(d, |r| r.name() != left.name() && op.result_type(left.kind(), r.kind()).is_some())
}

/// Position within a partial groupby binding: which column's aggregator or
/// freq value comes next.
enum GroupSlot<'a> {
    Aggregator(&'a Column),
    FreqValue(&'a Column),
    Done,
}

fn group_slot<'a>(d: &'a Dataset, grouper: &str, rest: &[ParamValue]) -> GroupSlot<'a> {
    let mut i = 0;
    for c in d.columns().iter().filter(|c| c.name() != grouper) {
        match rest.get(i) {
            None => return GroupSlot::Aggregator(c),
            Some(ParamValue::Symbol("freq")) => {
                if rest.get(i + 1).is_none() {
                    return GroupSlot::FreqValue(c);
                }
                i += 2;
            }
            Some(_) => i += 1,
        }
    }
    GroupSlot::Done
}

impl ActionTemplate {
    pub fn new(kind: ActionKind) -> Self {
        ActionTemplate { kind }
    }

    pub fn kind(&self) -> ActionKind {
        self.kind
    }

    /// The next lifted level below `partial`, or `None` once `partial` is a
    /// complete path. Candidate sets are filtered by hard preconditions.
    pub fn next_node(&self, d: &Dataset, partial: &[ParamValue]) -> Option<ParamNode> {
        let col = |i: usize| d.column(partial[i].column()).expect("bound column exists");
        match (self.kind, partial.len()) {
            (ActionKind::Select, 0) => Some(ParamNode::new(
                "column",
                d.base()
                    .columns()
                    .iter()
                    .filter(|c| !d.contains(c.name()))
                    .map(|c| ParamValue::Column(c.name().to_owned()))
                    .collect(),
            )),
            (ActionKind::DeriveDiscretize, 0) => {
                Some(ParamNode::new("target", columns_where(d, |c| c.kind().is_quantitative())))
            }
            (ActionKind::DeriveDiscretize, 1) => Some(ParamNode::new(
                "method",
                if col(0).kind() == ColumnType::Datetime {
                    vec![ParamValue::Symbol("time")]
                } else {
                    vec![ParamValue::Symbol("bins"), ParamValue::Symbol("quantiles")]
                },
            )),
            (ActionKind::DeriveDiscretize, 2) => {
                let method = partial[1].symbol();
                let candidates = match method {
                    "bins" => BIN_COUNTS.iter().map(|&n| ParamValue::Int(n)).collect(),
                    "quantiles" => QUANTILE_COUNTS.iter().map(|&n| ParamValue::Int(n)).collect(),
                    _ => TimeUnit::ALL.iter().map(|u| ParamValue::Symbol(u.as_str())).collect(),
                };
                Some(ParamNode::new(method, candidates))
            }
            (ActionKind::DeriveBinop, 0) => Some(ParamNode::new(
                "operator",
                BinaryOperator::ALL
                    .into_iter()
                    .filter(|&op| d.columns().iter().any(|l| !binop_compatible(d, op, l).is_empty()))
                    .map(|op| ParamValue::Symbol(op.symbol()))
                    .collect(),
            )),
            (ActionKind::DeriveBinop, 1) => {
                let op = BinaryOperator::from_symbol(partial[0].symbol()).expect("valid operator");
                Some(ParamNode::new("left", columns_where(d, |l| !binop_compatible(d, op, l).is_empty())))
            }
            (ActionKind::DeriveBinop, 2) => {
                let op = BinaryOperator::from_symbol(partial[0].symbol()).expect("valid operator");
                Some(ParamNode::new("right", binop_compatible(d, op, col(1))))
            }
            (ActionKind::Where, 0) => Some(ParamNode::new("column", columns_where(d, |c| c.non_null_count() > 0))),
            (ActionKind::Where, 1) => {
                let kind = col(0).kind();
                Some(ParamNode::new(
                    "operator",
                    Comparison::ALL
                        .into_iter()
                        .filter(|op| op.applies_to(kind))
                        .map(|op| ParamValue::Symbol(op.symbol()))
                        .collect(),
                ))
            }
            (ActionKind::Where, 2) => Some(ParamNode::new("value", value_candidates(col(0)))),
            (ActionKind::Groupby, 0) => Some(ParamNode::new("grouper", columns_where(d, |c| groups(c).len() >= 2))),
            (ActionKind::Groupby, _) => match group_slot(d, partial[0].column(), &partial[1..]) {
                GroupSlot::Aggregator(c) => Some(ParamNode::new(
                    format!("agg:{}", c.name()),
                    Aggregator::names_for(c.kind())
                        .iter()
                        .map(|&name| ParamValue::Symbol(name))
                        .collect(),
                )),
                GroupSlot::FreqValue(c) => Some(ParamNode::new(format!("freq:{}", c.name()), value_candidates(c))),
                GroupSlot::Done => None,
            },
            (ActionKind::DecisionTree, 0) => {
                if d.row_count() < MIN_MODEL_ROWS {
                    return Some(ParamNode::new("target", Vec::new()));
                }
                Some(ParamNode::new(
                    "target",
                    columns_where(d, |c| {
                        model_target(c) && c.distinct_count() >= 2 && !tree_features(d, c.name()).is_empty()
                    }),
                ))
            }
            (ActionKind::DecisionTree, 1) => Some(ParamNode::new(
                "max depth",
                TREE_DEPTHS.iter().map(|&n| ParamValue::Int(n)).collect(),
            )),
            (ActionKind::UnaryOutliers, 0) => Some(ParamNode::new(
                "column",
                columns_where(d, |c| model_target(c) && c.non_null_count() >= 3),
            )),
            (ActionKind::BinaryOutliers, 0) => {
                let usable: Vec<_> = d.columns().iter().filter(|c| model_target(c)).collect();
                let encoded: Vec<_> = usable.iter().map(|c| c.encode()).collect();
                let mut pairs = Vec::new();
                for i in 0..usable.len() {
                    for j in i + 1..usable.len() {
                        if pearson(&encoded[i], &encoded[j]).is_some() {
                            let (a, b) = (usable[i].name(), usable[j].name());
                            let (a, b) = if b < a { (b, a) } else { (a, b) };
                            pairs.push(ParamValue::Pair(a.to_owned(), b.to_owned()));
                        }
                    }
                }
                Some(ParamNode::new("pair", pairs))
            }
            (ActionKind::Clustering, 0) => {
                let features = clustering_features(d);
                let distinct = if features.is_empty() { 0 } else { distinct_rows(&features) };
                Some(ParamNode::new(
                    "clusters",
                    CLUSTER_COUNTS
                        .filter(|&k| d.row_count() >= 2 * k as usize && distinct >= k as usize)
                        .map(ParamValue::Int)
                        .collect(),
                ))
            }
            (ActionKind::Trend, 0) => Some(ParamNode::new(
                "datetime",
                columns_where(d, |c| c.kind() == ColumnType::Datetime && c.non_null_count() >= MIN_MODEL_ROWS),
            )),
            (ActionKind::Trend, 1) => {
                let time = partial[0].column();
                Some(ParamNode::new(
                    "target",
                    columns_where(d, |c| c.name() != time && model_target(c) && c.kind().is_quantitative()),
                ))
            }
            _ => None,
        }
    }

    /// Builds the action a complete path denotes.
    pub fn build(&self, partial: &[ParamValue]) -> Action {
        let name = |i: usize| partial[i].column().to_owned();
        match self.kind {
            ActionKind::Select => Action::Select { column: name(0) },
            ActionKind::DeriveDiscretize => Action::Discretize {
                column: name(0),
                method: match partial[1].symbol() {
                    "bins" => Discretization::Bins(partial[2].int()),
                    "quantiles" => Discretization::Quantiles(partial[2].int()),
                    _ => Discretization::Time(TimeUnit::parse(partial[2].symbol()).expect("valid time unit")),
                },
            },
            ActionKind::DeriveBinop => Action::BinaryOp {
                op: BinaryOperator::from_symbol(partial[0].symbol()).expect("valid operator"),
                left: name(1),
                right: name(2),
            },
            ActionKind::Where => Action::Where {
                column: name(0),
                op: Comparison::from_symbol(partial[1].symbol()).expect("valid comparison"),
                value: partial[2].value().clone(),
            },
            ActionKind::Groupby => {
                let mut aggregations = Vec::new();
                let mut rest = partial[1..].iter();
                while let Some(agg) = rest.next() {
                    aggregations.push(match agg.symbol() {
                        "freq" => Aggregator::Freq(rest.next().expect("freq value bound").value().clone()),
                        other => Aggregator::from_name(other).expect("valid aggregator"),
                    });
                }
                // Aggregated column names are implied by the dataset order;
                // `bind_group_columns` attaches them.
                Action::GroupBy {
                    grouper: name(0),
                    aggregations: aggregations.into_iter().map(|a| (String::new(), a)).collect(),
                }
            }
            ActionKind::DecisionTree => Action::DecisionTree {
                target: name(0),
                max_depth: partial[1].int(),
            },
            ActionKind::UnaryOutliers => Action::UnivariateOutliers { column: name(0) },
            ActionKind::BinaryOutliers => match &partial[0] {
                ParamValue::Pair(a, b) => Action::BivariateOutliers {
                    first: a.clone(),
                    second: b.clone(),
                },
                other => panic!("expected a column pair, got {other:?}"),
            },
            ActionKind::Clustering => Action::Clustering { k: partial[0].int() },
            ActionKind::Trend => Action::Trend {
                time: name(0),
                target: name(1),
            },
            ActionKind::AssociationRules => Action::AssociationRules,
        }
    }

    /// Grounds a complete path against `d`.
    pub fn ground(&self, d: &Dataset, partial: &[ParamValue]) -> GroundAction {
        let mut action = self.build(partial);
        if let Action::GroupBy { grouper, aggregations } = &mut action {
            let others = d.columns().iter().filter(|c| c.name() != grouper.as_str());
            for ((column, _), c) in aggregations.iter_mut().zip(others) {
                *column = c.name().to_owned();
            }
        }
        GroundAction::new(action, d)
    }

    /// Whether the tree has at least one hard-feasible path at its root.
    fn is_offered(&self, d: &Dataset) -> bool {
        match self.next_node(d, &[]) {
            Some(node) => !node.candidates.is_empty(),
            None => check_hard(&self.ground(d, &[]), d).is_ok(),
        }
    }

    /// Every ground action of this template passing all preconditions
    /// under `ctx`, in tree order. Exponential for groupby on wide tables;
    /// meant for small oracle datasets.
    pub fn ground_actions(&self, d: &Dataset, ctx: &PreconditionContext) -> Vec<GroundAction> {
        let mut out = Vec::new();
        let mut partial = Vec::new();
        self.walk(d, ctx, &mut partial, &mut out);
        out
    }

    fn walk(&self, d: &Dataset, ctx: &PreconditionContext, partial: &mut Vec<ParamValue>, out: &mut Vec<GroundAction>) {
        match self.next_node(d, partial) {
            None => {
                let a = self.ground(d, partial);
                if check_precondition(&a, d, ctx) == Verdict::Ok {
                    out.push(a);
                }
            }
            Some(node) => {
                for v in node.candidates {
                    partial.push(v);
                    self.walk(d, ctx, partial, out);
                    partial.pop();
                }
            }
        }
    }
}

/// Templates applicable to the state `(d, m)`, in kind order. The empty
/// dataset only offers `select`. Model actions are withheld from a model
/// state whose model left the dataset unchanged, since refitting there
/// would revisit the parent dataset.
pub fn enumerate_templates(d: &Dataset, m: Option<&FittedModel>) -> Vec<ActionTemplate> {
    let models_allowed = !d.is_empty() && m.is_none_or(|m| m.appended_column().is_some());
    ActionKind::ALL
        .into_iter()
        .filter(|k| if d.is_empty() { *k == ActionKind::Select } else { models_allowed || !k.is_model() })
        .map(ActionTemplate::new)
        .filter(|t| t.is_offered(d))
        .collect()
}
