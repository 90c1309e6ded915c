use std::fmt;

use serde::{Deserialize, Serialize};

use crate::tabular::time::TimeUnit;
use crate::tabular::{ColumnType, Dataset, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ActionKind {
    Select,
    DeriveDiscretize,
    DeriveBinop,
    Where,
    Groupby,
    DecisionTree,
    UnaryOutliers,
    BinaryOutliers,
    Clustering,
    Trend,
    AssociationRules,
}

impl ActionKind {
    pub const ALL: [ActionKind; 11] = [
        ActionKind::Select,
        ActionKind::DeriveDiscretize,
        ActionKind::DeriveBinop,
        ActionKind::Where,
        ActionKind::Groupby,
        ActionKind::DecisionTree,
        ActionKind::UnaryOutliers,
        ActionKind::BinaryOutliers,
        ActionKind::Clustering,
        ActionKind::Trend,
        ActionKind::AssociationRules,
    ];

    pub fn is_model(self) -> bool {
        !matches!(
            self,
            ActionKind::Select
                | ActionKind::DeriveDiscretize
                | ActionKind::DeriveBinop
                | ActionKind::Where
                | ActionKind::Groupby
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ActionKind::Select => "select",
            ActionKind::DeriveDiscretize => "derive-discretize",
            ActionKind::DeriveBinop => "derive-binop",
            ActionKind::Where => "where",
            ActionKind::Groupby => "groupby",
            ActionKind::DecisionTree => "decision-tree",
            ActionKind::UnaryOutliers => "unary-outliers",
            ActionKind::BinaryOutliers => "binary-outliers",
            ActionKind::Clustering => "clustering",
            ActionKind::Trend => "trend",
            ActionKind::AssociationRules => "association-rules",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == text)
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Discretization {
    Bins(u32),
    Quantiles(u32),
    Time(TimeUnit),
}

pub const BIN_COUNTS: [u32; 9] = [2, 3, 4, 5, 6, 7, 8, 9, 10];
pub const QUANTILE_COUNTS: [u32; 5] = [2, 3, 4, 5, 10];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOperator {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Gt,
    Lt,
}

impl BinaryOperator {
    pub const ALL: [BinaryOperator; 8] = [
        BinaryOperator::Add,
        BinaryOperator::Sub,
        BinaryOperator::Mul,
        BinaryOperator::Div,
        BinaryOperator::Eq,
        BinaryOperator::Ne,
        BinaryOperator::Gt,
        BinaryOperator::Lt,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOperator::Add => "+",
            BinaryOperator::Sub => "-",
            BinaryOperator::Mul => "*",
            BinaryOperator::Div => "/",
            BinaryOperator::Eq => "=",
            BinaryOperator::Ne => "!=",
            BinaryOperator::Gt => ">",
            BinaryOperator::Lt => "<",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|op| op.symbol() == s)
    }

    pub fn is_commutative(self) -> bool {
        matches!(
            self,
            BinaryOperator::Add | BinaryOperator::Mul | BinaryOperator::Eq | BinaryOperator::Ne
        )
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinaryOperator::Eq | BinaryOperator::Ne | BinaryOperator::Gt | BinaryOperator::Lt
        )
    }

    /// Result type of `left op right`, or `None` when the operand types are
    /// incompatible (a hard precondition).
    pub fn result_type(self, left: ColumnType, right: ColumnType) -> Option<ColumnType> {
        use BinaryOperator::*;
        use ColumnType::*;
        match self {
            Eq | Ne => (left == right).then_some(Boolean),
            Gt | Lt => (left == right && left.is_quantitative()).then_some(Boolean),
            Add => match (left, right) {
                (Numerical, Numerical) => Some(Numerical),
                (Datetime, Timedelta) | (Timedelta, Datetime) => Some(Datetime),
                (Timedelta, Timedelta) => Some(Timedelta),
                _ => None,
            },
            Sub => match (left, right) {
                (Numerical, Numerical) => Some(Numerical),
                (Datetime, Datetime) => Some(Timedelta),
                (Datetime, Timedelta) => Some(Datetime),
                (Timedelta, Timedelta) => Some(Timedelta),
                _ => None,
            },
            Mul => match (left, right) {
                (Numerical, Numerical) => Some(Numerical),
                (Timedelta, Numerical) | (Numerical, Timedelta) => Some(Timedelta),
                _ => None,
            },
            Div => match (left, right) {
                (Numerical, Numerical) | (Timedelta, Timedelta) => Some(Numerical),
                (Timedelta, Numerical) => Some(Timedelta),
                _ => None,
            },
        }
    }
}

/// Row filter operator for `where` actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Comparison {
    Eq,
    Ne,
    Gt,
    Lt,
}

impl Comparison {
    pub const ALL: [Comparison; 4] = [Comparison::Eq, Comparison::Ne, Comparison::Gt, Comparison::Lt];

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Eq => "=",
            Comparison::Ne => "!=",
            Comparison::Gt => ">",
            Comparison::Lt => "<",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|op| op.symbol() == s)
    }

    pub fn applies_to(self, kind: ColumnType) -> bool {
        matches!(self, Comparison::Eq | Comparison::Ne) || kind.is_quantitative()
    }

    pub fn holds(self, cell: &Value, value: &Value) -> bool {
        match (self, cell.as_f64(), value.as_f64()) {
            (Comparison::Gt, Some(a), Some(b)) => a > b,
            (Comparison::Lt, Some(a), Some(b)) => a < b,
            (Comparison::Gt | Comparison::Lt, _, _) => false,
            (Comparison::Eq, _, _) => cell == value,
            (Comparison::Ne, _, _) => cell != value,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Aggregator {
    Min,
    Max,
    Avg,
    Median,
    Sum,
    Std,
    All,
    Any,
    Mode,
    Freq(Value),
}

impl Aggregator {
    pub fn name(&self) -> &'static str {
        match self {
            Aggregator::Min => "min",
            Aggregator::Max => "max",
            Aggregator::Avg => "avg",
            Aggregator::Median => "median",
            Aggregator::Sum => "sum",
            Aggregator::Std => "std",
            Aggregator::All => "all",
            Aggregator::Any => "any",
            Aggregator::Mode => "mode",
            Aggregator::Freq(_) => "freq",
        }
    }

    /// Aggregator names offered for a column type. `freq` takes a value
    /// argument chosen separately.
    pub fn names_for(kind: ColumnType) -> &'static [&'static str] {
        match kind {
            ColumnType::Numerical => &["min", "max", "avg", "median", "sum", "std"],
            ColumnType::Timedelta => &["min", "max", "avg", "median", "sum", "std", "freq"],
            ColumnType::Datetime => &["min", "max", "avg", "median"],
            ColumnType::Boolean => &["all", "any"],
            ColumnType::Categorical => &["mode", "freq"],
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "min" => Aggregator::Min,
            "max" => Aggregator::Max,
            "avg" => Aggregator::Avg,
            "median" => Aggregator::Median,
            "sum" => Aggregator::Sum,
            "std" => Aggregator::Std,
            "all" => Aggregator::All,
            "any" => Aggregator::Any,
            "mode" => Aggregator::Mode,
            _ => return None,
        })
    }

    pub fn result_type(&self, input: ColumnType) -> Option<ColumnType> {
        if !Self::names_for(input).contains(&self.name()) {
            return None;
        }
        Some(match self {
            Aggregator::Freq(_) => ColumnType::Numerical,
            Aggregator::All | Aggregator::Any => ColumnType::Boolean,
            Aggregator::Mode => ColumnType::Categorical,
            _ => input,
        })
    }

    /// Output column name, e.g. `avg(Score)` or `freq(Course Duration,6 months)`.
    pub fn label(&self, column: &str, kind: ColumnType) -> String {
        match self {
            Aggregator::Freq(v) => format!("freq({column},{})", v.render(kind)),
            other => format!("{}({column})", other.name()),
        }
    }
}

/// A fully bound action.
#[derive(Debug, Clone, PartialEq)]
pub enum Action {
    Select { column: String },
    Discretize { column: String, method: Discretization },
    BinaryOp { op: BinaryOperator, left: String, right: String },
    Where { column: String, op: Comparison, value: Value },
    GroupBy { grouper: String, aggregations: Vec<(String, Aggregator)> },
    DecisionTree { target: String, max_depth: u32 },
    UnivariateOutliers { column: String },
    BivariateOutliers { first: String, second: String },
    Clustering { k: u32 },
    Trend { time: String, target: String },
    AssociationRules,
}

impl Action {
    pub fn kind(&self) -> ActionKind {
        match self {
            Action::Select { .. } => ActionKind::Select,
            Action::Discretize { .. } => ActionKind::DeriveDiscretize,
            Action::BinaryOp { .. } => ActionKind::DeriveBinop,
            Action::Where { .. } => ActionKind::Where,
            Action::GroupBy { .. } => ActionKind::Groupby,
            Action::DecisionTree { .. } => ActionKind::DecisionTree,
            Action::UnivariateOutliers { .. } => ActionKind::UnaryOutliers,
            Action::BivariateOutliers { .. } => ActionKind::BinaryOutliers,
            Action::Clustering { .. } => ActionKind::Clustering,
            Action::Trend { .. } => ActionKind::Trend,
            Action::AssociationRules => ActionKind::AssociationRules,
        }
    }

    /// Operands in canonical order: commutative binary operations and
    /// bivariate outlier pairs sort their columns by name.
    fn ordered_pair<'a>(a: &'a str, b: &'a str, sort: bool) -> (&'a str, &'a str) {
        if sort && b < a {
            (b, a)
        } else {
            (a, b)
        }
    }

    /// Name of the column a derive action appends.
    pub fn derived_name(&self) -> Option<String> {
        match self {
            Action::Discretize { column, method } => Some(match method {
                Discretization::Bins(n) => format!("{column}_bins{n}"),
                Discretization::Quantiles(n) => format!("{column}_q{n}"),
                Discretization::Time(unit) => format!("{column}_{}", unit.as_str()),
            }),
            Action::BinaryOp { op, left, right } => {
                let (l, r) = Self::ordered_pair(left, right, op.is_commutative());
                Some(format!("({l} {} {r})", op.symbol()))
            }
            Action::UnivariateOutliers { column } => Some(format!("outlier({column})")),
            Action::BivariateOutliers { first, second } => {
                let (a, b) = Self::ordered_pair(first, second, true);
                Some(format!("outlier({a},{b})"))
            }
            Action::Clustering { k } => Some(format!("cluster({k})")),
            _ => None,
        }
    }

    fn canonical(&self, kind_of: &dyn Fn(&str) -> ColumnType) -> String {
        match self {
            Action::Select { column } => format!("select({column})"),
            Action::Discretize { column, method } => match method {
                Discretization::Bins(n) => format!("derive({column},bins,{n})"),
                Discretization::Quantiles(n) => format!("derive({column},quantiles,{n})"),
                Discretization::Time(unit) => format!("derive({column},time,{})", unit.as_str()),
            },
            Action::BinaryOp { op, left, right } => {
                let (l, r) = Self::ordered_pair(left, right, op.is_commutative());
                format!("derive({l},{},{r})", op.symbol())
            }
            Action::Where { column, op, value } => {
                format!("where({column},{},{})", op.symbol(), value.render(kind_of(column)))
            }
            Action::GroupBy { grouper, aggregations } => {
                let aggs: Vec<String> = aggregations
                    .iter()
                    .map(|(c, agg)| agg.label(c, kind_of(c)))
                    .collect();
                format!("group({grouper};{})", aggs.join(","))
            }
            Action::DecisionTree { target, max_depth } => format!("tree({target},{max_depth})"),
            Action::UnivariateOutliers { column } => format!("outliers({column})"),
            Action::BivariateOutliers { first, second } => {
                let (a, b) = Self::ordered_pair(first, second, true);
                format!("outliers({a},{b})")
            }
            Action::Clustering { k } => format!("cluster({k})"),
            Action::Trend { time, target } => format!("trend({time},{target})"),
            Action::AssociationRules => "rules()".to_owned(),
        }
    }

    /// Parameter bindings in tree order, rendered as strings.
    pub fn bindings(&self, kind_of: &dyn Fn(&str) -> ColumnType) -> Vec<(String, String)> {
        let b = |k: &str, v: String| (k.to_owned(), v);
        match self {
            Action::Select { column } => vec![b("column", column.clone())],
            Action::Discretize { column, method } => {
                let (m, amount) = match method {
                    Discretization::Bins(n) => ("bins", n.to_string()),
                    Discretization::Quantiles(n) => ("quantiles", n.to_string()),
                    Discretization::Time(u) => ("time", u.as_str().to_owned()),
                };
                vec![b("target", column.clone()), b("method", m.to_owned()), b(m, amount)]
            }
            Action::BinaryOp { op, left, right } => vec![
                b("operator", op.symbol().to_owned()),
                b("left", left.clone()),
                b("right", right.clone()),
            ],
            Action::Where { column, op, value } => vec![
                b("column", column.clone()),
                b("operator", op.symbol().to_owned()),
                b("value", value.render(kind_of(column))),
            ],
            Action::GroupBy { grouper, aggregations } => {
                let mut out = vec![b("grouper", grouper.clone())];
                for (c, agg) in aggregations {
                    out.push(b(&format!("agg:{c}"), agg.name().to_owned()));
                    if let Aggregator::Freq(v) = agg {
                        out.push(b(&format!("freq:{c}"), v.render(kind_of(c))));
                    }
                }
                out
            }
            Action::DecisionTree { target, max_depth } => {
                vec![b("target", target.clone()), b("max depth", max_depth.to_string())]
            }
            Action::UnivariateOutliers { column } => vec![b("column", column.clone())],
            Action::BivariateOutliers { first, second } => {
                let (x, y) = Self::ordered_pair(first, second, true);
                vec![b("pair", format!("{x},{y}"))]
            }
            Action::Clustering { k } => vec![b("clusters", k.to_string())],
            Action::Trend { time, target } => vec![b("datetime", time.clone()), b("target", target.clone())],
            Action::AssociationRules => Vec::new(),
        }
    }
}

/// An action together with its canonical form, which identifies it in
/// lineages, reports and transposition keys.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundAction {
    action: Action,
    canonical: String,
    bindings: Vec<(String, String)>,
}

impl GroundAction {
    /// Binds an action against the dataset it will be applied to (column
    /// types decide how values render). Unknown columns render as categorical.
    pub fn new(action: Action, d: &Dataset) -> Self {
        let kind_of = |name: &str| {
            d.column(name)
                .or_else(|| d.base().column(name))
                .map_or(ColumnType::Categorical, |c| c.kind())
        };
        GroundAction {
            canonical: action.canonical(&kind_of),
            bindings: action.bindings(&kind_of),
            action,
        }
    }

    pub fn action(&self) -> &Action {
        &self.action
    }

    pub fn kind(&self) -> ActionKind {
        self.action.kind()
    }

    pub fn canonical_form(&self) -> &str {
        &self.canonical
    }

    pub fn bindings(&self) -> &[(String, String)] {
        &self.bindings
    }
}

impl fmt::Display for GroundAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::student_table;

    #[test]
    fn canonical_forms_render_typed_values() {
        let d = student_table();
        let group = Action::GroupBy {
            grouper: "Student".into(),
            aggregations: vec![
                ("Exam Date".into(), Aggregator::Max),
                ("Score".into(), Aggregator::Avg),
                (
                    "Course Duration".into(),
                    Aggregator::Freq(Value::Number(180.0 * 86_400.0)),
                ),
            ],
        };
        assert_eq!(
            GroundAction::new(group, &d).canonical_form(),
            "group(Student;max(Exam Date),avg(Score),freq(Course Duration,6 months))"
        );
        let filter = Action::Where {
            column: "Score".into(),
            op: Comparison::Lt,
            value: Value::Number(60.0),
        };
        assert_eq!(GroundAction::new(filter, &d).canonical_form(), "where(Score,<,60)");
    }

    #[test]
    fn commutative_operators_share_a_canonical_form() {
        let d = student_table();
        let form = |op, l: &str, r: &str| {
            GroundAction::new(
                Action::BinaryOp {
                    op,
                    left: l.into(),
                    right: r.into(),
                },
                &d,
            )
            .canonical_form()
            .to_owned()
        };
        for op in BinaryOperator::ALL {
            let same = form(op, "A", "B") == form(op, "B", "A");
            assert_eq!(same, op.is_commutative(), "{op:?}");
        }
    }

    #[test]
    fn binop_type_rules() {
        use ColumnType::*;
        assert_eq!(BinaryOperator::Add.result_type(Datetime, Datetime), None);
        assert_eq!(BinaryOperator::Sub.result_type(Datetime, Timedelta), Some(Datetime));
        assert_eq!(BinaryOperator::Sub.result_type(Datetime, Datetime), Some(Timedelta));
        assert_eq!(BinaryOperator::Gt.result_type(Categorical, Categorical), None);
        assert_eq!(BinaryOperator::Eq.result_type(Categorical, Categorical), Some(Boolean));
        assert_eq!(BinaryOperator::Div.result_type(Timedelta, Timedelta), Some(Numerical));
    }
}
