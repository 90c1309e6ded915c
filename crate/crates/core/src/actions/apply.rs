//! Execution of data actions.

use std::collections::HashMap;
use std::sync::Arc;

use super::action::{Action, Aggregator, BinaryOperator, Comparison, Discretization, GroundAction};
use super::precondition::{check_hard, Verdict};
use crate::error::{Error, Result};
use crate::tabular::stats::{equal_width_bin, mean, min_max, quantile_sorted, sorted, std_dev};
use crate::tabular::{Column, ColumnData, Dataset, LineageStep, Origin, Value, ValueKey};

/// Applies a data action, returning the successor dataset with the
/// action appended to its lineage. Hard preconditions are re-checked.
pub fn apply_data_action(d: &Dataset, a: &GroundAction) -> Result<Dataset> {
    if a.kind().is_model() {
        return Err(Error::InvalidArgument(format!("{a} is a model action")));
    }
    if let Verdict::HardFail(reason) = check_hard(a, d) {
        return Err(Error::Precondition(reason));
    }
    let step = LineageStep::Apply(Arc::new(a.clone()));
    match a.action() {
        Action::Select { column } => d.select_from_base(column, step),
        Action::Discretize { .. } | Action::BinaryOp { .. } => {
            let column = derive_column(d, a)?;
            d.appended(column, Some(step))
        }
        Action::Where { column, op, value } => {
            let keep = where_keep(d.column_or_err(column)?, *op, value);
            Ok(d.filtered(&keep, step))
        }
        Action::GroupBy { grouper, aggregations } => {
            let columns = group_columns(d, grouper, aggregations, a.canonical_form())?;
            d.regrouped(columns, step)
        }
        _ => unreachable!("model actions rejected above"),
    }
}

/// Computes the column a derive action appends.
pub(crate) fn derive_column(d: &Dataset, a: &GroundAction) -> Result<Column> {
    let name = a.action().derived_name().expect("derive action names its column");
    match a.action() {
        Action::Discretize { column, method } => {
            let source = d.column_or_err(column)?;
            let labels = discretize(source, *method);
            Ok(Column::categorical(name, labels).with_provenance(
                Origin::Derived,
                a.canonical_form(),
                source.sources().to_vec(),
            ))
        }
        Action::BinaryOp { op, left, right } => {
            let l = d.column_or_err(left)?;
            let r = d.column_or_err(right)?;
            let kind = op
                .result_type(l.kind(), r.kind())
                .ok_or_else(|| Error::Precondition(format!("{} {} {} has incompatible types", left, op.symbol(), right)))?;
            let mut sources = l.sources().to_vec();
            sources.extend_from_slice(r.sources());
            let column = if op.is_comparison() {
                let values = (0..d.row_count())
                    .map(|row| match (l.get(row), r.get(row)) {
                        (Some(a), Some(b)) => Some(compare(*op, &a, &b)),
                        _ => None,
                    })
                    .collect();
                Column::boolean(name, values)
            } else {
                let (lv, rv) = (l.encode(), r.encode());
                let values = lv
                    .iter()
                    .zip(&rv)
                    .map(|(a, b)| arithmetic(*op, (*a)?, (*b)?))
                    .collect();
                Column::quantitative(name, kind, values)
            };
            Ok(column.with_provenance(Origin::Derived, a.canonical_form(), sources))
        }
        other => Err(Error::InvalidArgument(format!("{other:?} does not derive a column"))),
    }
}

fn compare(op: BinaryOperator, a: &Value, b: &Value) -> bool {
    match op {
        BinaryOperator::Eq => a == b,
        BinaryOperator::Ne => a != b,
        BinaryOperator::Gt => a.as_f64() > b.as_f64(),
        BinaryOperator::Lt => a.as_f64() < b.as_f64(),
        _ => unreachable!("arithmetic operator"),
    }
}

fn arithmetic(op: BinaryOperator, a: f64, b: f64) -> Option<f64> {
    let x = match op {
        BinaryOperator::Add => a + b,
        BinaryOperator::Sub => a - b,
        BinaryOperator::Mul => a * b,
        BinaryOperator::Div if b == 0.0 => return None,
        BinaryOperator::Div => a / b,
        _ => unreachable!("comparison operator"),
    };
    x.is_finite().then_some(x)
}

fn discretize(c: &Column, method: Discretization) -> Vec<Option<String>> {
    let values = c.quantitative_values().unwrap_or(&[]);
    match method {
        Discretization::Bins(n) => {
            let (lo, hi) = min_max(&c.numbers());
            values
                .iter()
                .map(|v| v.map(|x| format!("b{}", equal_width_bin(x, lo, hi, n as usize) + 1)))
                .collect()
        }
        Discretization::Quantiles(n) => {
            let s = sorted(&c.numbers());
            if s.is_empty() {
                return vec![None; values.len()];
            }
            let cuts: Vec<f64> = (1..n).map(|k| quantile_sorted(&s, f64::from(k) / f64::from(n))).collect();
            values
                .iter()
                .map(|v| v.map(|x| format!("q{}", cuts.iter().filter(|&&cut| x > cut).count() + 1)))
                .collect()
        }
        Discretization::Time(unit) => values
            .iter()
            .map(|v| v.and_then(|x| unit.extract(x)).map(|n| n.to_string()))
            .collect(),
    }
}

/// Row indices (ascending) whose cell satisfies `op value`; nulls never match.
pub(crate) fn where_keep(c: &Column, op: Comparison, value: &Value) -> Vec<usize> {
    (0..c.len())
        .filter(|&row| c.get(row).is_some_and(|cell| op.holds(&cell, value)))
        .collect()
}

/// Rows of each group, keyed by the grouper value in first-appearance order.
/// Rows with a null grouper belong to no group.
pub(crate) fn groups(c: &Column) -> Vec<Vec<usize>> {
    let mut index: HashMap<ValueKey, usize> = HashMap::new();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for row in 0..c.len() {
        if let Some(v) = c.get(row) {
            let slot = *index.entry(ValueKey::from(&v)).or_insert_with(|| {
                out.push(Vec::new());
                out.len() - 1
            });
            out[slot].push(row);
        }
    }
    out
}

fn group_columns(
    d: &Dataset,
    grouper: &str,
    aggregations: &[(String, Aggregator)],
    canonical: &str,
) -> Result<Vec<Column>> {
    let key = d.column_or_err(grouper)?;
    let groups = groups(key);
    let firsts: Vec<usize> = groups.iter().map(|g| g[0]).collect();
    let mut columns = vec![key.take(&firsts)];
    for (name, agg) in aggregations {
        let c = d.column_or_err(name)?;
        let kind = agg
            .result_type(c.kind())
            .ok_or_else(|| Error::Precondition(format!("{} cannot aggregate {} column `{name}`", agg.name(), c.kind())))?;
        let label = agg.label(name, c.kind());
        let column = match (agg, c.data()) {
            (Aggregator::Freq(v), _) => {
                let counts = groups
                    .iter()
                    .map(|g| Some(g.iter().filter(|&&r| c.get(r).as_ref() == Some(v)).count() as f64))
                    .collect();
                Column::numerical(label, counts)
            }
            (Aggregator::Mode, _) => {
                let modes = groups
                    .iter()
                    .map(|g| {
                        let sub = c.take(g);
                        let counts = sub.value_counts();
                        let best = counts.iter().map(|(_, n)| *n).max()?;
                        counts.iter().find(|(_, n)| *n == best).map(|(v, _)| v.render(c.kind()))
                    })
                    .collect();
                Column::categorical(label, modes)
            }
            (Aggregator::All | Aggregator::Any, ColumnData::Boolean(values)) => {
                let out = groups
                    .iter()
                    .map(|g| {
                        let cells: Vec<bool> = g.iter().filter_map(|&r| values[r]).collect();
                        if cells.is_empty() {
                            None
                        } else if matches!(agg, Aggregator::All) {
                            Some(cells.iter().all(|&b| b))
                        } else {
                            Some(cells.iter().any(|&b| b))
                        }
                    })
                    .collect();
                Column::boolean(label, out)
            }
            (_, ColumnData::Quantitative(values)) => {
                let out = groups
                    .iter()
                    .map(|g| {
                        let xs: Vec<f64> = g.iter().filter_map(|&r| values[r]).collect();
                        (!xs.is_empty()).then(|| numeric_aggregate(agg, &xs))
                    })
                    .collect();
                Column::quantitative(label, kind, out)
            }
            _ => return Err(Error::Precondition(format!("cannot aggregate `{name}` with {}", agg.name()))),
        };
        columns.push(column.with_provenance(Origin::Derived, canonical, c.sources().to_vec()));
    }
    Ok(columns)
}

fn numeric_aggregate(agg: &Aggregator, xs: &[f64]) -> f64 {
    match agg {
        Aggregator::Min => min_max(xs).0,
        Aggregator::Max => min_max(xs).1,
        Aggregator::Avg => mean(xs),
        Aggregator::Median => quantile_sorted(&sorted(xs), 0.5),
        Aggregator::Sum => xs.iter().sum(),
        Aggregator::Std => std_dev(xs),
        _ => unreachable!("non-numeric aggregator"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tabular::{student_table, ColumnType};

    fn ground(d: &Dataset, action: Action) -> GroundAction {
        GroundAction::new(action, d)
    }

    #[test]
    fn month_of_exam_date() {
        let d = student_table();
        let a = ground(
            &d,
            Action::Discretize {
                column: "Exam Date".into(),
                method: Discretization::Time(crate::tabular::time::TimeUnit::Month),
            },
        );
        let out = apply_data_action(&d, &a).unwrap();
        let col = out.column("Exam Date_month").unwrap();
        assert_eq!(col.kind(), ColumnType::Categorical);
        let labels: Vec<_> = col.labels().into_iter().flatten().collect();
        assert_eq!(labels, ["9", "8", "1", "5"]);
        assert_eq!(col.provenance(), Some("derive(Exam Date,time,month)"));
        assert_eq!(out.lineage_forms().last().unwrap(), "derive(Exam Date,time,month)");
    }

    #[test]
    fn where_filters_rows() {
        let d = student_table();
        let a = ground(
            &d,
            Action::Where {
                column: "Score".into(),
                op: Comparison::Gt,
                value: Value::Number(80.0),
            },
        );
        let out = apply_data_action(&d, &a).unwrap();
        assert_eq!(out.row_count(), 3);
        let students: Vec<_> = out.column("Student").unwrap().labels().into_iter().flatten().collect();
        assert_eq!(students, ["S1", "S2", "S4"]);
        assert_eq!(out.row_ids(), &[0, 1, 3]);
    }

    #[test]
    fn groupby_unique_grouper_keeps_every_row() {
        let d = student_table();
        let d = d.empty_state();
        let d = apply_data_action(&d, &ground(&d, Action::Select { column: "Student".into() })).unwrap();
        let d = apply_data_action(&d, &ground(&d, Action::Select { column: "Score".into() })).unwrap();
        let a = ground(
            &d,
            Action::GroupBy {
                grouper: "Student".into(),
                aggregations: vec![("Score".into(), Aggregator::Avg)],
            },
        );
        let out = apply_data_action(&d, &a).unwrap();
        assert_eq!(out.row_count(), 4);
        assert_eq!(out.column_names(), ["Student", "avg(Score)"]);
        assert_eq!(out.base().columns().len(), 2);
    }

    #[test]
    fn groupby_aggregators() {
        let d = Dataset::new(vec![
            Column::categorical("g", vec![Some("a"), Some("b"), Some("a"), Some("a"), None]),
            Column::numerical("x", vec![Some(1.0), Some(5.0), Some(3.0), None, Some(9.0)]),
            Column::categorical("c", vec![Some("u"), Some("v"), Some("v"), Some("v"), Some("u")]),
            Column::boolean("f", vec![Some(true), Some(false), Some(true), Some(false), None]),
        ])
        .unwrap();
        let a = ground(
            &d,
            Action::GroupBy {
                grouper: "g".into(),
                aggregations: vec![
                    ("x".into(), Aggregator::Std),
                    ("c".into(), Aggregator::Freq(Value::Text("v".into()))),
                    ("f".into(), Aggregator::Any),
                ],
            },
        );
        let out = apply_data_action(&d, &a).unwrap();
        assert_eq!(out.row_count(), 2);
        assert_eq!(out.column("std(x)").unwrap().numbers(), vec![1.0, 0.0]);
        assert_eq!(out.column("freq(c,v)").unwrap().numbers(), vec![2.0, 1.0]);
        assert_eq!(out.column("any(f)").unwrap().get(1), Some(Value::Bool(false)));
    }

    #[test]
    fn datetime_minus_duration() {
        let d = student_table();
        let a = ground(
            &d,
            Action::BinaryOp {
                op: BinaryOperator::Sub,
                left: "Exam Date".into(),
                right: "Course Duration".into(),
            },
        );
        let out = apply_data_action(&d, &a).unwrap();
        let c = out.column("(Exam Date - Course Duration)").unwrap();
        assert_eq!(c.kind(), ColumnType::Datetime);
        assert_eq!(c.sources(), ["Course Duration", "Exam Date"]);
    }

    #[test]
    fn division_by_zero_is_null() {
        assert_eq!(arithmetic(BinaryOperator::Div, 1.0, 0.0), None);
        assert_eq!(arithmetic(BinaryOperator::Mul, 2.0, 3.0), Some(6.0));
    }

    #[test]
    fn model_actions_are_rejected() {
        let d = student_table();
        let a = ground(&d, Action::AssociationRules);
        assert!(apply_data_action(&d, &a).is_err());
    }
}
