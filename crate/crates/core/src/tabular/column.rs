use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::time::{format_datetime, format_duration};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnType {
    Numerical,
    Datetime,
    Timedelta,
    Categorical,
    Boolean,
}

impl ColumnType {
    pub fn is_quantitative(self) -> bool {
        matches!(self, Self::Numerical | Self::Datetime | Self::Timedelta)
    }

    pub fn is_qualitative(self) -> bool {
        !self.is_quantitative()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Numerical => "numerical",
            Self::Datetime => "datetime",
            Self::Timedelta => "timedelta",
            Self::Categorical => "categorical",
            Self::Boolean => "boolean",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Some(match name.to_ascii_lowercase().as_str() {
            "numerical" | "numeric" | "number" => Self::Numerical,
            "datetime" | "date" => Self::Datetime,
            "timedelta" | "duration" => Self::Timedelta,
            "categorical" | "category" | "string" => Self::Categorical,
            "boolean" | "bool" => Self::Boolean,
            _ => return None,
        })
    }
}

impl fmt::Display for ColumnType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Original,
    Derived,
    ModelGenerated,
}

/// A single non-null cell. Quantitative cells are numbers in their
/// column's unit (epoch seconds for datetimes, seconds for durations).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Bool(bool),
    Text(Arc<str>),
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            Value::Bool(b) => Some(f64::from(u8::from(*b))),
            Value::Text(_) => None,
        }
    }

    /// Renders the value the way it appears in canonical action forms.
    pub fn render(&self, kind: ColumnType) -> String {
        match (self, kind) {
            (Value::Number(x), ColumnType::Datetime) => format_datetime(*x),
            (Value::Number(x), ColumnType::Timedelta) => format_duration(*x),
            (Value::Number(x), _) => format!("{x}"),
            (Value::Bool(b), _) => b.to_string(),
            (Value::Text(s), _) => s.to_string(),
        }
    }

    pub(crate) fn hash_into<H: Hasher>(&self, state: &mut H) {
        match self {
            Value::Number(x) => {
                0u8.hash(state);
                canonical_bits(*x).hash(state);
            }
            Value::Bool(b) => {
                1u8.hash(state);
                b.hash(state);
            }
            Value::Text(s) => {
                2u8.hash(state);
                s.hash(state);
            }
        }
    }
}

pub(crate) fn canonical_bits(x: f64) -> u64 {
    if x == 0.0 {
        0
    } else {
        x.to_bits()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Quantitative(Vec<Option<f64>>),
    Categorical(Vec<Option<Arc<str>>>),
    Boolean(Vec<Option<bool>>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Quantitative(v) => v.len(),
            ColumnData::Categorical(v) => v.len(),
            ColumnData::Boolean(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn take(&self, rows: &[usize]) -> ColumnData {
        match self {
            ColumnData::Quantitative(v) => ColumnData::Quantitative(rows.iter().map(|&r| v[r]).collect()),
            ColumnData::Categorical(v) => {
                ColumnData::Categorical(rows.iter().map(|&r| v[r].clone()).collect())
            }
            ColumnData::Boolean(v) => ColumnData::Boolean(rows.iter().map(|&r| v[r]).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    name: String,
    kind: ColumnType,
    data: ColumnData,
    origin: Origin,
    provenance: Option<String>,
    sources: Vec<String>,
}

impl Column {
    fn original(name: impl Into<String>, kind: ColumnType, data: ColumnData) -> Self {
        let name = name.into();
        Column {
            sources: vec![name.clone()],
            name,
            kind,
            data,
            origin: Origin::Original,
            provenance: None,
        }
    }

    pub fn numerical(name: impl Into<String>, values: Vec<Option<f64>>) -> Self {
        Self::original(name, ColumnType::Numerical, ColumnData::Quantitative(values))
    }

    pub fn datetime(name: impl Into<String>, epoch_seconds: Vec<Option<f64>>) -> Self {
        Self::original(name, ColumnType::Datetime, ColumnData::Quantitative(epoch_seconds))
    }

    pub fn timedelta(name: impl Into<String>, seconds: Vec<Option<f64>>) -> Self {
        Self::original(name, ColumnType::Timedelta, ColumnData::Quantitative(seconds))
    }

    pub fn categorical<S: AsRef<str>>(name: impl Into<String>, values: Vec<Option<S>>) -> Self {
        let mut interned: HashMap<String, Arc<str>> = HashMap::new();
        let cells = values
            .into_iter()
            .map(|v| {
                v.map(|s| {
                    interned
                        .entry(s.as_ref().to_owned())
                        .or_insert_with(|| Arc::from(s.as_ref()))
                        .clone()
                })
            })
            .collect();
        Self::original(name, ColumnType::Categorical, ColumnData::Categorical(cells))
    }

    pub fn boolean(name: impl Into<String>, values: Vec<Option<bool>>) -> Self {
        Self::original(name, ColumnType::Boolean, ColumnData::Boolean(values))
    }

    /// Builds a quantitative column of the given kind (numerical, datetime or timedelta).
    pub fn quantitative(name: impl Into<String>, kind: ColumnType, values: Vec<Option<f64>>) -> Self {
        assert!(kind.is_quantitative(), "{kind} is not quantitative");
        let values = values
            .into_iter()
            .map(|v| v.filter(|x| x.is_finite()))
            .collect();
        Self::original(name, kind, ColumnData::Quantitative(values))
    }

    /// Marks the column as generated by an action, with the action's
    /// canonical form and the original columns it was computed from.
    pub fn with_provenance(mut self, origin: Origin, provenance: impl Into<String>, sources: Vec<String>) -> Self {
        let mut sources = sources;
        sources.sort();
        sources.dedup();
        self.origin = origin;
        self.provenance = Some(provenance.into());
        self.sources = sources;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        let name = name.into();
        if self.origin == Origin::Original {
            self.sources = vec![name.clone()];
        }
        self.name = name;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ColumnType {
        self.kind
    }

    pub fn data(&self) -> &ColumnData {
        &self.data
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    /// Original column names this column was computed from.
    pub fn sources(&self) -> &[String] {
        &self.sources
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, row: usize) -> Option<Value> {
        match &self.data {
            ColumnData::Quantitative(v) => v[row].map(Value::Number),
            ColumnData::Categorical(v) => v[row].clone().map(Value::Text),
            ColumnData::Boolean(v) => v[row].map(Value::Bool),
        }
    }

    pub fn is_null(&self, row: usize) -> bool {
        match &self.data {
            ColumnData::Quantitative(v) => v[row].is_none(),
            ColumnData::Categorical(v) => v[row].is_none(),
            ColumnData::Boolean(v) => v[row].is_none(),
        }
    }

    pub fn non_null_count(&self) -> usize {
        (0..self.len()).filter(|&r| !self.is_null(r)).count()
    }

    pub fn quantitative_values(&self) -> Option<&[Option<f64>]> {
        match &self.data {
            ColumnData::Quantitative(v) => Some(v),
            _ => None,
        }
    }

    /// Non-null numeric cells (quantitative columns only).
    pub fn numbers(&self) -> Vec<f64> {
        match &self.data {
            ColumnData::Quantitative(v) => v.iter().flatten().copied().collect(),
            _ => Vec::new(),
        }
    }

    /// Numeric encoding: identity for quantitative columns, 0/1 for
    /// booleans, first-appearance ordinal codes for categoricals.
    pub fn encode(&self) -> Vec<Option<f64>> {
        match &self.data {
            ColumnData::Quantitative(v) => v.clone(),
            ColumnData::Boolean(v) => v.iter().map(|b| b.map(|b| f64::from(u8::from(b)))).collect(),
            ColumnData::Categorical(v) => {
                let mut codes: HashMap<&str, f64> = HashMap::new();
                v.iter()
                    .map(|cell| {
                        cell.as_deref().map(|s| {
                            let next = codes.len() as f64;
                            *codes.entry(s).or_insert(next)
                        })
                    })
                    .collect()
            }
        }
    }

    /// Category labels for qualitative columns (`None` for nulls); quantitative
    /// columns render each value.
    pub fn labels(&self) -> Vec<Option<String>> {
        (0..self.len()).map(|r| self.get(r).map(|v| v.render(self.kind))).collect()
    }

    /// Frequency table in first-appearance order.
    pub fn value_counts(&self) -> Vec<(Value, usize)> {
        let mut order: Vec<(Value, usize)> = Vec::new();
        let mut index: HashMap<ValueKey, usize> = HashMap::new();
        for r in 0..self.len() {
            if let Some(v) = self.get(r) {
                let key = ValueKey::from(&v);
                match index.get(&key) {
                    Some(&i) => order[i].1 += 1,
                    None => {
                        index.insert(key, order.len());
                        order.push((v, 1));
                    }
                }
            }
        }
        order
    }

    pub fn distinct_count(&self) -> usize {
        self.value_counts().len()
    }

    pub fn take(&self, rows: &[usize]) -> Column {
        Column {
            name: self.name.clone(),
            kind: self.kind,
            data: self.data.take(rows),
            origin: self.origin,
            provenance: self.provenance.clone(),
            sources: self.sources.clone(),
        }
    }

    pub(crate) fn hash_cell<H: Hasher>(&self, row: usize, state: &mut H) {
        match self.get(row) {
            None => 3u8.hash(state),
            Some(v) => v.hash_into(state),
        }
    }
}

/// Hashable stand-in for [`Value`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ValueKey {
    Number(u64),
    Bool(bool),
    Text(Arc<str>),
}

impl From<&Value> for ValueKey {
    fn from(v: &Value) -> Self {
        match v {
            Value::Number(x) => ValueKey::Number(canonical_bits(*x)),
            Value::Bool(b) => ValueKey::Bool(*b),
            Value::Text(s) => ValueKey::Text(s.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn categorical_encoding_is_first_appearance() {
        let c = Column::categorical("c", vec![Some("b"), None, Some("a"), Some("b"), Some("c")]);
        assert_eq!(c.encode(), vec![Some(0.0), None, Some(1.0), Some(0.0), Some(2.0)]);
    }

    #[test]
    fn value_counts_skip_nulls() {
        let c = Column::boolean("b", vec![Some(true), None, Some(false), Some(true)]);
        let counts = c.value_counts();
        assert_eq!(counts, vec![(Value::Bool(true), 2), (Value::Bool(false), 1)]);
        assert_eq!(c.non_null_count(), 3);
    }

    #[test]
    fn non_finite_numbers_become_null() {
        let c = Column::quantitative("x", ColumnType::Numerical, vec![Some(1.0), Some(f64::NAN), Some(f64::INFINITY)]);
        assert_eq!(c.numbers(), vec![1.0]);
    }

    #[test]
    fn quantitative_iff_not_qualitative() {
        for kind in [
            ColumnType::Numerical,
            ColumnType::Datetime,
            ColumnType::Timedelta,
            ColumnType::Categorical,
            ColumnType::Boolean,
        ] {
            assert_ne!(kind.is_quantitative(), kind.is_qualitative());
            assert_eq!(ColumnType::parse(kind.as_str()), Some(kind));
        }
    }
}
