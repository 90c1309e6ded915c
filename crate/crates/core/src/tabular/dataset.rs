use std::collections::HashSet;
use std::sync::Arc;

use super::column::Column;
use crate::actions::GroundAction;
use crate::error::{Error, Result};

/// One entry of a dataset's history.
#[derive(Debug, Clone, PartialEq)]
pub enum LineageStep {
    Load(String),
    Apply(Arc<GroundAction>),
}

impl LineageStep {
    pub fn canonical_form(&self) -> String {
        match self {
            LineageStep::Load(source) => format!("load({source})"),
            LineageStep::Apply(action) => action.canonical_form().to_owned(),
        }
    }
}

/// The table `select` actions draw columns from: the loaded dataset, or
/// the aggregated table after a `groupby`.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseTable {
    columns: Vec<Arc<Column>>,
    row_count: usize,
}

impl BaseTable {
    pub fn columns(&self) -> &[Arc<Column>] {
        &self.columns
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn column(&self, name: &str) -> Option<&Arc<Column>> {
        self.columns.iter().find(|c| c.name() == name)
    }
}

/// An immutable columnar table. Cloning is cheap: columns are shared.
#[derive(Debug, Clone)]
pub struct Dataset {
    columns: Vec<Arc<Column>>,
    row_count: usize,
    lineage: Vec<LineageStep>,
    base: Arc<BaseTable>,
    // Row `i` of this dataset is row `row_ids[i]` of `base`.
    row_ids: Arc<[usize]>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.row_count == other.row_count
            && self.row_ids == other.row_ids
            && self.lineage == other.lineage
            && self.columns.len() == other.columns.len()
            && self.columns.iter().zip(&other.columns).all(|(a, b)| a == b)
    }
}

impl Dataset {
    /// Builds a dataset from equally long, uniquely named columns. The
    /// dataset is its own base table.
    pub fn new(columns: Vec<Column>) -> Result<Self> {
        Self::from_shared(columns.into_iter().map(Arc::new).collect(), None)
    }

    pub fn with_row_count(columns: Vec<Column>, row_count: usize) -> Result<Self> {
        Self::from_shared(columns.into_iter().map(Arc::new).collect(), Some(row_count))
    }

    fn from_shared(columns: Vec<Arc<Column>>, row_count: Option<usize>) -> Result<Self> {
        let row_count = match (row_count, columns.first()) {
            (Some(n), _) => n,
            (None, Some(c)) => c.len(),
            (None, None) => 0,
        };
        let mut names = HashSet::new();
        for c in &columns {
            if c.len() != row_count {
                return Err(Error::InvalidArgument(format!(
                    "column `{}` has {} rows, expected {row_count}",
                    c.name(),
                    c.len()
                )));
            }
            if !names.insert(c.name().to_owned()) {
                return Err(Error::InvalidArgument(format!("duplicate column `{}`", c.name())));
            }
        }
        let base = Arc::new(BaseTable {
            columns: columns.clone(),
            row_count,
        });
        Ok(Dataset {
            columns,
            row_count,
            lineage: Vec::new(),
            base,
            row_ids: (0..row_count).collect(),
        })
    }

    pub fn with_load_step(mut self, source: impl Into<String>) -> Self {
        self.lineage = vec![LineageStep::Load(source.into())];
        self
    }

    /// The empty state over this dataset: no columns, every row, nothing
    /// applied yet. `select` actions draw from `self`'s columns.
    pub fn empty_state(&self) -> Dataset {
        Dataset {
            columns: Vec::new(),
            row_count: self.row_count,
            lineage: Vec::new(),
            base: Arc::new(BaseTable {
                columns: self.columns.clone(),
                row_count: self.row_count,
            }),
            row_ids: (0..self.row_count).collect(),
        }
    }

    pub fn columns(&self) -> &[Arc<Column>] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&Arc<Column>> {
        self.columns.iter().find(|c| c.name() == name)
    }

    pub fn column_or_err(&self, name: &str) -> Result<&Arc<Column>> {
        self.column(name).ok_or_else(|| Error::UnknownColumn(name.to_owned()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.column(name).is_some()
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name()).collect()
    }

    pub fn row_count(&self) -> usize {
        self.row_count
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn lineage(&self) -> &[LineageStep] {
        &self.lineage
    }

    pub fn lineage_forms(&self) -> Vec<String> {
        self.lineage.iter().map(LineageStep::canonical_form).collect()
    }

    pub fn base(&self) -> &BaseTable {
        &self.base
    }

    pub fn row_ids(&self) -> &[usize] {
        &self.row_ids
    }

    fn extended(&self, step: Option<LineageStep>) -> Vec<LineageStep> {
        let mut lineage = self.lineage.clone();
        lineage.extend(step);
        lineage
    }

    /// Joins column `name` of the base table, aligned to the surviving rows.
    pub(crate) fn select_from_base(&self, name: &str, step: LineageStep) -> Result<Dataset> {
        let source = self.base.column(name).ok_or_else(|| Error::UnknownColumn(name.to_owned()))?;
        self.appended(source.take(&self.row_ids), Some(step))
    }

    pub(crate) fn appended(&self, column: Column, step: Option<LineageStep>) -> Result<Dataset> {
        if column.len() != self.row_count {
            return Err(Error::InvalidArgument(format!(
                "column `{}` has {} rows, expected {}",
                column.name(),
                column.len(),
                self.row_count
            )));
        }
        if self.contains(column.name()) {
            return Err(Error::InvalidArgument(format!("duplicate column `{}`", column.name())));
        }
        let mut columns = self.columns.clone();
        columns.push(Arc::new(column));
        Ok(Dataset {
            columns,
            row_count: self.row_count,
            lineage: self.extended(step),
            base: self.base.clone(),
            row_ids: self.row_ids.clone(),
        })
    }

    /// Keeps the given rows (indices into this dataset, ascending).
    pub(crate) fn filtered(&self, keep: &[usize], step: LineageStep) -> Dataset {
        Dataset {
            columns: self.columns.iter().map(|c| Arc::new(c.take(keep))).collect(),
            row_count: keep.len(),
            lineage: self.extended(Some(step)),
            base: self.base.clone(),
            row_ids: keep.iter().map(|&r| self.row_ids[r]).collect(),
        }
    }

    /// Replaces the schema (groupby); the result becomes the new base table.
    pub(crate) fn regrouped(&self, columns: Vec<Column>, step: LineageStep) -> Result<Dataset> {
        let mut d = Dataset::new(columns)?;
        d.lineage = self.extended(Some(step));
        Ok(d)
    }
}
