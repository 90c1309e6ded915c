use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::actions::GroundAction;
use crate::error::Result;
use crate::tabular::{Column, Dataset, LineageStep};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ModelKind {
    DecisionTree,
    RegressionTree,
    UnivariateOutliers,
    BivariateOutliers,
    Clustering,
    Trend,
    AssociationRules,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::DecisionTree => "decisionTree",
            ModelKind::RegressionTree => "regressionTree",
            ModelKind::UnivariateOutliers => "univariateOutliers",
            ModelKind::BivariateOutliers => "bivariateOutliers",
            ModelKind::Clustering => "clustering",
            ModelKind::Trend => "trend",
            ModelKind::AssociationRules => "associationRules",
        }
    }

    pub const ALL: [ModelKind; 7] = [
        ModelKind::DecisionTree,
        ModelKind::RegressionTree,
        ModelKind::UnivariateOutliers,
        ModelKind::BivariateOutliers,
        ModelKind::Clustering,
        ModelKind::Trend,
        ModelKind::AssociationRules,
    ];

    pub fn parse(text: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == text)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeSplit {
    pub feature: String,
    /// Rows with `feature <= threshold` go left.
    pub threshold: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TreeArtifacts {
    pub target: String,
    pub classification: bool,
    /// Macro F1 for classification, R² for regression (on the fitted rows).
    pub score: f64,
    /// Normalized entropy of the target (of its 10-bin histogram when
    /// quantitative).
    pub target_entropy: f64,
    /// Fraction of target classes predicted by some leaf; 1 for regression.
    pub coverage: f64,
    pub class_count: usize,
    pub top_split: Option<TreeSplit>,
    pub leaves: usize,
}

/// A flagged value and its outlier score `out(v)`: the z-score for
/// quantitative columns, the relative frequency for qualitative ones.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlaggedValue {
    pub value: String,
    pub out: f64,
    pub rows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct UnivariateArtifacts {
    pub column: String,
    pub quantitative: bool,
    pub flagged: Vec<FlaggedValue>,
}

/// A flagged pair of values with its score in [0,1].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FlaggedPair {
    pub first: String,
    pub second: String,
    pub z: f64,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BivariateArtifacts {
    pub first: String,
    pub second: String,
    pub correlation: f64,
    pub qualitative: bool,
    pub flagged: Vec<FlaggedPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClusterArtifacts {
    pub k: u32,
    pub silhouette: f64,
    pub sizes: Vec<usize>,
    /// Categorical column most associated with the clusters (Cramér's V),
    /// absent when the dataset has no categorical column.
    pub association: Option<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrendArtifacts {
    pub time: String,
    pub target: String,
    pub trend: bool,
    pub period: bool,
    pub outliers: bool,
    /// Mann-Kendall S statistic; its sign is the trend direction.
    pub mk_s: f64,
    pub mk_p: f64,
    pub max_autocorrelation: f64,
    pub best_lag: usize,
    pub max_residual_z: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Item {
    pub column: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Rule {
    pub antecedent: Vec<Item>,
    pub consequent: Vec<Item>,
    pub support_a: f64,
    pub support_b: f64,
    pub support_ab: f64,
    pub confidence: f64,
    pub kulc: f64,
    pub ir: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "camelCase")]
pub enum Artifacts {
    Tree(TreeArtifacts),
    UnivariateOutliers(UnivariateArtifacts),
    BivariateOutliers(BivariateArtifacts),
    Clustering(ClusterArtifacts),
    Trend(TrendArtifacts),
    AssociationRules { rules: Vec<Rule> },
}

/// A mining model fitted on one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    action: Arc<GroundAction>,
    kind: ModelKind,
    artifacts: Artifacts,
    appended: Option<Arc<Column>>,
    /// Base columns the model involves, sorted.
    columns: Vec<String>,
}

impl FittedModel {
    pub(crate) fn new(
        action: &GroundAction,
        kind: ModelKind,
        artifacts: Artifacts,
        appended: Option<Column>,
        columns: Vec<String>,
    ) -> Self {
        let mut columns = columns;
        columns.sort();
        columns.dedup();
        FittedModel {
            action: Arc::new(action.clone()),
            kind,
            artifacts,
            appended: appended.map(Arc::new),
            columns,
        }
    }

    pub fn action(&self) -> &GroundAction {
        &self.action
    }

    pub fn canonical_form(&self) -> &str {
        self.action.canonical_form()
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn artifacts(&self) -> &Artifacts {
        &self.artifacts
    }

    pub fn appended_column(&self) -> Option<&Arc<Column>> {
        self.appended.as_ref()
    }

    pub fn involved_columns(&self) -> &[String] {
        &self.columns
    }

    /// The dataset of the model state: `d` plus the appended column, with
    /// the model action recorded in the lineage so replays rebuild it.
    pub fn dataset_after(&self, d: &Dataset) -> Result<Dataset> {
        match &self.appended {
            None => Ok(d.clone()),
            Some(c) => d.appended(c.as_ref().clone(), Some(LineageStep::Apply(self.action.clone()))),
        }
    }
}
