//! Planted pattern descriptions and the matchers that recognize them.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::mining::{ModelKind, Pattern};
use crate::search::PatternDescriptor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Relation {
    Linear,
    Log,
    Exp,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Linear => "linear",
            Relation::Log => "log",
            Relation::Exp => "exp",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum TrendShape {
    Increasing,
    Decreasing,
    Periodic,
}

impl fmt::Display for TrendShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrendShape::Increasing => "increasing",
            TrendShape::Decreasing => "decreasing",
            TrendShape::Periodic => "periodic",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "type")]
pub enum PlantedKind {
    #[serde(rename_all = "camelCase")]
    Correlation { relation: Relation, noise: f64 },
    #[serde(rename_all = "camelCase")]
    OutlierColumn { quantitative: bool },
    #[serde(rename_all = "camelCase")]
    ClusterColumn { k: usize },
    #[serde(rename_all = "camelCase")]
    TrendColumn { shape: TrendShape },
    /// A rising series over a datetime with injected outliers.
    TrendWithOutliers,
    #[serde(rename_all = "camelCase")]
    RuleColumn { threshold: f64, category: String },
    #[serde(rename_all = "camelCase")]
    PartialRule {
        threshold: f64,
        category: String,
        compliance: f64,
    },
}

/// A pattern planted in a synthetic dataset. The involved columns list the
/// driver first; a pattern matches if any matcher accepts it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PlantedPatternSpec {
    pub name: String,
    pub kind: PlantedKind,
    pub involved_columns: Vec<String>,
    pub matchers: Vec<PatternDescriptor>,
}

impl PlantedPatternSpec {
    pub fn new(name: &str, kind: PlantedKind, involved: &[&str]) -> Self {
        use ModelKind as K;
        let linking = [K::DecisionTree, K::RegressionTree, K::BivariateOutliers, K::AssociationRules];
        let matchers = match &kind {
            PlantedKind::Correlation { .. } => vec![PatternDescriptor::new(&linking, involved)],
            PlantedKind::OutlierColumn { .. } => vec![PatternDescriptor::new(&[K::UnivariateOutliers], involved)],
            PlantedKind::ClusterColumn { .. } => vec![PatternDescriptor::new(&[K::Clustering], involved)],
            PlantedKind::TrendColumn { shape } => {
                let tag = if *shape == TrendShape::Periodic { "period" } else { "trend" };
                vec![PatternDescriptor::new(&[K::Trend], involved).with_tags(&[tag])]
            }
            PlantedKind::TrendWithOutliers => vec![
                PatternDescriptor::new(&[K::Trend], involved).with_tags(&["trend", "outliers"]),
                PatternDescriptor::new(&linking, involved),
            ],
            PlantedKind::RuleColumn { .. } | PlantedKind::PartialRule { .. } => vec![PatternDescriptor::new(
                &[K::DecisionTree, K::AssociationRules],
                involved,
            )],
        };
        PlantedPatternSpec {
            name: name.to_owned(),
            kind,
            involved_columns: involved.iter().map(|c| (*c).to_owned()).collect(),
            matchers,
        }
    }

    pub fn matches(&self, p: &Pattern) -> bool {
        self.matchers.iter().any(|m| m.matches(p))
    }
}
