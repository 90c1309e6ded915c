//! Model actions: fitting mining techniques on a dataset.

mod kmeans;
mod model;
mod outliers;
mod render;
mod rules;
mod trend;
mod tree;

pub use kmeans::{cluster_kmeans, clustering_features, cramers_v, distinct_rows, kmeans, silhouette};
pub use model::{
    Artifacts, BivariateArtifacts, ClusterArtifacts, FittedModel, FlaggedPair, FlaggedValue, Item, ModelKind, Rule,
    TreeArtifacts, TreeSplit, TrendArtifacts, UnivariateArtifacts,
};
pub use outliers::{detect_bivariate_outliers, detect_univariate_outliers, least_squares, z_scores};
pub use render::{best_rule, render_pattern, Pattern};
pub use rules::{
    frequent_itemsets, imbalance_ratio, kulczynski, make_rule, mine_association_rules, mine_rules, Transactions,
    MAX_ITEMSET, MIN_CONFIDENCE, MIN_SUPPORT,
};
pub use trend::{analyze_trend, mann_kendall_p, mann_kendall_s, mann_kendall_variance};
pub use tree::{fit_tree, tree_features, MIN_LEAF};

use crate::actions::{apply_data_action, canonical_state_key, Action, GroundAction};
use crate::error::{Error, Result};
use crate::interestingness::IntrConfig;
use crate::tabular::{Dataset, LineageStep};

/// Seed for stochastic fits, derived from the dataset's content so that
/// refitting the same state gives the same model.
pub fn fit_seed(d: &Dataset) -> u64 {
    let key = canonical_state_key(d, None);
    u64::from_str_radix(&key.as_str()[..16], 16).expect("hex digest")
}

/// Fits the model action `a` on `d` with default thresholds.
pub fn fit(d: &Dataset, a: &GroundAction) -> Result<FittedModel> {
    fit_with(d, a, &IntrConfig::default())
}

pub fn fit_with(d: &Dataset, a: &GroundAction, cfg: &IntrConfig) -> Result<FittedModel> {
    match a.action() {
        Action::DecisionTree { target, max_depth } => fit_tree(d, a, target, *max_depth),
        Action::UnivariateOutliers { column } => detect_univariate_outliers(d, a, column, cfg.t_quant, cfg.t_qual),
        Action::BivariateOutliers { first, second } => detect_bivariate_outliers(d, a, first, second, cfg.t_quant),
        Action::Clustering { k } => cluster_kmeans(d, a, *k, fit_seed(d)),
        Action::Trend { time, target } => analyze_trend(d, a, time, target, cfg.t_quant),
        Action::AssociationRules => mine_association_rules(d, a),
        _ => Err(Error::InvalidArgument(format!("{a} is a data action"))),
    }
}

/// Rebuilds a dataset from the root dataset `d0` by replaying `lineage`
/// from `d0`'s empty state. Model steps refit and re-append their column.
pub fn replay(d0: &Dataset, lineage: &[LineageStep], cfg: &IntrConfig) -> Result<Dataset> {
    let mut d = d0.empty_state();
    for step in lineage {
        let LineageStep::Apply(a) = step else { continue };
        d = if a.kind().is_model() {
            fit_with(&d, a, cfg)?.dataset_after(&d)?
        } else {
            apply_data_action(&d, a)?
        };
    }
    Ok(d)
}
