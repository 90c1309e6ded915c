//! Interestingness of fitted models and the base score of model-less
//! states. Every score lies in [0,1].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mining::{
    Artifacts, BivariateArtifacts, ClusterArtifacts, FittedModel, Rule, TreeArtifacts, TrendArtifacts,
    UnivariateArtifacts,
};
use crate::tabular::{column_stats, pearson_matrix, Column, ColumnStats, Dataset};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct IntrConfig {
    /// Mode frequency above which other qualitative values are outliers.
    pub t_qual: f64,
    /// z-score above which a quantitative value is an outlier.
    pub t_quant: f64,
    /// |Pearson| above which a column pair counts as correlated.
    pub corr_gate: f64,
    /// Mode frequency above which a qualitative column is peculiar.
    pub mode_gate: f64,
    /// Patterns scoring strictly above this are reported.
    pub success_threshold: f64,
}

impl Default for IntrConfig {
    fn default() -> Self {
        IntrConfig {
            t_qual: 0.85,
            t_quant: 2.0,
            corr_gate: 0.8,
            mode_gate: 0.9,
            success_threshold: 0.5,
        }
    }
}

impl IntrConfig {
    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!("{what} out of range")))
            }
        };
        check(self.t_qual > 0.0 && self.t_qual < 1.0, "tQual")?;
        check(self.t_quant > 0.0 && self.t_quant.is_finite(), "tQuant")?;
        check((0.0..=1.0).contains(&self.corr_gate), "corrGate")?;
        check((0.0..=1.0).contains(&self.mode_gate), "modeGate")?;
        check(self.success_threshold > 0.0 && self.success_threshold < 1.0, "successThreshold")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SimulationScore {
    pub per_column: Vec<(String, f64)>,
    pub correlated_pair_fraction: f64,
    pub total: f64,
}

/// Maps [0, ∞] monotonically onto [0, 1].
pub fn squash(x: f64) -> f64 {
    if x.is_infinite() {
        1.0
    } else {
        x / (1.0 + x)
    }
}

/// How unusual a single column's distribution is. All-null columns score 0.
pub fn column_peculiarity(c: &Column, cfg: &IntrConfig) -> f64 {
    match column_stats(c) {
        Err(_) => 0.0,
        Ok(ColumnStats::Quantitative {
            skewness,
            excess_kurtosis,
            iqr_to_mean_ratio,
            ..
        }) => {
            (squash(skewness.abs()) + squash(excess_kurtosis.max(0.0)) + squash(iqr_to_mean_ratio.abs())) / 3.0
        }
        Ok(ColumnStats::Qualitative { mode_frequency, .. }) => {
            let dominant = if mode_frequency > cfg.mode_gate { 1.0 } else { 0.0 };
            let even = crate::tabular::normalized_entropy(c).unwrap_or(0.0);
            f64::max(dominant, even)
        }
    }
}

/// Base score of a dataset: half the mean column peculiarity plus half the
/// fraction of valid column pairs whose |correlation| exceeds the gate.
pub fn simulate_score(d: &Dataset, cfg: &IntrConfig) -> Result<SimulationScore> {
    if d.is_empty() {
        return Err(Error::InvalidArgument("simulation of an empty dataset".into()));
    }
    let per_column: Vec<(String, f64)> = d
        .columns()
        .iter()
        .map(|c| (c.name().to_owned(), column_peculiarity(c, cfg)))
        .collect();
    let mean = per_column.iter().map(|p| p.1).sum::<f64>() / per_column.len() as f64;
    let pairs = pearson_matrix(d).valid_pairs();
    let correlated_pair_fraction = if pairs.is_empty() {
        0.0
    } else {
        pairs.iter().filter(|p| p.2.abs() > cfg.corr_gate).count() as f64 / pairs.len() as f64
    };
    Ok(SimulationScore {
        per_column,
        correlated_pair_fraction,
        total: (0.5 * mean + 0.5 * correlated_pair_fraction).clamp(0.0, 1.0),
    })
}

/// `acc · ent · cover`, with regression R² floored at 0.
pub fn intr_tree(t: &TreeArtifacts) -> f64 {
    let acc = if t.classification { t.score } else { t.score.max(0.0) };
    (acc * t.target_entropy * t.coverage).clamp(0.0, 1.0)
}

/// 0 without outliers, else `0.5 + max outlier(v) / 2`.
pub fn intr_univariate_outliers(u: &UnivariateArtifacts, cfg: &IntrConfig) -> f64 {
    u.flagged
        .iter()
        .map(|f| {
            let score = if u.quantitative {
                1.0 - cfg.t_quant / f.out
            } else {
                1.0 - f.out / (1.0 - cfg.t_qual)
            };
            score.clamp(0.0, 1.0)
        })
        .fold(None, |best: Option<f64>, s| Some(best.map_or(s, |b| b.max(s))))
        .map_or(0.0, |best| 0.5 + best / 2.0)
}

/// Maximum flagged-pair score, or 0 when the pair fails the correlation gate.
pub fn intr_bivariate_outliers(b: &BivariateArtifacts, cfg: &IntrConfig) -> f64 {
    if b.correlation.abs() <= cfg.corr_gate {
        return 0.0;
    }
    b.flagged.iter().map(|f| f.score).fold(0.0, f64::max).clamp(0.0, 1.0)
}

/// `(1 + silhouette) / 2 · max association`; the association factor is 1
/// when the dataset has no categorical column.
pub fn intr_clustering(c: &ClusterArtifacts) -> f64 {
    let association = c.association.as_ref().map_or(1.0, |(_, v)| *v);
    ((1.0 + c.silhouette) / 2.0 * association).clamp(0.0, 1.0)
}

/// 0 without any flag, else `0.5 + (trend + period + outliers) / 6`.
pub fn intr_trend(t: &TrendArtifacts) -> f64 {
    let flags = [t.trend, t.period, t.outliers].iter().filter(|&&f| f).count();
    if flags == 0 {
        0.0
    } else {
        0.5 + flags as f64 / 6.0
    }
}

/// `max kulc · (1 − ir)` over the rules; 0 without rules.
pub fn intr_rules(rules: &[Rule]) -> f64 {
    rules
        .iter()
        .map(|r| r.kulc * (1.0 - r.ir))
        .fold(0.0, f64::max)
        .clamp(0.0, 1.0)
}

pub fn intr(m: &FittedModel, cfg: &IntrConfig) -> f64 {
    match m.artifacts() {
        Artifacts::Tree(t) => intr_tree(t),
        Artifacts::UnivariateOutliers(u) => intr_univariate_outliers(u, cfg),
        Artifacts::BivariateOutliers(b) => intr_bivariate_outliers(b, cfg),
        Artifacts::Clustering(c) => intr_clustering(c),
        Artifacts::Trend(t) => intr_trend(t),
        Artifacts::AssociationRules { rules } => intr_rules(rules),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mining::FlaggedValue;

    #[test]
    fn constant_qualitative_column_scores_half() {
        let d = Dataset::new(vec![Column::categorical("c", vec![Some("a"); 6])]).unwrap();
        let s = simulate_score(&d, &IntrConfig::default()).unwrap();
        assert_eq!(s.per_column[0].1, 1.0);
        assert_eq!(s.correlated_pair_fraction, 0.0);
        assert_eq!(s.total, 0.5);
    }

    #[test]
    fn linear_pair_is_fully_correlated() {
        let x: Vec<Option<f64>> = (0..11).map(|i| Some(f64::from(i))).collect();
        let y: Vec<Option<f64>> = (0..11).map(|i| Some(3.0 * f64::from(i) + 1.0)).collect();
        let d = Dataset::new(vec![Column::numerical("x", x), Column::numerical("y", y)]).unwrap();
        let s = simulate_score(&d, &IntrConfig::default()).unwrap();
        assert_eq!(s.correlated_pair_fraction, 1.0);
        assert!(s.total >= 0.5);
    }

    #[test]
    fn uniform_categories_have_full_entropy_term() {
        let c = Column::categorical("c", vec![Some("a"), Some("b"), Some("a"), Some("b")]);
        assert_eq!(column_peculiarity(&c, &IntrConfig::default()), 1.0);
    }

    #[test]
    fn empty_dataset_cannot_be_simulated() {
        assert!(simulate_score(&crate::tabular::student_table().empty_state(), &IntrConfig::default()).is_err());
    }

    #[test]
    fn qualitative_outlier_formula() {
        let u = UnivariateArtifacts {
            column: "c".into(),
            quantitative: false,
            flagged: vec![FlaggedValue {
                value: "x".into(),
                out: 0.05,
                rows: 1,
            }],
        };
        let expected = 0.5 + (1.0 - 0.05 / 0.15) / 2.0;
        assert!((intr_univariate_outliers(&u, &IntrConfig::default()) - expected).abs() < 1e-12);
    }

    #[test]
    fn defaults_validate() {
        assert!(IntrConfig::default().validate().is_ok());
        let bad = IntrConfig {
            success_threshold: 1.5,
            ..IntrConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
