//! Synthetic benchmark datasets with planted patterns.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::planted::{PlantedKind, PlantedPatternSpec, Relation, TrendShape};
use crate::actions::{Action, GroundAction};
use crate::error::{Error, Result};
use crate::interestingness::{intr, IntrConfig};
use crate::mining::fit_with;
use crate::tabular::{Column, Dataset};

/// 2020-01-01T00:00:00 in epoch seconds.
const EPOCH_2020: f64 = 1_577_836_800.0;
const HOUR: f64 = 3600.0;
const DAY: f64 = 86_400.0;
/// Regeneration attempts before a plant is declared unverifiable.
const MAX_ATTEMPTS: u64 = 64;

/// Unstated strengths of the planted patterns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct GeneratorParams {
    /// Noise std as a fraction of the relation's own std.
    pub correlation_noise: f64,
    /// Magnitude of injected numerical outliers, in standard deviations.
    pub outlier_z: f64,
    /// Frequency of the dominant category of a qualitative outlier column.
    pub dominant_share: f64,
    /// Distance between neighbouring cluster centres, in cluster stds.
    pub cluster_separation: f64,
    /// Share of predicate rows a partial rule overwrites.
    pub partial_compliance: f64,
    /// Noise std of trend columns.
    pub trend_noise: f64,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            correlation_noise: 0.1,
            outlier_z: 6.0,
            dominant_share: 0.95,
            cluster_separation: 10.0,
            partial_compliance: 0.6,
            trend_noise: 0.5,
        }
    }
}

/// Column composition of one scenario-2 dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Shape {
    pub columns: usize,
    pub rows: usize,
    pub random: usize,
    pub correlation: usize,
    pub outliers: usize,
    pub cluster: usize,
    pub cluster_n: usize,
    pub trend: usize,
    pub rules: usize,
    pub partial_rules: usize,
}

impl Shape {
    /// Columns that are not planted: the declared total minus planted ones.
    pub fn filler_columns(&self) -> usize {
        self.columns - (self.correlation + self.outliers + self.cluster + self.trend + self.rules)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scenario2 {
    A,
    B,
    C,
    D,
    E,
}

impl Scenario2 {
    pub const ALL: [Scenario2; 5] = [Scenario2::A, Scenario2::B, Scenario2::C, Scenario2::D, Scenario2::E];

    pub fn shape(self) -> Shape {
        let s = |columns, rows, random, correlation, outliers, cluster, cluster_n, trend, rules, partial_rules| Shape {
            columns,
            rows,
            random,
            correlation,
            outliers,
            cluster,
            cluster_n,
            trend,
            rules,
            partial_rules,
        };
        match self {
            Scenario2::A => s(5, 1000, 1, 1, 1, 1, 2, 0, 1, 0),
            Scenario2::B => s(10, 5000, 4, 2, 2, 1, 3, 1, 0, 1),
            Scenario2::C => s(15, 10000, 8, 1, 2, 1, 5, 1, 1, 2),
            Scenario2::D => s(20, 20000, 10, 2, 3, 2, 5, 1, 2, 2),
            Scenario2::E => s(30, 30000, 14, 4, 4, 2, 6, 2, 4, 3),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scenario2::A => "SD_A",
            Scenario2::B => "SD_B",
            Scenario2::C => "SD_C",
            Scenario2::D => "SD_D",
            Scenario2::E => "SD_E",
        }
    }
}

impl fmt::Display for Scenario2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        let t = t.strip_prefix("SD_").unwrap_or(&t);
        Scenario2::ALL
            .into_iter()
            .find(|w| w.name()[3..] == *t)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown dataset `{s}` (expected A..E)")))
    }
}

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

fn uniforms(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

fn some(xs: Vec<f64>) -> Vec<Option<f64>> {
    xs.into_iter().map(Some).collect()
}

fn std_dev(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

fn sub_dataset(d: &Dataset, names: &[&str]) -> Result<Dataset> {
    let cols = names
        .iter()
        .map(|n| d.column_or_err(n).map(|c| (**c).clone()))
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(cols)
}

fn fitted_intr(d: &Dataset, action: Action, cfg: &IntrConfig) -> f64 {
    let a = GroundAction::new(action, d);
    fit_with(d, &a, cfg).map_or(0.0, |m| intr(&m, cfg))
}

/// Best interestingness of the mining models that reveal `spec` when fit
/// directly on its columns.
pub fn plant_strength(d: &Dataset, spec: &PlantedPatternSpec, cfg: &IntrConfig) -> Result<f64> {
    let cols: Vec<&str> = spec.involved_columns.iter().map(String::as_str).collect();
    let sub = sub_dataset(d, &cols)?;
    let tree = |target: &str| {
        [2, 3]
            .into_iter()
            .map(|max_depth| {
                fitted_intr(
                    &sub,
                    Action::DecisionTree {
                        target: target.to_owned(),
                        max_depth,
                    },
                    cfg,
                )
            })
            .fold(0.0, f64::max)
    };
    let trend = |time: &str, target: &str| {
        fitted_intr(
            &sub,
            Action::Trend {
                time: time.to_owned(),
                target: target.to_owned(),
            },
            cfg,
        )
    };
    Ok(match &spec.kind {
        PlantedKind::Correlation { .. } => tree(cols[1]),
        PlantedKind::OutlierColumn { .. } => fitted_intr(
            &sub,
            Action::UnivariateOutliers {
                column: cols[0].to_owned(),
            },
            cfg,
        ),
        PlantedKind::ClusterColumn { k } => fitted_intr(&sub, Action::Clustering { k: *k as u32 }, cfg),
        PlantedKind::TrendColumn { .. } | PlantedKind::TrendWithOutliers => trend(cols[0], cols[1]),
        PlantedKind::RuleColumn { .. } | PlantedKind::PartialRule { .. } => tree(cols[1]),
    })
}

/// Whether every plant is recoverable by a direct fit scoring above the
/// success threshold.
fn verified(d: &Dataset, specs: &[PlantedPatternSpec]) -> Result<bool> {
    let cfg = IntrConfig::default();
    // Partial rules are weak by design and exempt from the check.
    for s in specs.iter().filter(|s| !matches!(s.kind, PlantedKind::PartialRule { .. })) {
        if plant_strength(d, s, &cfg)? <= cfg.success_threshold {
            return Ok(false);
        }
    }
    Ok(true)
}

fn attempt_seed(seed: u64, attempt: u64) -> u64 {
    seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// A 1000-row dataset with a skewed datetime column `timestamp`, a
/// `signal` rising with time and carrying 5 injected outliers, and
/// `(i+1)·2` standard-normal noise columns.
pub fn generate_scenario1(i: usize, seed: u64) -> Result<(Dataset, PlantedPatternSpec)> {
    if !(1..=10).contains(&i) {
        return Err(Error::InvalidArgument(format!("scenario-1 index {i} outside 1..=10")));
    }
    for attempt in 0..MAX_ATTEMPTS {
        let (d, spec) = scenario1_once(i, attempt_seed(seed, attempt))?;
        if verified(&d, std::slice::from_ref(&spec))? {
            return Ok((d, spec));
        }
    }
    Err(Error::Degenerate(format!("scenario-1 plant unverifiable for seed {seed}")))
}

fn scenario1_once(i: usize, seed: u64) -> Result<(Dataset, PlantedPatternSpec)> {
    const ROWS: usize = 1000;
    const NOISE: f64 = 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Exponentially spaced over one year: most timestamps sit early.
    let growth = 5.0f64;
    let frac: Vec<f64> = (0..ROWS)
        .map(|r| ((growth * r as f64 / (ROWS - 1) as f64).exp() - 1.0) / (growth.exp() - 1.0))
        .collect();
    let time: Vec<f64> = frac.iter().map(|f| (EPOCH_2020 + f * 365.0 * DAY).round()).collect();
    let mut signal: Vec<f64> = frac
        .iter()
        .map(|f| 10.0 * f + NOISE * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mut rows: Vec<usize> = (1..ROWS - 1).collect();
    rows.shuffle(&mut rng);
    for &r in &rows[..5] {
        let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
        signal[r] += sign * 8.0 * NOISE;
    }
    let mut columns = vec![
        Column::datetime("timestamp", some(time)),
        Column::numerical("signal", some(signal)),
    ];
    for k in 1..=(i + 1) * 2 {
        columns.push(Column::numerical(format!("noise_{k}"), some(normals(&mut rng, ROWS))));
    }
    let spec = PlantedPatternSpec::new("trend with outliers", PlantedKind::TrendWithOutliers, &["timestamp", "signal"]);
    Ok((Dataset::new(columns)?, spec))
}

/// A dataset with the declared shape of `which` and one spec per planted
/// pattern, in planting order.
pub fn generate_scenario2(which: Scenario2, seed: u64) -> Result<(Dataset, Vec<PlantedPatternSpec>)> {
    generate_scenario2_with(which, seed, &GeneratorParams::default())
}

pub fn generate_scenario2_with(
    which: Scenario2,
    seed: u64,
    params: &GeneratorParams,
) -> Result<(Dataset, Vec<PlantedPatternSpec>)> {
    for attempt in 0..MAX_ATTEMPTS {
        let (d, specs) = scenario2_once(which.shape(), attempt_seed(seed, attempt), params)?;
        if verified(&d, &specs)? {
            return Ok((d, specs));
        }
    }
    Err(Error::Degenerate(format!("{which} plants unverifiable for seed {seed}")))
}

#[derive(Clone, Copy, PartialEq)]
enum RandomKind {
    Uniform,
    Normal,
    Categorical,
}

const CATEGORIES: [&str; 3] = ["Category_A", "Category_B", "Category_C"];
const RULE_THRESHOLDS: [f64; 4] = [0.7, 0.5, 0.3, 0.6];

fn scenario2_once(shape: Shape, seed: u64, params: &GeneratorParams) -> Result<(Dataset, Vec<PlantedPatternSpec>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = shape.rows;
    let mut columns: Vec<Column> = Vec::new();
    let mut specs = Vec::new();

    // Filler columns; the first is the reference datetime when trends are
    // planted, the rest cycle through uniform, normal and categorical.
    let mut uniform_cols: Vec<(String, Vec<f64>)> = Vec::new();
    let mut categorical_cols: Vec<usize> = Vec::new();
    let mut filler = shape.filler_columns();
    if shape.trend > 0 {
        let time: Vec<f64> = (0..n).map(|r| EPOCH_2020 + r as f64 * HOUR).collect();
        columns.push(Column::datetime("timestamp", some(time)));
        filler -= 1;
    }
    let kinds = [RandomKind::Uniform, RandomKind::Normal, RandomKind::Categorical];
    for k in 0..filler {
        let name = format!("random_{}", k + 1);
        match kinds[k % kinds.len()] {
            RandomKind::Uniform => {
                let xs = uniforms(&mut rng, n);
                uniform_cols.push((name.clone(), xs.clone()));
                columns.push(Column::numerical(name, some(xs)));
            }
            RandomKind::Normal => columns.push(Column::numerical(name, some(normals(&mut rng, n)))),
            RandomKind::Categorical => {
                let labels: Vec<Option<&str>> = (0..n).map(|_| Some(CATEGORIES[rng.random_range(0..3)])).collect();
                categorical_cols.push(columns.len());
                columns.push(Column::categorical(name, labels));
            }
        }
    }

    let relations = [Relation::Linear, Relation::Log, Relation::Exp];
    for k in 0..shape.correlation {
        let (src, x) = &uniform_cols[k % uniform_cols.len()];
        let relation = relations[k % relations.len()];
        let clean: Vec<f64> = x
            .iter()
            .map(|&v| match relation {
                Relation::Linear => 2.0 * v + 1.0,
                Relation::Log => (v + 0.1).ln(),
                Relation::Exp => (2.0 * v).exp(),
            })
            .collect();
        let scale = params.correlation_noise * std_dev(&clean);
        let y: Vec<f64> = clean
            .iter()
            .map(|c| c + scale * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let name = format!("correlated_{}", k + 1);
        columns.push(Column::numerical(name.clone(), some(y)));
        specs.push(PlantedPatternSpec::new(
            &format!("{relation} correlation {src} ~ {name}"),
            PlantedKind::Correlation {
                relation,
                noise: params.correlation_noise,
            },
            &[src, &name],
        ));
    }

    for k in 0..shape.outliers {
        let name = format!("outlier_{}", k + 1);
        let quantitative = k % 2 == 0;
        if quantitative {
            let mut xs = normals(&mut rng, n);
            let mut rows: Vec<usize> = (0..n).collect();
            rows.shuffle(&mut rng);
            for &r in &rows[..5] {
                xs[r] = if rng.random::<bool>() { params.outlier_z } else { -params.outlier_z };
            }
            columns.push(Column::numerical(name.clone(), some(xs)));
        } else {
            let labels: Vec<Option<String>> = (0..n)
                .map(|_| {
                    Some(if rng.random::<f64>() < params.dominant_share {
                        "common".to_owned()
                    } else {
                        format!("rare_{}", rng.random_range(1..=5))
                    })
                })
                .collect();
            columns.push(Column::categorical(name.clone(), labels));
        }
        specs.push(PlantedPatternSpec::new(
            &format!("outliers in {name}"),
            PlantedKind::OutlierColumn { quantitative },
            &[&name],
        ));
    }

    for k in 0..shape.cluster {
        let name = format!("cluster_{}", k + 1);
        let xs: Vec<f64> = (0..n)
            .map(|r| (r % shape.cluster_n) as f64 * params.cluster_separation + rng.sample::<f64, _>(StandardNormal))
            .collect();
        columns.push(Column::numerical(name.clone(), some(xs)));
        specs.push(PlantedPatternSpec::new(
            &format!("{} clusters in {name}", shape.cluster_n),
            PlantedKind::ClusterColumn { k: shape.cluster_n },
            &[&name],
        ));
    }

    let shapes = [TrendShape::Increasing, TrendShape::Decreasing, TrendShape::Periodic];
    for k in 0..shape.trend {
        let name = format!("trend_{}", k + 1);
        let trend = shapes[k % shapes.len()];
        let ys: Vec<f64> = (0..n)
            .map(|r| {
                let t = r as f64 / n as f64;
                let clean = match trend {
                    TrendShape::Increasing => 3.0 * t,
                    TrendShape::Decreasing => -3.0 * t,
                    TrendShape::Periodic => 2.0 * (std::f64::consts::TAU * r as f64 / 24.0).sin(),
                };
                clean + params.trend_noise * rng.sample::<f64, _>(StandardNormal)
            })
            .collect();
        columns.push(Column::numerical(name.clone(), some(ys)));
        specs.push(PlantedPatternSpec::new(
            &format!("{trend} trend in {name}"),
            PlantedKind::TrendColumn { shape: trend },
            &["timestamp", &name],
        ));
    }

    for k in 0..shape.rules {
        let (feature, x) = &uniform_cols[k % uniform_cols.len()];
        let threshold = RULE_THRESHOLDS[k % RULE_THRESHOLDS.len()];
        let name = format!("rule_{}", k + 1);
        let labels: Vec<Option<&str>> = x
            .iter()
            .map(|&v| Some(if v > threshold { CATEGORIES[0] } else { CATEGORIES[1] }))
            .collect();
        columns.push(Column::categorical(name.clone(), labels));
        specs.push(PlantedPatternSpec::new(
            &format!("{feature} > {threshold} -> {} in {name}", CATEGORIES[0]),
            PlantedKind::RuleColumn {
                threshold,
                category: CATEGORIES[0].to_owned(),
            },
            &[feature, &name],
        ));
    }

    for k in 0..shape.partial_rules {
        if categorical_cols.is_empty() || uniform_cols.is_empty() {
            return Err(Error::InvalidArgument("partial rules need random categorical and uniform columns".into()));
        }
        let target = categorical_cols[k % categorical_cols.len()];
        let (feature, x) = &uniform_cols[k % uniform_cols.len()];
        let threshold = RULE_THRESHOLDS[k % RULE_THRESHOLDS.len()];
        let labels: Vec<Option<String>> = columns[target]
            .labels()
            .into_iter()
            .zip(x)
            .map(|(label, &v)| {
                if v > threshold && rng.random::<f64>() < params.partial_compliance {
                    Some(CATEGORIES[0].to_owned())
                } else {
                    label
                }
            })
            .collect();
        let name = columns[target].name().to_owned();
        columns[target] = Column::categorical(name.clone(), labels);
        specs.push(PlantedPatternSpec::new(
            &format!("partial {feature} > {threshold} -> {} in {name}", CATEGORIES[0]),
            PlantedKind::PartialRule {
                threshold,
                category: CATEGORIES[0].to_owned(),
                compliance: params.partial_compliance,
            },
            &[feature, &name],
        ));
    }

    debug_assert_eq!(columns.len(), shape.columns);
    Ok((Dataset::new(columns)?, specs))
}
