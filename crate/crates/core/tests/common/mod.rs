//! Fixtures and oracles shared by the integration suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use insight_core::actions::{
    apply_data_action, canonical_state_key, enumerate_templates, Action, ActionKind, PreconditionContext, StateKey,
};
use insight_core::interestingness::{intr, simulate_score, IntrConfig};
use insight_core::mining::{fit_with, mine_rules, render_pattern, replay, FittedModel, Item, ModelKind, Pattern, Transactions};
use insight_core::search::{PatternDescriptor, SearchTree};
use insight_core::tabular::{Column, Dataset, Origin};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// 20 rows: `x` holds one value far from the rest, `y` is mild noise.
pub fn outlier_micro_dataset() -> Dataset {
    let base = [
        0.3, -0.5, 0.8, -1.1, 0.2, 0.9, -0.4, 0.6, -0.9, 0.1, 1.2, -0.7, 0.4, -0.2, 0.7, -1.0, 0.5, -0.3, 0.0,
    ];
    let mut x: Vec<Option<f64>> = base.iter().map(|v| Some(*v)).collect();
    x.push(Some(9.0));
    let y: Vec<Option<f64>> = (0..20).map(|i| Some(f64::from((i * 7) % 11) / 4.0)).collect();
    Dataset::new(vec![Column::numerical("x", x), Column::numerical("y", y)]).expect("valid fixture")
}

pub fn planted_outlier() -> PatternDescriptor {
    PatternDescriptor::new(&[ModelKind::UnivariateOutliers], &["x"])
}

/// States reachable from the empty state of `d0` in at most `depth`
/// actions, restricted to data actions plus `model_kinds`.
pub struct Enumeration {
    pub states: usize,
    pub patterns: Vec<Pattern>,
}

pub fn enumerate_states(d0: &Dataset, depth: usize, model_kinds: &[ActionKind], cfg: &IntrConfig) -> Enumeration {
    let root = d0.empty_state();
    let mut seen: BTreeSet<StateKey> = BTreeSet::new();
    seen.insert(canonical_state_key(&root, None));
    let mut patterns = Vec::new();
    let mut queue: VecDeque<(Dataset, Option<FittedModel>, Vec<String>)> = VecDeque::new();
    queue.push_back((root, None, Vec::new()));
    while let Some((d, m, path)) = queue.pop_front() {
        if path.len() == depth {
            continue;
        }
        let mut ctx = PreconditionContext::for_dataset(&d);
        ctx.taken.extend(path.iter().cloned());
        for t in enumerate_templates(&d, m.as_ref()) {
            if t.kind().is_model() && !model_kinds.contains(&t.kind()) {
                continue;
            }
            for a in t.ground_actions(&d, &ctx) {
                let (next, model) = if a.kind().is_model() {
                    let Ok(fitted) = fit_with(&d, &a, cfg) else { continue };
                    let Ok(after) = fitted.dataset_after(&d) else { continue };
                    (after, Some(fitted))
                } else {
                    let Ok(after) = apply_data_action(&d, &a) else { continue };
                    (after, None)
                };
                let key = canonical_state_key(&next, model.as_ref());
                if !seen.insert(key) {
                    continue;
                }
                let mut next_path = path.clone();
                next_path.push(a.canonical_form().to_owned());
                if let Some(fitted) = &model {
                    let score = intr(fitted, cfg);
                    if score > cfg.success_threshold {
                        patterns.push(render_pattern(fitted, score, &next_path));
                    }
                }
                queue.push_back((next, model, next_path));
            }
        }
    }
    Enumeration {
        states: seen.len(),
        patterns,
    }
}

/// A random table of at most 12 rows with 2..=4 categorical columns and
/// occasional nulls.
pub fn random_rule_fixture(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = rng.random_range(1..=12);
    let cols = rng.random_range(2..=4);
    let columns = (0..cols)
        .map(|c| {
            let arity = rng.random_range(1..=3);
            let values: Vec<Option<String>> = (0..rows)
                .map(|_| (!rng.random_bool(0.08)).then(|| format!("v{}", rng.random_range(0..arity))))
                .collect();
            Column::categorical(format!("c{c}"), values)
        })
        .collect();
    Dataset::new(columns).expect("valid fixture")
}

/// A rule as `(antecedent, consequent) -> (kulc, ir)` with items rendered
/// `column=value`.
pub type RuleSet = BTreeMap<(Vec<String>, Vec<String>), (f64, f64)>;

/// Every rule `A ⇒ B` over itemsets with at most one item per column,
/// `|A ∪ B| ≤ max_len`, support of `A ∪ B` at least `min_support` and
/// confidence at least `min_confidence`, by direct row counting.
pub fn brute_force_rules(d: &Dataset, min_support: f64, min_confidence: f64, max_len: usize) -> RuleSet {
    let columns: Vec<(String, Vec<Option<String>>)> = d
        .columns()
        .iter()
        .filter(|c| c.kind().is_qualitative() && c.origin() != Origin::ModelGenerated)
        .map(|c| (c.name().to_owned(), c.labels()))
        .collect();
    let rows = d.row_count();
    let mut items: Vec<(usize, String)> = Vec::new();
    for (ci, (_, labels)) in columns.iter().enumerate() {
        let distinct: BTreeSet<&String> = labels.iter().flatten().collect();
        items.extend(distinct.into_iter().map(|v| (ci, v.clone())));
    }
    let support = |set: &[usize]| -> f64 {
        let hits = (0..rows)
            .filter(|&r| {
                set.iter()
                    .all(|&i| columns[items[i].0].1[r].as_deref() == Some(items[i].1.as_str()))
            })
            .count();
        hits as f64 / rows as f64
    };
    let names = |set: Vec<usize>| -> Vec<String> {
        let mut v: Vec<String> = set.iter().map(|&i| format!("{}={}", columns[items[i].0].0, items[i].1)).collect();
        v.sort();
        v
    };
    let mut out = RuleSet::new();
    for mask in 1u64..(1 << items.len()) {
        let set: Vec<usize> = (0..items.len()).filter(|i| mask & (1 << i) != 0).collect();
        if set.len() < 2 || set.len() > max_len {
            continue;
        }
        let cols: BTreeSet<usize> = set.iter().map(|&i| items[i].0).collect();
        if cols.len() != set.len() || support(&set) < min_support {
            continue;
        }
        for split in 1..(1u64 << set.len()) - 1 {
            let a: Vec<usize> = (0..set.len()).filter(|k| split & (1 << k) != 0).map(|k| set[k]).collect();
            let b: Vec<usize> = (0..set.len()).filter(|k| split & (1 << k) == 0).map(|k| set[k]).collect();
            let (sa, sb, sab) = (support(&a), support(&b), support(&set));
            if sab / sa < min_confidence {
                continue;
            }
            let kulc = 0.5 * (sab / sa + sab / sb);
            let denom = sa + sb - sab;
            let ir = if denom <= 0.0 { 0.0 } else { (sa - sb).abs() / denom };
            out.insert((names(a), names(b)), (kulc, ir));
        }
    }
    out
}

/// The library's mined rules in the same shape as [`brute_force_rules`].
pub fn mined_rules(d: &Dataset, min_support: f64, min_confidence: f64, max_len: usize) -> RuleSet {
    let tx = Transactions::from_dataset(d);
    let render = |items: &[Item]| -> Vec<String> {
        let mut v: Vec<String> = items.iter().map(|i| format!("{}={}", i.column, i.value)).collect();
        v.sort();
        v
    };
    mine_rules(&tx, min_support, min_confidence, max_len)
        .into_iter()
        .map(|r| ((render(&r.antecedent), render(&r.consequent)), (r.kulc, r.ir)))
        .collect()
}

/// Compares two rule sets exactly on keys and to `tol` on measures.
pub fn same_rules(expected: &RuleSet, actual: &RuleSet, tol: f64) -> Result<(), String> {
    let ek: Vec<_> = expected.keys().collect();
    let ak: Vec<_> = actual.keys().collect();
    if ek != ak {
        return Err(format!("rule sets differ: expected {ek:?}, got {ak:?}"));
    }
    for (k, (kulc, ir)) in expected {
        let (k2, i2) = actual[k];
        if (kulc - k2).abs() > tol || (ir - i2).abs() > tol {
            return Err(format!("{k:?}: expected ({kulc}, {ir}), got ({k2}, {i2})"));
        }
    }
    Ok(())
}

/// A small mixed table for search properties: numeric, categorical,
/// boolean and datetime columns with a few nulls.
pub fn random_search_fixture(seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = rng.random_range(12..=30);
    let num = |rng: &mut ChaCha8Rng| -> Vec<Option<f64>> {
        (0..rows)
            .map(|_| (!rng.random_bool(0.05)).then(|| (rng.random::<f64>() * 100.0).round() / 10.0))
            .collect()
    };
    let a = num(&mut rng);
    let b = num(&mut rng);
    let cat: Vec<Option<String>> = (0..rows).map(|_| Some(format!("k{}", rng.random_range(0..3)))).collect();
    let flag: Vec<Option<bool>> = (0..rows).map(|_| Some(rng.random_bool(0.4))).collect();
    let time: Vec<Option<f64>> = (0..rows)
        .map(|r| Some(1_577_836_800.0 + 86_400.0 * r as f64 + rng.random_range(0.0..3600.0f64).round()))
        .collect();
    Dataset::new(vec![
        Column::numerical("a", a),
        Column::numerical("b", b),
        Column::categorical("group", cat),
        Column::boolean("flag", flag),
        Column::datetime("when", time),
    ])
    .expect("valid fixture")
}

fn original_columns(d: &Dataset) -> BTreeSet<String> {
    d.columns()
        .iter()
        .filter(|c| c.origin() == Origin::Original)
        .map(|c| c.name().to_owned())
        .collect()
}

/// Along every edge the selected original columns never shrink (except
/// through groupby) and `where` strictly reduces the row count while other
/// row-preserving actions keep it.
pub fn check_branch_monotonicity(tree: &SearchTree) -> Result<(), String> {
    for (id, node) in tree.nodes().iter().enumerate() {
        for e in &node.edges {
            let child = tree.node(e.child);
            let form = e.action.canonical_form();
            match e.action.action() {
                Action::GroupBy { .. } => continue,
                Action::Where { .. } => {
                    if child.dataset.row_count() >= node.dataset.row_count() {
                        return Err(format!("node {id}: {form} did not remove rows"));
                    }
                }
                _ => {
                    if child.dataset.row_count() != node.dataset.row_count() {
                        return Err(format!("node {id}: {form} changed the row count"));
                    }
                }
            }
            if !original_columns(&node.dataset).is_subset(&original_columns(&child.dataset)) {
                return Err(format!("node {id}: {form} dropped an original column"));
            }
        }
    }
    Ok(())
}

/// Replaying every node's lineage from `d0` reproduces its state key.
pub fn check_replay(d0: &Dataset, tree: &SearchTree, cfg: &IntrConfig) -> Result<(), String> {
    for (id, node) in tree.nodes().iter().enumerate() {
        let lineage = node.dataset.lineage();
        let key = match &node.model {
            None => {
                let d = replay(d0, lineage, cfg).map_err(|e| format!("node {id}: {e}"))?;
                canonical_state_key(&d, None)
            }
            Some(m) => {
                let appended = m.appended_column().is_some();
                let parent_steps = if appended { &lineage[..lineage.len() - 1] } else { lineage };
                let parent = replay(d0, parent_steps, cfg).map_err(|e| format!("node {id}: {e}"))?;
                let refit = fit_with(&parent, m.action(), cfg).map_err(|e| format!("node {id}: {e}"))?;
                let after = refit.dataset_after(&parent).map_err(|e| format!("node {id}: {e}"))?;
                canonical_state_key(&after, Some(&refit))
            }
        };
        if key != node.key {
            return Err(format!("node {id}: replay key differs"));
        }
    }
    Ok(())
}

/// Simulation score of every model-free node is the one recorded; only
/// meaningful without random simulation.
pub fn check_base_scores(tree: &SearchTree, cfg: &IntrConfig) -> Result<(), String> {
    for node in tree.nodes().iter().skip(1).filter(|n| n.model.is_none()) {
        let s = simulate_score(&node.dataset, cfg).map_err(|e| e.to_string())?.total;
        if (s - node.base_score).abs() > 1e-12 {
            return Err(format!("base score {} recorded as {}", s, node.base_score));
        }
    }
    Ok(())
}

/// Inputs for the interestingness invariants: artifacts of every model kind
/// plus small random tables for simulation and live fits.
#[derive(Debug, Clone)]
pub enum IntrFixture {
    Tree(insight_core::mining::TreeArtifacts),
    Univariate(insight_core::mining::UnivariateArtifacts),
    Bivariate(insight_core::mining::BivariateArtifacts),
    Cluster(insight_core::mining::ClusterArtifacts),
    Trend(insight_core::mining::TrendArtifacts),
    Rules(Vec<insight_core::mining::Rule>),
    Table(Dataset),
}

pub mod fuzz {
    use super::IntrFixture;
    use insight_core::mining::{
        BivariateArtifacts, ClusterArtifacts, FlaggedPair, FlaggedValue, Item, Rule, TreeArtifacts, TrendArtifacts,
        UnivariateArtifacts,
    };
    use insight_core::tabular::{Column, Dataset};
    use proptest::prelude::*;

    fn unit() -> impl Strategy<Value = f64> {
        prop_oneof![Just(0.0), Just(1.0), 0.0..=1.0f64]
    }

    fn tree() -> impl Strategy<Value = IntrFixture> {
        (any::<bool>(), -2.0..=1.0f64, unit(), unit()).prop_map(|(classification, score, ent, cover)| {
            IntrFixture::Tree(TreeArtifacts {
                target: "t".into(),
                classification,
                score: if classification { score.abs().min(1.0) } else { score },
                target_entropy: ent,
                coverage: if classification { cover } else { 1.0 },
                class_count: 2,
                top_split: None,
                leaves: 2,
            })
        })
    }

    fn univariate() -> impl Strategy<Value = IntrFixture> {
        (any::<bool>(), prop::collection::vec(0.0..50.0f64, 0..4)).prop_map(|(quantitative, outs)| {
            IntrFixture::Univariate(UnivariateArtifacts {
                column: "c".into(),
                quantitative,
                flagged: outs
                    .into_iter()
                    .enumerate()
                    .map(|(i, o)| FlaggedValue {
                        value: format!("v{i}"),
                        out: if quantitative { o } else { o / 50.0 },
                        rows: 1,
                    })
                    .collect(),
            })
        })
    }

    fn bivariate() -> impl Strategy<Value = IntrFixture> {
        (-1.0..=1.0f64, any::<bool>(), prop::collection::vec((0.0..20.0f64, unit()), 0..4)).prop_map(
            |(correlation, qualitative, pairs)| {
                IntrFixture::Bivariate(BivariateArtifacts {
                    first: "a".into(),
                    second: "b".into(),
                    correlation,
                    qualitative,
                    flagged: pairs
                        .into_iter()
                        .map(|(z, score)| FlaggedPair {
                            first: "x".into(),
                            second: "y".into(),
                            z,
                            score,
                        })
                        .collect(),
                })
            },
        )
    }

    fn cluster() -> impl Strategy<Value = IntrFixture> {
        (-1.0..=1.0f64, prop::option::of(unit()), 2u32..=10).prop_map(|(silhouette, association, k)| {
            IntrFixture::Cluster(ClusterArtifacts {
                k,
                silhouette,
                sizes: vec![1; k as usize],
                association: association.map(|v| ("c".to_owned(), v)),
            })
        })
    }

    fn trend() -> impl Strategy<Value = IntrFixture> {
        (any::<bool>(), any::<bool>(), any::<bool>()).prop_map(|(trend, period, outliers)| {
            IntrFixture::Trend(TrendArtifacts {
                time: "t".into(),
                target: "y".into(),
                trend,
                period,
                outliers,
                mk_s: 0.0,
                mk_p: 1.0,
                max_autocorrelation: 0.0,
                best_lag: 0,
                max_residual_z: 0.0,
            })
        })
    }

    fn rules() -> impl Strategy<Value = IntrFixture> {
        prop::collection::vec((0.01..=1.0f64, 0.01..=1.0f64, unit()), 0..4).prop_map(|sups| {
            IntrFixture::Rules(
                sups.into_iter()
                    .map(|(sa, sb, frac)| {
                        let sab = frac * sa.min(sb);
                        Rule {
                            antecedent: vec![Item {
                                column: "a".into(),
                                value: "x".into(),
                            }],
                            consequent: vec![Item {
                                column: "b".into(),
                                value: "y".into(),
                            }],
                            support_a: sa,
                            support_b: sb,
                            support_ab: sab,
                            confidence: sab / sa,
                            kulc: insight_core::mining::kulczynski(sa, sb, sab),
                            ir: insight_core::mining::imbalance_ratio(sa, sb, sab),
                        }
                    })
                    .collect(),
            )
        })
    }

    fn column(index: usize, rows: usize) -> impl Strategy<Value = Column> {
        let name = format!("c{index}");
        let numeric = prop::collection::vec(prop::option::weighted(0.9, -1e3..1e3f64), rows)
            .prop_map({
                let name = name.clone();
                move |v| Column::numerical(name.clone(), v)
            })
            .boxed();
        let categorical = prop::collection::vec(prop::option::weighted(0.9, "[abc]"), rows)
            .prop_map(move |v| Column::categorical(name.clone(), v))
            .boxed();
        prop_oneof![numeric, categorical]
    }

    fn table() -> impl Strategy<Value = IntrFixture> {
        (1usize..=12, 1usize..=3)
            .prop_flat_map(|(rows, cols)| (0..cols).map(|c| column(c, rows)).collect::<Vec<_>>())
            .prop_map(|columns| IntrFixture::Table(Dataset::new(columns).expect("valid table")))
    }

    pub fn intr_fixture() -> impl Strategy<Value = IntrFixture> {
        prop_oneof![tree(), univariate(), bivariate(), cluster(), trend(), rules(), table()]
    }
}

/// Range, zero, baseline-floor and monotonicity checks for one fixture.
pub fn check_intr_fixture(f: &IntrFixture, cfg: &IntrConfig) -> Result<(), String> {
    use insight_core::actions::GroundAction;
    use insight_core::interestingness::*;
    let in_range = |v: f64, what: &str| {
        if (0.0..=1.0).contains(&v) {
            Ok(())
        } else {
            Err(format!("{what} = {v} outside [0,1]"))
        }
    };
    match f {
        IntrFixture::Tree(t) => {
            let v = intr_tree(t);
            in_range(v, "tree")?;
            if t.target_entropy == 0.0 && v != 0.0 {
                return Err("zero-entropy target scored".into());
            }
            let mut better = t.clone();
            better.score = (t.score + 0.1).min(1.0);
            if intr_tree(&better) < v {
                return Err("tree not monotone in accuracy".into());
            }
        }
        IntrFixture::Univariate(u) => {
            let v = intr_univariate_outliers(u, cfg);
            in_range(v, "univariate")?;
            if u.flagged.is_empty() != (v == 0.0) {
                return Err(format!("univariate zero case broken: {v}"));
            }
            if !u.flagged.is_empty() && v < 0.5 {
                return Err("univariate below the baseline".into());
            }
            if u.quantitative {
                let mut more = u.clone();
                let top = u.flagged.iter().map(|f| f.out).fold(0.0, f64::max);
                more.flagged.push(insight_core::mining::FlaggedValue {
                    value: "extra".into(),
                    out: top + 1.0,
                    rows: 1,
                });
                if intr_univariate_outliers(&more, cfg) < v {
                    return Err("univariate not monotone in max z".into());
                }
            }
        }
        IntrFixture::Bivariate(b) => {
            let v = intr_bivariate_outliers(b, cfg);
            in_range(v, "bivariate")?;
            if (b.correlation.abs() <= cfg.corr_gate || b.flagged.is_empty()) && v != 0.0 {
                return Err("bivariate zero case broken".into());
            }
        }
        IntrFixture::Cluster(c) => {
            let v = intr_clustering(c);
            in_range(v, "clustering")?;
            if c.silhouette == -1.0 && v != 0.0 {
                return Err("silhouette -1 scored".into());
            }
        }
        IntrFixture::Trend(t) => {
            let v = intr_trend(t);
            in_range(v, "trend")?;
            let any = t.trend || t.period || t.outliers;
            if any != (v >= 0.5) || (!any && v != 0.0) {
                return Err(format!("trend floor or zero case broken: {v}"));
            }
            for flip in 0..3 {
                let mut up = t.clone();
                match flip {
                    0 => up.trend = true,
                    1 => up.period = true,
                    _ => up.outliers = true,
                }
                if intr_trend(&up) < v {
                    return Err("trend not monotone in a flag".into());
                }
            }
        }
        IntrFixture::Rules(r) => {
            let v = intr_rules(r);
            in_range(v, "rules")?;
            if r.is_empty() && v != 0.0 {
                return Err("empty rule list scored".into());
            }
        }
        IntrFixture::Table(d) => {
            let s = simulate_score(d, cfg).map_err(|e| e.to_string())?;
            in_range(s.total, "simulation")?;
            for (name, p) in &s.per_column {
                in_range(*p, name)?;
            }
            let mut actions = vec![
                Action::Clustering { k: 2 },
                Action::AssociationRules,
                Action::DecisionTree {
                    target: d.columns()[0].name().to_owned(),
                    max_depth: 2,
                },
            ];
            for c in d.columns() {
                actions.push(Action::UnivariateOutliers {
                    column: c.name().to_owned(),
                });
            }
            for a in actions {
                let g = GroundAction::new(a, d);
                if let Ok(m) = fit_with(d, &g, cfg) {
                    in_range(intr(&m, cfg), g.canonical_form())?;
                }
            }
        }
    }
    Ok(())
}

/// Runs `check_intr_fixture` over `cases` deterministic fuzz cases.
pub fn run_intr_fuzz(cases: u32) -> Result<(), String> {
    use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let cfg = IntrConfig::default();
    runner
        .run(&fuzz::intr_fixture(), |f| check_intr_fixture(&f, &cfg).map_err(TestCaseError::fail))
        .map_err(|e| e.to_string())
}

/// Runs a seeded search and checks branch monotonicity, replay and base
/// scores on the resulting tree.
pub fn check_search_properties(seed: u64, iterations: u64) -> Result<(), String> {
    use insight_core::search::{Preset, Search};
    let d0 = random_search_fixture(seed);
    let preset = Preset::ALL[(seed % 10) as usize];
    let cfg = preset.config(iterations, seed);
    let mut s = Search::new(&d0, cfg.clone()).map_err(|e| e.to_string())?;
    for _ in 0..iterations {
        s.step();
    }
    let tag = |e: String| format!("seed {seed} ({preset}): {e}");
    check_branch_monotonicity(s.tree()).map_err(tag)?;
    check_replay(&d0, s.tree(), &cfg.intr).map_err(tag)?;
    if !cfg.random_simulation {
        check_base_scores(s.tree(), &cfg.intr).map_err(tag)?;
    }
    Ok(())
}
