use criterion::{criterion_group, criterion_main, Criterion};
use insight_bench::{large_table, small_table};
use insight_core::interestingness::{simulate_score, IntrConfig};
use insight_core::mining::{mine_rules, Transactions, MAX_ITEMSET, MIN_CONFIDENCE, MIN_SUPPORT};
use insight_core::{Action, GroundAction};

fn simulation(c: &mut Criterion) {
    let cfg = IntrConfig::default();
    let small = small_table();
    let large = large_table();
    let mut g = c.benchmark_group("simulate_score");
    g.sample_size(10);
    g.bench_function("SD_A", |b| b.iter(|| simulate_score(&small, &cfg).expect("scores")));
    g.bench_function("SD_E", |b| b.iter(|| simulate_score(&large, &cfg).expect("scores")));
    g.finish();
}

fn apriori(c: &mut Criterion) {
    let d = large_table();
    let tx = Transactions::from_dataset(&d);
    let mut g = c.benchmark_group("apriori");
    g.sample_size(10);
    g.bench_function("SD_E", |b| b.iter(|| mine_rules(&tx, MIN_SUPPORT, MIN_CONFIDENCE, MAX_ITEMSET)));
    g.finish();
}

fn fits(c: &mut Criterion) {
    let d = small_table();
    let mut g = c.benchmark_group("fit");
    g.sample_size(10);
    let actions = [
        Action::Clustering { k: 2 },
        Action::DecisionTree {
            target: "rule_1".into(),
            max_depth: 3,
        },
        Action::UnivariateOutliers {
            column: "outlier_1".into(),
        },
    ];
    for a in actions {
        let a = GroundAction::new(a, &d);
        g.bench_function(a.canonical_form().to_owned(), |b| {
            b.iter(|| insight_core::mining::fit(&d, &a).expect("fits"))
        });
    }
    g.finish();
}

criterion_group!(benches, simulation, apriori, fits);
criterion_main!(benches);
