mod common;

use insight_core::actions::canonical_state_key;
use insight_core::interestingness::IntrConfig;
use insight_core::mining::{imbalance_ratio, kulczynski, MAX_ITEMSET, MIN_CONFIDENCE, MIN_SUPPORT};
use insight_core::search::{run_search, Preset};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn interestingness_invariants_hold(f in common::fuzz::intr_fixture()) {
        let cfg = IntrConfig::default();
        if let Err(why) = common::check_intr_fixture(&f, &cfg) {
            return Err(TestCaseError::fail(why));
        }
    }

    #[test]
    fn rule_measures_stay_in_the_unit_interval(sa in 0.01..=1.0f64, sb in 0.01..=1.0f64, frac in 0.0..=1.0f64) {
        let sab = frac * sa.min(sb);
        let k = kulczynski(sa, sb, sab);
        let ir = imbalance_ratio(sa, sb, sab);
        prop_assert!((0.0..=1.0).contains(&k));
        prop_assert!((0.0..=1.0).contains(&ir));
        prop_assert!((kulczynski(sb, sa, sab) - k).abs() < 1e-12);
        prop_assert!((imbalance_ratio(sb, sa, sab) - ir).abs() < 1e-12);
    }

    #[test]
    fn apriori_agrees_with_brute_force(seed in 0u64..10_000) {
        let d = common::random_rule_fixture(seed);
        let want = common::brute_force_rules(&d, MIN_SUPPORT, MIN_CONFIDENCE, MAX_ITEMSET);
        let got = common::mined_rules(&d, MIN_SUPPORT, MIN_CONFIDENCE, MAX_ITEMSET);
        if let Err(why) = common::same_rules(&want, &got, 1e-12) {
            return Err(TestCaseError::fail(why));
        }
    }

    #[test]
    fn state_keys_ignore_column_order(seed in 0u64..10_000) {
        let d = common::random_search_fixture(seed);
        let mut reversed = d.columns().iter().map(|c| (**c).clone()).collect::<Vec<_>>();
        reversed.reverse();
        let r = insight_core::Dataset::new(reversed).unwrap();
        prop_assert_eq!(canonical_state_key(&d, None), canonical_state_key(&r, None));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn searches_keep_branches_monotone_and_replayable(seed in 0u64..10_000) {
        if let Err(why) = common::check_search_properties(seed, 120) {
            return Err(TestCaseError::fail(why));
        }
    }

    #[test]
    fn shorter_budgets_are_prefixes(seed in 0u64..10_000, cut in 1u64..60) {
        let d = common::random_search_fixture(seed);
        let preset = Preset::ALL[(seed % 10) as usize];
        let long = run_search(&d, &preset.config(60, seed)).unwrap();
        let short = run_search(&d, &preset.config(cut, seed)).unwrap();
        prop_assert_eq!(long.truncated(cut), short);
    }
}
