//! Time-series analysis of one quantitative column against a datetime
//! column: Mann-Kendall trend test, autocorrelation periodicity and
//! residual outliers.

use statrs::distribution::{ContinuousCDF, Normal};

use super::model::{Artifacts, FittedModel, ModelKind, TrendArtifacts};
use super::outliers::{least_squares, z_scores};
use crate::actions::GroundAction;
use crate::error::{Error, Result};
use crate::tabular::stats::std_dev;
use crate::tabular::Dataset;

pub const SIGNIFICANCE: f64 = 0.05;
pub const PERIOD_THRESHOLD: f64 = 0.5;
/// Autocorrelation lags searched are `2..=min(n/2, MAX_LAG)`.
pub const MAX_LAG: usize = 1000;
pub const MIN_POINTS: usize = 10;

/// Mann-Kendall S = Σ_{i<j} sign(y_j − y_i), in O(n log n).
pub fn mann_kendall_s(y: &[f64]) -> f64 {
    // Ranks of distinct values for a Fenwick tree of earlier counts.
    let mut distinct: Vec<f64> = y.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let rank = |v: f64| distinct.partition_point(|&x| x < v);
    let mut tree = vec![0i64; distinct.len() + 1];
    let prefix = |tree: &[i64], mut i: usize| {
        let mut s = 0;
        while i > 0 {
            s += tree[i];
            i &= i - 1;
        }
        s
    };
    let mut s: i64 = 0;
    for (j, &v) in y.iter().enumerate() {
        let r = rank(v);
        let less = prefix(&tree, r);
        let less_or_equal = prefix(&tree, r + 1);
        let greater = j as i64 - less_or_equal;
        s += less - greater;
        let mut i = r + 1;
        while i < tree.len() {
            tree[i] += 1;
            i += i & i.wrapping_neg();
        }
    }
    s as f64
}

/// Variance of S under the null hypothesis with tie correction.
pub fn mann_kendall_variance(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let mut sorted = y.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut ties = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        ties += t * (t - 1.0) * (2.0 * t + 5.0);
        i = j;
    }
    (n * (n - 1.0) * (2.0 * n + 5.0) - ties) / 18.0
}

/// Two-sided p-value of the Mann-Kendall test.
pub fn mann_kendall_p(y: &[f64]) -> f64 {
    let s = mann_kendall_s(y);
    let var = mann_kendall_variance(y);
    if var <= 0.0 || s == 0.0 {
        return 1.0;
    }
    let z = (s - s.signum()) / var.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    (2.0 * (1.0 - normal.cdf(z.abs()))).clamp(0.0, 1.0)
}

/// Autocorrelation of `r` at `lag`.
fn autocorrelation(r: &[f64], lag: usize, denom: f64) -> f64 {
    let m = r.iter().sum::<f64>() / r.len() as f64;
    r.iter().zip(&r[lag..]).map(|(a, b)| (a - m) * (b - m)).sum::<f64>() / denom
}

/// Analyzes `target` ordered by `time` over rows where both are present.
pub fn analyze_trend(d: &Dataset, a: &GroundAction, time: &str, target: &str, t_quant: f64) -> Result<FittedModel> {
    let (tc, yc) = (d.column_or_err(time)?, d.column_or_err(target)?);
    let (te, ye) = (tc.encode(), yc.encode());
    let mut points: Vec<(f64, f64)> = te.iter().zip(&ye).filter_map(|(t, y)| Some(((*t)?, (*y)?))).collect();
    if points.len() < MIN_POINTS {
        return Err(Error::Degenerate(format!(
            "{} timestamped values, need {MIN_POINTS}",
            points.len()
        )));
    }
    points.sort_by(|p, q| p.0.total_cmp(&q.0));
    let t0 = points[0].0;
    let t: Vec<f64> = points.iter().map(|p| p.0 - t0).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1).collect();

    let mut artifacts = TrendArtifacts {
        time: time.to_owned(),
        target: target.to_owned(),
        trend: false,
        period: false,
        outliers: false,
        mk_s: 0.0,
        mk_p: 1.0,
        max_autocorrelation: 0.0,
        best_lag: 0,
        max_residual_z: 0.0,
    };
    let scale = std_dev(&y);
    if scale > 0.0 {
        artifacts.mk_s = mann_kendall_s(&y);
        artifacts.mk_p = mann_kendall_p(&y);
        artifacts.trend = artifacts.mk_p < SIGNIFICANCE;

        let (intercept, slope) = least_squares(&t, &y);
        let residuals: Vec<f64> = t.iter().zip(&y).map(|(x, v)| v - (intercept + slope * x)).collect();
        // Residuals at rounding level mean the line explains everything.
        if std_dev(&residuals) > 1e-9 * scale {
            let m = residuals.iter().sum::<f64>() / residuals.len() as f64;
            let denom: f64 = residuals.iter().map(|r| (r - m).powi(2)).sum();
            let max_lag = (residuals.len() / 2).min(MAX_LAG);
            for lag in 2..=max_lag {
                let acf = autocorrelation(&residuals, lag, denom);
                if acf > artifacts.max_autocorrelation {
                    artifacts.max_autocorrelation = acf;
                    artifacts.best_lag = lag;
                }
            }
            artifacts.period = artifacts.max_autocorrelation > PERIOD_THRESHOLD;
            if let Some(z) = z_scores(&residuals) {
                artifacts.max_residual_z = z.iter().copied().fold(0.0, f64::max);
                artifacts.outliers = artifacts.max_residual_z > t_quant;
            }
        }
    }
    let mut involved = tc.sources().to_vec();
    involved.extend(yc.sources().iter().cloned());
    Ok(FittedModel::new(a, ModelKind::Trend, Artifacts::Trend(artifacts), None, involved))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::Action;
    use crate::tabular::time::DAY;
    use crate::tabular::Column;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal as Gaussian};

    fn brute_s(y: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..y.len() {
            for j in i + 1..y.len() {
                s += (y[j] - y[i]).signum() * f64::from(u8::from(y[j] != y[i]));
            }
        }
        s
    }

    fn flags(y: Vec<f64>) -> TrendArtifacts {
        let n = y.len();
        let d = Dataset::new(vec![
            Column::datetime("t", (0..n).map(|i| Some(i as f64 * DAY)).collect()),
            Column::numerical("y", y.into_iter().map(Some).collect()),
        ])
        .unwrap();
        let a = GroundAction::new(
            Action::Trend {
                time: "t".into(),
                target: "y".into(),
            },
            &d,
        );
        match analyze_trend(&d, &a, "t", "y", 2.0).unwrap().artifacts() {
            Artifacts::Trend(t) => t.clone(),
            other => panic!("{other:?}"),
        }
    }

    proptest! {
        #[test]
        fn fenwick_s_matches_pairwise_count(y in prop::collection::vec(-5i32..5, 0..60)) {
            let y: Vec<f64> = y.into_iter().map(f64::from).collect();
            prop_assert_eq!(mann_kendall_s(&y), brute_s(&y));
        }
    }

    #[test]
    fn ramp_trends_without_period() {
        let t = flags((0..50).map(f64::from).collect());
        assert!(t.trend);
        assert!(!t.period);
        assert!(!t.outliers);
        assert_eq!(t.mk_s, 50.0 * 49.0 / 2.0);
    }

    #[test]
    fn sine_is_periodic() {
        let t = flags((0..120).map(|i| (2.0 * std::f64::consts::PI * f64::from(i) / 12.0).sin()).collect());
        assert!(t.period);
        assert_eq!(t.best_lag, 12);
    }

    #[test]
    fn constant_series_has_no_flags() {
        let t = flags(vec![3.0; 30]);
        assert!(!t.trend && !t.period && !t.outliers);
    }

    #[test]
    fn monotone_sequences_always_trend() {
        for n in 10..40 {
            let t = flags((0..n).map(|i| -f64::from(i).powi(3)).collect());
            assert!(t.trend, "n={n}");
        }
    }

    #[test]
    fn noise_rarely_trends() {
        let normal = Gaussian::new(0.0, 1.0).unwrap();
        let hits = (0..100)
            .filter(|&seed| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let y: Vec<f64> = (0..100).map(|_| normal.sample(&mut rng)).collect();
                mann_kendall_p(&y) < SIGNIFICANCE
            })
            .count();
        assert!(hits <= 5, "{hits} false trends");
    }
}
