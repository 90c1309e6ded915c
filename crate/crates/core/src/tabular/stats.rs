//! Descriptive statistics over columns. Moments use population definitions.

use serde::{Deserialize, Serialize};

use super::column::{Column, ColumnType, Value};
use super::dataset::Dataset;
use crate::error::{Error, Result};

pub const HISTOGRAM_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "camelCase")]
pub enum ColumnStats {
    #[serde(rename_all = "camelCase")]
    Quantitative {
        entropy: f64,
        skewness: f64,
        excess_kurtosis: f64,
        iqr_to_mean_ratio: f64,
    },
    #[serde(rename_all = "camelCase")]
    Qualitative {
        entropy: f64,
        unique_count: usize,
        mode_value: Value,
        mode_frequency: f64,
    },
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64
}

pub fn std_dev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

/// Central moments m2, m3, m4.
fn central_moments(xs: &[f64]) -> (f64, f64, f64) {
    let m = mean(xs);
    let n = xs.len() as f64;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - m;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    (m2 / n, m3 / n, m4 / n)
}

/// Skewness m3/m2^1.5; 0 for a constant sample.
pub fn skewness(xs: &[f64]) -> f64 {
    let (m2, m3, _) = central_moments(xs);
    if m2 <= 0.0 || !is_spread(xs) {
        0.0
    } else {
        m3 / m2.powf(1.5)
    }
}

/// Excess kurtosis m4/m2² − 3; 0 for a constant sample.
pub fn excess_kurtosis(xs: &[f64]) -> f64 {
    let (m2, _, m4) = central_moments(xs);
    if m2 <= 0.0 || !is_spread(xs) {
        0.0
    } else {
        m4 / (m2 * m2) - 3.0
    }
}

fn is_spread(xs: &[f64]) -> bool {
    xs.iter().any(|&x| x != xs[0])
}

/// Linear-interpolated quantile of a sorted sample (`q` in [0,1]).
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Shannon entropy (bits) of a frequency table.
pub fn entropy_of_counts(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum()
}

/// Entropy divided by log2(k) for k occupied categories; 0 when k ≤ 1.
pub fn normalized_entropy_of_counts(counts: &[usize]) -> f64 {
    let k = counts.iter().filter(|&&c| c > 0).count();
    if k <= 1 {
        0.0
    } else {
        (entropy_of_counts(counts) / (k as f64).log2()).clamp(0.0, 1.0)
    }
}

/// Assigns each value to one of `bins` equal-width bins over [min, max].
pub fn equal_width_bin(x: f64, min: f64, max: f64, bins: usize) -> usize {
    if max <= min {
        return 0;
    }
    (((x - min) / (max - min) * bins as f64).floor() as usize).min(bins - 1)
}

pub fn histogram(xs: &[f64], bins: usize) -> Vec<usize> {
    let mut counts = vec![0; bins];
    if xs.is_empty() {
        return counts;
    }
    let (min, max) = min_max(xs);
    for &x in xs {
        counts[equal_width_bin(x, min, max, bins)] += 1;
    }
    counts
}

pub fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)))
}

pub fn column_stats(c: &Column) -> Result<ColumnStats> {
    if c.non_null_count() == 0 {
        return Err(Error::AllNull(c.name().to_owned()));
    }
    if c.kind().is_quantitative() {
        let mut xs = c.numbers();
        // Datetimes have no natural zero, so the ratio is taken over
        // offsets from the earliest instant.
        if c.kind() == ColumnType::Datetime {
            let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
            xs.iter_mut().for_each(|x| *x -= min);
        }
        let s = sorted(&xs);
        let iqr = quantile_sorted(&s, 0.75) - quantile_sorted(&s, 0.25);
        let m = mean(&xs).abs();
        let iqr_to_mean_ratio = if iqr == 0.0 {
            0.0
        } else if m == 0.0 {
            f64::INFINITY
        } else {
            iqr / m
        };
        Ok(ColumnStats::Quantitative {
            entropy: entropy_of_counts(&histogram(&xs, HISTOGRAM_BINS)),
            skewness: skewness(&xs),
            excess_kurtosis: excess_kurtosis(&xs),
            iqr_to_mean_ratio,
        })
    } else {
        let counts = c.value_counts();
        let total: usize = counts.iter().map(|(_, n)| n).sum();
        let (mode_value, mode_count) = counts
            .iter()
            .fold(None::<&(Value, usize)>, |best, cur| match best {
                Some(b) if b.1 >= cur.1 => Some(b),
                _ => Some(cur),
            })
            .cloned()
            .expect("non-empty");
        let freqs: Vec<usize> = counts.iter().map(|(_, n)| *n).collect();
        Ok(ColumnStats::Qualitative {
            entropy: entropy_of_counts(&freqs),
            unique_count: counts.len(),
            mode_value,
            mode_frequency: mode_count as f64 / total as f64,
        })
    }
}

/// Normalized Shannon entropy over the column's distinct values.
pub fn normalized_entropy(c: &Column) -> Result<f64> {
    if c.non_null_count() == 0 {
        return Err(Error::AllNull(c.name().to_owned()));
    }
    let counts: Vec<usize> = c.value_counts().into_iter().map(|(_, n)| n).collect();
    Ok(normalized_entropy_of_counts(&counts))
}

/// Pearson correlation over rows where both cells are present. `None`
/// for fewer than 3 joint observations or zero variance.
pub fn pearson(x: &[Option<f64>], y: &[Option<f64>]) -> Option<f64> {
    let pairs: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .collect();
    if pairs.len() < 3 {
        return None;
    }
    let n = pairs.len() as f64;
    let mx = pairs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pairs.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in &pairs {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 || pairs.iter().all(|p| p.0 == pairs[0].0) || pairs.iter().all(|p| p.1 == pairs[0].1) {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    names: Vec<String>,
    values: Vec<f64>,
    valid: Vec<bool>,
}

impl CorrelationMatrix {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// The coefficient, or `None` where the pair is masked invalid.
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let k = i * self.names.len() + j;
        self.valid[k].then(|| self.values[k])
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn between(&self, a: &str, b: &str) -> Option<f64> {
        self.get(self.index_of(a)?, self.index_of(b)?)
    }

    /// Valid off-diagonal coefficients, one per unordered pair.
    pub fn valid_pairs(&self) -> Vec<(usize, usize, f64)> {
        let n = self.names.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .filter_map(|(i, j)| self.get(i, j).map(|r| (i, j, r)))
            .collect()
    }
}

pub fn pearson_matrix(d: &Dataset) -> CorrelationMatrix {
    let encoded: Vec<Vec<Option<f64>>> = d.columns().iter().map(|c| c.encode()).collect();
    let n = encoded.len();
    let mut values = vec![0.0; n * n];
    let mut valid = vec![false; n * n];
    let enough_rows = d.row_count() >= 3;
    for i in 0..n {
        for j in i..n {
            let r = if enough_rows { pearson(&encoded[i], &encoded[j]) } else { None };
            if let Some(r) = r {
                let r = if i == j { 1.0 } else { r };
                values[i * n + j] = r;
                values[j * n + i] = r;
                valid[i * n + j] = true;
                valid[j * n + i] = true;
            }
        }
    }
    CorrelationMatrix {
        names: d.columns().iter().map(|c| c.name().to_owned()).collect(),
        values,
        valid,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn num(xs: &[f64]) -> Column {
        Column::numerical("x", xs.iter().copied().map(Some).collect())
    }

    // Direct formula evaluation, kept separate from the moment accumulator.
    fn reference_skew(xs: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
        let m3 = xs.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
        m3 / m2.powf(1.5)
    }

    #[test]
    fn datetime_ratio_ignores_the_epoch() {
        let offsets = [0.0, 10.0, 20.0, 30.0, 100.0];
        let at = |origin: f64| {
            let c = Column::datetime("t", offsets.iter().map(|o| Some(origin + o)).collect());
            match column_stats(&c).unwrap() {
                ColumnStats::Quantitative { iqr_to_mean_ratio, .. } => iqr_to_mean_ratio,
                other => panic!("{other:?}"),
            }
        };
        assert_abs_diff_eq!(at(0.0), 20.0 / 32.0, epsilon = 1e-12);
        assert_abs_diff_eq!(at(1.6e9), at(0.0), epsilon = 1e-12);
    }

    #[test]
    fn categorical_mode_and_uniques() {
        let c = Column::categorical("c", vec![Some("A"), Some("A"), Some("A"), Some("B")]);
        match column_stats(&c).unwrap() {
            ColumnStats::Qualitative {
                unique_count,
                mode_value,
                mode_frequency,
                ..
            } => {
                assert_eq!(unique_count, 2);
                assert_eq!(mode_value, Value::Text("A".into()));
                assert_eq!(mode_frequency, 0.75);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn symmetric_column_has_zero_skew() {
        match column_stats(&num(&[1.0, 2.0, 3.0, 4.0, 5.0])).unwrap() {
            ColumnStats::Quantitative { skewness, .. } => assert_abs_diff_eq!(skewness, 0.0, epsilon = 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn long_right_tail_skew_matches_hand_moments() {
        // mean 20.8, m2 = 1568.16, m3 = 93148.704 → m3/m2^1.5 = 1.5
        let xs = [1.0, 1.0, 1.0, 1.0, 100.0];
        assert_abs_diff_eq!(reference_skew(&xs), 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(skewness(&xs), 1.5, epsilon = 1e-12);
    }

    #[test]
    fn all_null_column_is_an_error() {
        let c = Column::numerical("x", vec![None, None]);
        assert!(matches!(column_stats(&c), Err(Error::AllNull(_))));
        assert!(normalized_entropy(&c).is_err());
    }

    #[test]
    fn normalized_entropy_examples() {
        let two = Column::categorical("c", vec![Some("A"), Some("B")]);
        let one = Column::categorical("c", vec![Some("A"); 4]);
        let skewed = Column::categorical("c", vec![Some("A"), Some("A"), Some("A"), Some("B")]);
        assert_abs_diff_eq!(normalized_entropy(&two).unwrap(), 1.0);
        assert_eq!(normalized_entropy(&one).unwrap(), 0.0);
        let expected = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert_abs_diff_eq!(normalized_entropy(&skewed).unwrap(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(expected, 0.811, epsilon = 1e-3);
    }

    #[test]
    fn pearson_examples() {
        let d = Dataset::new(vec![
            Column::numerical("X", vec![Some(1.0), Some(2.0), Some(3.0)]),
            Column::numerical("Y", vec![Some(2.0), Some(4.0), Some(6.0)]),
            Column::numerical("Z", vec![Some(5.0), Some(5.0), Some(5.0)]),
        ])
        .unwrap();
        let m = pearson_matrix(&d);
        assert_abs_diff_eq!(m.between("X", "Y").unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(m.between("X", "Z"), None);
        assert_eq!(m.between("Z", "Z"), None);
        assert_eq!(m.between("X", "X"), Some(1.0));

        // Σdxdy = 149, Σdx² = 5, Σdy² = 7205
        let r = pearson(
            &[Some(1.0), Some(2.0), Some(3.0), Some(4.0)],
            &[Some(1.0), Some(2.0), Some(3.0), Some(100.0)],
        )
        .unwrap();
        assert_abs_diff_eq!(r, 149.0 / (5.0f64 * 7205.0).sqrt(), epsilon = 1e-12);
        assert!(r < 0.8);
    }

    #[test]
    fn pearson_uses_pairwise_deletion() {
        let r = pearson(
            &[Some(1.0), None, Some(2.0), Some(3.0)],
            &[Some(1.0), Some(50.0), Some(2.0), Some(3.0)],
        );
        assert_abs_diff_eq!(r.unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(pearson(&[Some(1.0), Some(2.0)], &[Some(1.0), Some(2.0)]), None);
    }

    #[test]
    fn histogram_entropy_of_uniform_spread() {
        let xs: Vec<f64> = (0..100).map(f64::from).collect();
        assert_abs_diff_eq!(entropy_of_counts(&histogram(&xs, 10)), 10f64.log2(), epsilon = 1e-12);
    }
}
