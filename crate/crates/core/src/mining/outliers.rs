//! Univariate (z-score / dominant mode) and bivariate (regression residual /
//! contingency Gini) outlier detection.

use std::collections::HashMap;

use super::model::{Artifacts, BivariateArtifacts, FittedModel, FlaggedPair, FlaggedValue, ModelKind, UnivariateArtifacts};
use crate::actions::GroundAction;
use crate::error::{Error, Result};
use crate::tabular::stats::{mean, pearson, std_dev};
use crate::tabular::{Column, Dataset, Origin, ValueKey};

/// z-scores `|x - mean| / std` (population std); `None` when degenerate.
pub fn z_scores(xs: &[f64]) -> Option<Vec<f64>> {
    if xs.len() < 3 {
        return None;
    }
    let (m, s) = (mean(xs), std_dev(xs));
    (s > 0.0 && s.is_finite()).then(|| xs.iter().map(|x| (x - m).abs() / s).collect())
}

fn flag_column(a: &GroundAction, name: String, source: &[&Column], flags: Vec<Option<bool>>) -> Column {
    let sources = source.iter().flat_map(|c| c.sources().iter().cloned()).collect();
    Column::boolean(name, flags).with_provenance(Origin::ModelGenerated, a.canonical_form(), sources)
}

/// Flags values of `column`. Quantitative: `out(v) = z > t_quant`.
/// Qualitative: when the mode's frequency exceeds `t_qual`, every other
/// value is flagged with `out(v)` = its relative frequency.
pub fn detect_univariate_outliers(
    d: &Dataset,
    a: &GroundAction,
    column: &str,
    t_quant: f64,
    t_qual: f64,
) -> Result<FittedModel> {
    let c = d.column_or_err(column)?;
    let mut flags: Vec<Option<bool>> = (0..c.len()).map(|r| (!c.is_null(r)).then_some(false)).collect();
    let mut flagged: Vec<FlaggedValue> = Vec::new();
    let quantitative = c.kind().is_quantitative();
    if quantitative {
        let values = c.quantitative_values().expect("quantitative");
        let present: Vec<(usize, f64)> = values.iter().enumerate().filter_map(|(r, v)| Some((r, (*v)?))).collect();
        let xs: Vec<f64> = present.iter().map(|p| p.1).collect();
        if let Some(z) = z_scores(&xs) {
            let mut by_value: HashMap<u64, usize> = HashMap::new();
            for (&(row, x), &z) in present.iter().zip(&z) {
                if z > t_quant {
                    flags[row] = Some(true);
                    let key = x.to_bits();
                    match by_value.get(&key) {
                        Some(&i) => flagged[i].rows += 1,
                        None => {
                            by_value.insert(key, flagged.len());
                            flagged.push(FlaggedValue {
                                value: c.get(row).expect("present").render(c.kind()),
                                out: z,
                                rows: 1,
                            });
                        }
                    }
                }
            }
        }
    } else {
        let counts = c.value_counts();
        let total = c.non_null_count();
        if total >= 3 {
            let best = counts.iter().map(|(_, n)| *n).max().unwrap_or(0);
            let mode = counts.iter().position(|(_, n)| *n == best).expect("non-empty");
            if best as f64 / total as f64 > t_qual {
                let mode_key = ValueKey::from(&counts[mode].0);
                for (i, (v, n)) in counts.iter().enumerate() {
                    if i != mode {
                        flagged.push(FlaggedValue {
                            value: v.render(c.kind()),
                            out: *n as f64 / total as f64,
                            rows: *n,
                        });
                    }
                }
                for (r, flag) in flags.iter_mut().enumerate() {
                    if let Some(v) = c.get(r) {
                        *flag = Some(ValueKey::from(&v) != mode_key);
                    }
                }
            }
        }
    }
    let name = a.action().derived_name().unwrap_or_else(|| format!("outlier({column})"));
    let appended = flag_column(a, name, &[c], flags);
    Ok(FittedModel::new(
        a,
        ModelKind::UnivariateOutliers,
        Artifacts::UnivariateOutliers(UnivariateArtifacts {
            column: column.to_owned(),
            quantitative,
            flagged,
        }),
        Some(appended),
        c.sources().to_vec(),
    ))
}

/// Ordinary least squares `y = a + b x`.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let (mx, my) = (mean(x), mean(y));
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

/// Score of a flagged pair with z-score `z`: `1 - t/z`, clamped to [0,1].
fn pair_score(z: f64, t_quant: f64) -> f64 {
    (1.0 - t_quant / z).clamp(0.0, 1.0)
}

/// Gini index of each row of a contingency table (`1 - Σ p²`).
fn gini_rows(table: &[Vec<usize>]) -> Vec<f64> {
    table
        .iter()
        .map(|row| {
            let n: usize = row.iter().sum();
            if n == 0 {
                0.0
            } else {
                1.0 - row.iter().map(|&c| (c as f64 / n as f64).powi(2)).sum::<f64>()
            }
        })
        .collect()
}

/// Bivariate outliers of a column pair. Qualitative pairs: rows and columns
/// of the contingency table are scored by their Gini index, and a row (or
/// column) whose Gini is a z-score outlier flags its cell with the largest
/// count. Other pairs: residuals of a least-squares line on the encoded
/// values are z-scored. The pair's Pearson correlation is recorded for the
/// interestingness gate.
pub fn detect_bivariate_outliers(
    d: &Dataset,
    a: &GroundAction,
    first: &str,
    second: &str,
    t_quant: f64,
) -> Result<FittedModel> {
    let (ca, cb) = (d.column_or_err(first)?, d.column_or_err(second)?);
    let (ea, eb) = (ca.encode(), cb.encode());
    let correlation =
        pearson(&ea, &eb).ok_or_else(|| Error::Degenerate(format!("correlation of {first} and {second} is undefined")))?;
    let rows: Vec<usize> = (0..d.row_count()).filter(|&r| ea[r].is_some() && eb[r].is_some()).collect();
    let mut flags: Vec<Option<bool>> = (0..d.row_count())
        .map(|r| (ea[r].is_some() && eb[r].is_some()).then_some(false))
        .collect();
    let mut flagged = Vec::new();
    let qualitative = ca.kind().is_qualitative() && cb.kind().is_qualitative();
    if qualitative {
        let (la, lb) = (ca.labels(), cb.labels());
        let mut ia: Vec<String> = Vec::new();
        let mut ib: Vec<String> = Vec::new();
        let index = |labels: &mut Vec<String>, v: &str| match labels.iter().position(|l| l == v) {
            Some(i) => i,
            None => {
                labels.push(v.to_owned());
                labels.len() - 1
            }
        };
        let cells: Vec<(usize, usize, usize)> = rows
            .iter()
            .map(|&r| {
                let i = index(&mut ia, la[r].as_deref().expect("present"));
                let j = index(&mut ib, lb[r].as_deref().expect("present"));
                (r, i, j)
            })
            .collect();
        let mut table = vec![vec![0usize; ib.len()]; ia.len()];
        for &(_, i, j) in &cells {
            table[i][j] += 1;
        }
        let transposed: Vec<Vec<usize>> = (0..ib.len()).map(|j| table.iter().map(|row| row[j]).collect()).collect();
        let mut hits: HashMap<(usize, usize), f64> = HashMap::new();
        for (lines, by_row) in [(&table, true), (&transposed, false)] {
            if let Some(z) = z_scores(&gini_rows(lines)) {
                for (i, &zi) in z.iter().enumerate() {
                    if zi > t_quant {
                        let best = *lines[i].iter().max().expect("non-empty");
                        let j = lines[i].iter().position(|&c| c == best).expect("present");
                        let cell = if by_row { (i, j) } else { (j, i) };
                        let entry = hits.entry(cell).or_insert(0.0);
                        *entry = entry.max(zi);
                    }
                }
            }
        }
        let mut cells_hit: Vec<_> = hits.into_iter().collect();
        cells_hit.sort_by_key(|x| x.0);
        for ((i, j), z) in cells_hit {
            flagged.push(FlaggedPair {
                first: ia[i].clone(),
                second: ib[j].clone(),
                z,
                score: pair_score(z, t_quant),
            });
            for &(r, ci, cj) in &cells {
                if (ci, cj) == (i, j) {
                    flags[r] = Some(true);
                }
            }
        }
    } else {
        let x: Vec<f64> = rows.iter().map(|&r| ea[r].expect("present")).collect();
        let y: Vec<f64> = rows.iter().map(|&r| eb[r].expect("present")).collect();
        let (intercept, slope) = least_squares(&x, &y);
        let residuals: Vec<f64> = x.iter().zip(&y).map(|(a, b)| b - (intercept + slope * a)).collect();
        if let Some(z) = z_scores(&residuals) {
            for (k, &zk) in z.iter().enumerate() {
                if zk > t_quant {
                    let r = rows[k];
                    flags[r] = Some(true);
                    flagged.push(FlaggedPair {
                        first: ca.get(r).expect("present").render(ca.kind()),
                        second: cb.get(r).expect("present").render(cb.kind()),
                        z: zk,
                        score: pair_score(zk, t_quant),
                    });
                }
            }
        }
    }
    let name = a
        .action()
        .derived_name()
        .unwrap_or_else(|| format!("outlier({first},{second})"));
    let appended = flag_column(a, name, &[ca, cb], flags);
    let mut involved = ca.sources().to_vec();
    involved.extend(cb.sources().iter().cloned());
    Ok(FittedModel::new(
        a,
        ModelKind::BivariateOutliers,
        Artifacts::BivariateOutliers(BivariateArtifacts {
            first: first.to_owned(),
            second: second.to_owned(),
            correlation,
            qualitative,
            flagged,
        }),
        Some(appended),
        involved,
    ))
}
