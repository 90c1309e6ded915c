//! k-means on standardized quantitative features, scored by silhouette.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::model::{Artifacts, ClusterArtifacts, FittedModel, ModelKind};
use crate::actions::GroundAction;
use crate::error::{Error, Result};
use crate::tabular::stats::{mean, std_dev};
use crate::tabular::{Column, ColumnType, Dataset, Origin};

pub const MAX_ITERATIONS: usize = 100;
pub const TOLERANCE: f64 = 1e-6;
/// Silhouettes of larger datasets are estimated on a seeded subsample.
pub const SILHOUETTE_SAMPLE: usize = 2000;

/// Quantitative columns that are not model output.
pub fn clustering_features(d: &Dataset) -> Vec<&Arc<Column>> {
    d.columns()
        .iter()
        .filter(|c| c.kind().is_quantitative() && c.origin() != Origin::ModelGenerated)
        .collect()
}

fn complete_rows(features: &[&Arc<Column>]) -> (Vec<usize>, Vec<Vec<f64>>) {
    let n = features.first().map_or(0, |c| c.len());
    let encoded: Vec<Vec<Option<f64>>> = features.iter().map(|c| c.encode()).collect();
    let rows: Vec<usize> = (0..n).filter(|&r| encoded.iter().all(|e| e[r].is_some())).collect();
    let points = rows
        .iter()
        .map(|&r| encoded.iter().map(|e| e[r].expect("complete")).collect())
        .collect();
    (rows, points)
}

/// Number of distinct complete rows over `features`.
pub fn distinct_rows(features: &[&Arc<Column>]) -> usize {
    let (_, points) = complete_rows(features);
    points
        .iter()
        .map(|p| p.iter().map(|x| x.to_bits()).collect::<Vec<_>>())
        .collect::<HashSet<_>>()
        .len()
}

fn distance_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

fn standardize(points: &mut [Vec<f64>]) {
    let dims = points.first().map_or(0, Vec::len);
    for j in 0..dims {
        let column: Vec<f64> = points.iter().map(|p| p[j]).collect();
        let (m, s) = (mean(&column), std_dev(&column));
        for p in points.iter_mut() {
            p[j] = if s > 0.0 { (p[j] - m) / s } else { 0.0 };
        }
    }
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centers.iter().enumerate() {
        let dist = distance_sq(p, c);
        if dist < best_d {
            best_d = dist;
            best = i;
        }
    }
    best
}

/// Lloyd's algorithm from a farthest-point initialization whose first
/// center is drawn by `rng`. Returns the assignment of each point.
pub fn kmeans<R: Rng + ?Sized>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<usize> {
    let mut centers = vec![points[rng.random_range(0..points.len())].clone()];
    let mut min_d: Vec<f64> = points.iter().map(|p| distance_sq(p, &centers[0])).collect();
    while centers.len() < k {
        let mut far = 0;
        for (i, &dist) in min_d.iter().enumerate() {
            if dist > min_d[far] {
                far = i;
            }
        }
        centers.push(points[far].clone());
        for (i, p) in points.iter().enumerate() {
            min_d[i] = min_d[i].min(distance_sq(p, &points[far]));
        }
    }
    let dims = points[0].len();
    let mut assignment: Vec<usize> = points.iter().map(|p| nearest(p, &centers)).collect();
    for _ in 0..MAX_ITERATIONS {
        let mut sums = vec![vec![0.0; dims]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(&assignment) {
            counts[c] += 1;
            for (s, x) in sums[c].iter_mut().zip(p) {
                *s += x;
            }
        }
        let mut shift: f64 = 0.0;
        for c in 0..k {
            if counts[c] > 0 {
                let next: Vec<f64> = sums[c].iter().map(|s| s / counts[c] as f64).collect();
                shift = shift.max(distance_sq(&next, &centers[c]).sqrt());
                centers[c] = next;
            }
        }
        assignment = points.iter().map(|p| nearest(p, &centers)).collect();
        if shift < TOLERANCE {
            break;
        }
    }
    assignment
}

/// Mean silhouette over `subset` (indices into `points`), comparing each
/// point with the other subset members. Points alone in their cluster
/// score 0; a single occupied cluster gives 0.
pub fn silhouette(points: &[Vec<f64>], assignment: &[usize], k: usize, subset: &[usize]) -> f64 {
    let occupied: HashSet<usize> = subset.iter().map(|&i| assignment[i]).collect();
    if occupied.len() < 2 || subset.is_empty() {
        return 0.0;
    }
    let mut total = 0.0;
    for &i in subset {
        let mut sum = vec![0.0; k];
        let mut count = vec![0usize; k];
        for &j in subset {
            if i != j {
                sum[assignment[j]] += distance_sq(&points[i], &points[j]).sqrt();
                count[assignment[j]] += 1;
            }
        }
        let own = assignment[i];
        if count[own] == 0 {
            continue;
        }
        let a = sum[own] / count[own] as f64;
        let b = (0..k)
            .filter(|&c| c != own && count[c] > 0)
            .map(|c| sum[c] / count[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let s = if a.max(b) > 0.0 { (b - a) / a.max(b) } else { 0.0 };
        total += s;
    }
    (total / subset.len() as f64).clamp(-1.0, 1.0)
}

/// Cramér's V between two label sequences (pairs with either side absent
/// are skipped).
pub fn cramers_v(x: &[Option<String>], y: &[Option<String>]) -> f64 {
    let mut ix: HashMap<&str, usize> = HashMap::new();
    let mut iy: HashMap<&str, usize> = HashMap::new();
    let mut cells = Vec::new();
    for (a, b) in x.iter().zip(y) {
        if let (Some(a), Some(b)) = (a, b) {
            let nx = ix.len();
            let i = *ix.entry(a.as_str()).or_insert(nx);
            let ny = iy.len();
            let j = *iy.entry(b.as_str()).or_insert(ny);
            cells.push((i, j));
        }
    }
    let (r, c) = (ix.len(), iy.len());
    if r < 2 || c < 2 {
        return 0.0;
    }
    let mut table = vec![vec![0.0; c]; r];
    for (i, j) in &cells {
        table[*i][*j] += 1.0;
    }
    let n = cells.len() as f64;
    let rows: Vec<f64> = table.iter().map(|row| row.iter().sum()).collect();
    let cols: Vec<f64> = (0..c).map(|j| table.iter().map(|row| row[j]).sum()).collect();
    let mut chi2 = 0.0;
    for i in 0..r {
        for j in 0..c {
            let expected = rows[i] * cols[j] / n;
            chi2 += (table[i][j] - expected).powi(2) / expected;
        }
    }
    (chi2 / (n * (r.min(c) - 1) as f64)).sqrt().clamp(0.0, 1.0)
}

/// Clusters the complete rows of [`clustering_features`] into `k` groups
/// and appends the cluster ids as a numerical column.
pub fn cluster_kmeans(d: &Dataset, a: &GroundAction, k: u32, seed: u64) -> Result<FittedModel> {
    let k = k as usize;
    let features = clustering_features(d);
    if features.is_empty() {
        return Err(Error::Precondition("no quantitative feature to cluster".into()));
    }
    let (rows, mut points) = complete_rows(&features);
    if rows.len() < 2 * k {
        return Err(Error::Degenerate(format!("{} complete rows for k={k}", rows.len())));
    }
    if distinct_rows(&features) < k {
        return Err(Error::Degenerate(format!("fewer than {k} distinct rows")));
    }
    standardize(&mut points);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let assignment = kmeans(&points, k, &mut rng);
    let subset: Vec<usize> = if points.len() > SILHOUETTE_SAMPLE {
        let mut s = sample(&mut rng, points.len(), SILHOUETTE_SAMPLE).into_vec();
        s.sort_unstable();
        s
    } else {
        (0..points.len()).collect()
    };
    let silhouette = silhouette(&points, &assignment, k, &subset);
    let mut sizes = vec![0usize; k];
    for &c in &assignment {
        sizes[c] += 1;
    }

    let mut ids: Vec<Option<f64>> = vec![None; d.row_count()];
    for (&r, &c) in rows.iter().zip(&assignment) {
        ids[r] = Some(c as f64);
    }
    let labels: Vec<Option<String>> = ids.iter().map(|v| v.map(|c| format!("{c}"))).collect();
    let mut association: Option<(String, f64)> = None;
    for c in d.columns().iter().filter(|c| c.kind() == ColumnType::Categorical) {
        let v = cramers_v(&labels, &c.labels());
        if association.as_ref().is_none_or(|(_, best)| v > *best) {
            association = Some((c.name().to_owned(), v));
        }
    }
    let sources: Vec<String> = features.iter().flat_map(|c| c.sources().iter().cloned()).collect();
    let name = a.action().derived_name().unwrap_or_else(|| format!("cluster({k})"));
    let appended = Column::numerical(name, ids).with_provenance(Origin::ModelGenerated, a.canonical_form(), sources.clone());
    Ok(FittedModel::new(
        a,
        ModelKind::Clustering,
        Artifacts::Clustering(ClusterArtifacts {
            k: k as u32,
            silhouette,
            sizes,
            association,
        }),
        Some(appended),
        sources,
    ))
}
