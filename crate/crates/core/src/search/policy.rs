//! Child selection: random, UCT, single-player UCT and UCT2.

use rand::Rng;

use super::config::{SearchConfig, TreePolicy};
use super::tree::RewardStats;

/// What selection sees of one child: the edge into it and the child
/// node's pooled statistics.
#[derive(Debug, Clone, Copy)]
pub struct ChildView<'a> {
    pub form: &'a str,
    pub edge: RewardStats,
    pub child: RewardStats,
}

/// Selection score of a visited child; `None` for random selection.
pub fn child_score(parent_visits: u64, c: &ChildView<'_>, cfg: &SearchConfig) -> Option<f64> {
    let n = c.edge.visits.max(1) as f64;
    let explore = cfg.c * ((parent_visits.max(1) as f64).ln() / n).sqrt();
    match cfg.tree_policy {
        TreePolicy::Random => None,
        TreePolicy::Uct => Some(c.edge.q(cfg.backprop) + explore),
        TreePolicy::SpUct => {
            Some(c.edge.q(cfg.backprop) + explore + (c.edge.variance() + cfg.d_const / n).sqrt())
        }
        TreePolicy::Uct2 => Some(c.child.q(cfg.backprop) + explore),
    }
}

/// Index of the chosen child. Unvisited edges go first; ties go to the
/// fewest edge visits, then the smallest canonical form.
///
/// # Panics
/// If `children` is empty.
pub fn select_child<R: Rng + ?Sized>(
    parent_visits: u64,
    children: &[ChildView<'_>],
    cfg: &SearchConfig,
    rng: &mut R,
) -> usize {
    assert!(!children.is_empty(), "selection needs a child");
    let tiebreak = |i: usize, j: usize| {
        let (a, b) = (&children[i], &children[j]);
        (a.edge.visits, a.form).cmp(&(b.edge.visits, b.form))
    };
    if let Some(first) = (0..children.len())
        .filter(|&i| children[i].edge.visits == 0)
        .min_by(|&i, &j| tiebreak(i, j))
    {
        return first;
    }
    if cfg.tree_policy == TreePolicy::Random {
        return rng.random_range(0..children.len());
    }
    let scores: Vec<f64> = children
        .iter()
        .map(|c| child_score(parent_visits, c, cfg).expect("scored policy"))
        .collect();
    (0..children.len())
        .min_by(|&i, &j| scores[j].total_cmp(&scores[i]).then_with(|| tiebreak(i, j)))
        .expect("non-empty")
}
