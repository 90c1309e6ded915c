//! Apriori association rules over the qualitative columns of a dataset.

use std::collections::{BTreeSet, HashMap};

use super::model::{Artifacts, FittedModel, Item, ModelKind, Rule};
use crate::actions::GroundAction;
use crate::error::{Error, Result};
use crate::tabular::{Dataset, Origin};

pub const MIN_SUPPORT: f64 = 0.1;
pub const MIN_CONFIDENCE: f64 = 0.6;
pub const MAX_ITEMSET: usize = 4;

/// Transactions of `(column=value)` items with per-item row bitsets.
pub struct Transactions {
    pub items: Vec<Item>,
    /// Index of the column each item comes from.
    pub item_column: Vec<usize>,
    /// Source columns of each dataset column used.
    pub column_sources: Vec<Vec<String>>,
    bits: Vec<Vec<u64>>,
    pub rows: usize,
}

impl Transactions {
    /// Encodes the qualitative, non-model columns of `d`.
    pub fn from_dataset(d: &Dataset) -> Self {
        let mut items = Vec::new();
        let mut item_column = Vec::new();
        let mut column_sources = Vec::new();
        let mut bits = Vec::new();
        let words = d.row_count().div_ceil(64);
        for c in d
            .columns()
            .iter()
            .filter(|c| c.kind().is_qualitative() && c.origin() != Origin::ModelGenerated)
        {
            let ci = column_sources.len();
            column_sources.push(c.sources().to_vec());
            let mut index: HashMap<String, usize> = HashMap::new();
            for (r, label) in c.labels().into_iter().enumerate() {
                let Some(label) = label else { continue };
                let i = *index.entry(label.clone()).or_insert_with(|| {
                    items.push(Item {
                        column: c.name().to_owned(),
                        value: label,
                    });
                    item_column.push(ci);
                    bits.push(vec![0u64; words]);
                    items.len() - 1
                });
                bits[i][r / 64] |= 1 << (r % 64);
            }
        }
        Transactions {
            items,
            item_column,
            column_sources,
            bits,
            rows: d.row_count(),
        }
    }

    /// Fraction of rows containing every item of `set`.
    pub fn support(&self, set: &[usize]) -> f64 {
        if self.rows == 0 {
            return 0.0;
        }
        let Some((&first, rest)) = set.split_first() else {
            return 1.0;
        };
        let mut acc = self.bits[first].clone();
        for &i in rest {
            for (a, b) in acc.iter_mut().zip(&self.bits[i]) {
                *a &= b;
            }
        }
        acc.iter().map(|w| w.count_ones() as usize).sum::<usize>() as f64 / self.rows as f64
    }

    fn sources_of(&self, set: &[usize]) -> BTreeSet<&str> {
        set.iter()
            .flat_map(|&i| self.column_sources[self.item_column[i]].iter().map(String::as_str))
            .collect()
    }
}

pub fn kulczynski(sup_a: f64, sup_b: f64, sup_ab: f64) -> f64 {
    0.5 * (sup_ab / sup_a + sup_ab / sup_b)
}

pub fn imbalance_ratio(sup_a: f64, sup_b: f64, sup_ab: f64) -> f64 {
    let denom = sup_a + sup_b - sup_ab;
    if denom <= 0.0 {
        0.0
    } else {
        (sup_a - sup_b).abs() / denom
    }
}

/// Builds the rule `A ⇒ B` if it meets the confidence threshold and its
/// sides share no source column.
pub fn make_rule(tx: &Transactions, a: &[usize], b: &[usize], min_confidence: f64) -> Option<Rule> {
    if !tx.sources_of(a).is_disjoint(&tx.sources_of(b)) {
        return None;
    }
    let mut ab: Vec<usize> = a.iter().chain(b).copied().collect();
    ab.sort_unstable();
    let (sa, sb, sab) = (tx.support(a), tx.support(b), tx.support(&ab));
    let confidence = sab / sa;
    (confidence >= min_confidence).then(|| Rule {
        antecedent: a.iter().map(|&i| tx.items[i].clone()).collect(),
        consequent: b.iter().map(|&i| tx.items[i].clone()).collect(),
        support_a: sa,
        support_b: sb,
        support_ab: sab,
        confidence,
        kulc: kulczynski(sa, sb, sab),
        ir: imbalance_ratio(sa, sb, sab),
    })
}

/// Frequent itemsets (item indices ascending, one item per column), level
/// by level.
pub fn frequent_itemsets(tx: &Transactions, min_support: f64, max_len: usize) -> Vec<Vec<usize>> {
    let mut level: Vec<Vec<usize>> = (0..tx.items.len())
        .filter(|&i| tx.support(&[i]) >= min_support)
        .map(|i| vec![i])
        .collect();
    let mut all = level.clone();
    while !level.is_empty() && level[0].len() < max_len {
        let known: BTreeSet<&Vec<usize>> = level.iter().collect();
        let mut next = Vec::new();
        for (x, p) in level.iter().enumerate() {
            for q in &level[x + 1..] {
                if p[..p.len() - 1] != q[..q.len() - 1] {
                    continue;
                }
                let last = *q.last().expect("non-empty");
                if p.iter().any(|&i| tx.item_column[i] == tx.item_column[last]) {
                    continue;
                }
                let mut candidate = p.clone();
                candidate.push(last);
                // Every (k-1)-subset must be frequent.
                let closed = (0..candidate.len()).all(|skip| {
                    let sub: Vec<usize> = candidate
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i != skip)
                        .map(|(_, v)| *v)
                        .collect();
                    known.contains(&sub)
                });
                if closed && tx.support(&candidate) >= min_support {
                    next.push(candidate);
                }
            }
        }
        all.extend(next.iter().cloned());
        level = next;
    }
    all
}

/// All rules `A ⇒ B` with `A ∪ B` frequent and confidence at least
/// `min_confidence`, in itemset then antecedent-mask order.
pub fn mine_rules(tx: &Transactions, min_support: f64, min_confidence: f64, max_len: usize) -> Vec<Rule> {
    let mut rules = Vec::new();
    for set in frequent_itemsets(tx, min_support, max_len) {
        if set.len() < 2 {
            continue;
        }
        for mask in 1..(1u32 << set.len()) - 1 {
            let (a, b): (Vec<usize>, Vec<usize>) = {
                let mut a = Vec::new();
                let mut b = Vec::new();
                for (i, &item) in set.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        a.push(item);
                    } else {
                        b.push(item);
                    }
                }
                (a, b)
            };
            if let Some(rule) = make_rule(tx, &a, &b, min_confidence) {
                rules.push(rule);
            }
        }
    }
    rules
}

pub fn mine_association_rules(d: &Dataset, a: &GroundAction) -> Result<FittedModel> {
    let tx = Transactions::from_dataset(d);
    if tx.column_sources.is_empty() {
        return Err(Error::Precondition("rule mining needs a qualitative column".into()));
    }
    let rules = mine_rules(&tx, MIN_SUPPORT, MIN_CONFIDENCE, MAX_ITEMSET);
    let mut involved: Vec<String> = Vec::new();
    for rule in &rules {
        for item in rule.antecedent.iter().chain(&rule.consequent) {
            if let Some(c) = d.column(&item.column) {
                involved.extend(c.sources().iter().cloned());
            }
        }
    }
    Ok(FittedModel::new(
        a,
        ModelKind::AssociationRules,
        Artifacts::AssociationRules { rules },
        None,
        involved,
    ))
}
