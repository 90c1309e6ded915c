//! Order-independent fingerprints of search states.

use std::fmt;
use std::hash::Hasher;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::mining::FittedModel;
use crate::tabular::Dataset;

/// Hex SHA-256 fingerprint of a `(dataset, model)` state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StateKey(String);

impl StateKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// 64-bit FNV-1a, used for per-row hashes.
struct Fnv1a(u64);

impl Default for Fnv1a {
    fn default() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }
}

impl Hasher for Fnv1a {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= u64::from(*b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

fn feed(h: &mut Sha256, text: &str) {
    h.update((text.len() as u64).to_le_bytes());
    h.update(text.as_bytes());
}

/// Fingerprint over the sorted column names with provenance, the multiset
/// of row hashes and the model's canonical form. Column and row order do
/// not matter, so equivalent action sequences collide. Row hashes include
/// the row's position in the base table, and the base table's schema is
/// hashed too: two states that look alike but would admit different
/// `select` results stay distinct.
pub fn canonical_state_key(d: &Dataset, m: Option<&FittedModel>) -> StateKey {
    let mut h = Sha256::new();
    let mut columns: Vec<_> = d.columns().iter().collect();
    columns.sort_by(|a, b| a.name().cmp(b.name()));
    h.update((columns.len() as u64).to_le_bytes());
    for c in &columns {
        feed(&mut h, c.name());
        feed(&mut h, c.provenance().unwrap_or(""));
    }

    let mut base: Vec<&str> = d.base().columns().iter().map(|c| c.name()).collect();
    base.sort_unstable();
    h.update((base.len() as u64).to_le_bytes());
    for name in base {
        feed(&mut h, name);
    }
    h.update((d.base().row_count() as u64).to_le_bytes());

    let mut rows: Vec<u64> = (0..d.row_count())
        .map(|r| {
            let mut fnv = Fnv1a::default();
            fnv.write_u64(d.row_ids()[r] as u64);
            for c in &columns {
                c.hash_cell(r, &mut fnv);
            }
            fnv.finish()
        })
        .collect();
    rows.sort_unstable();
    h.update((rows.len() as u64).to_le_bytes());
    for r in rows {
        h.update(r.to_le_bytes());
    }

    feed(&mut h, m.map_or("", |m| m.canonical_form()));
    let digest = h.finalize();
    StateKey(digest.iter().map(|b| format!("{b:02x}")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{apply_data_action, Action, Comparison, GroundAction};
    use crate::tabular::{student_table, Value};

    fn step(d: &Dataset, action: Action) -> Dataset {
        let a = GroundAction::new(action, d);
        apply_data_action(d, &a).unwrap()
    }

    fn select(d: &Dataset, column: &str) -> Dataset {
        step(d, Action::Select { column: column.into() })
    }

    #[test]
    fn select_order_does_not_matter() {
        let root = student_table().empty_state();
        let ab = select(&select(&root, "Student"), "Score");
        let ba = select(&select(&root, "Score"), "Student");
        assert_eq!(canonical_state_key(&ab, None), canonical_state_key(&ba, None));
        assert_ne!(canonical_state_key(&ab, None), canonical_state_key(&root, None));
    }

    #[test]
    fn equivalent_filters_collide() {
        let d = student_table();
        let filter = |v| {
            step(
                &d,
                Action::Where {
                    column: "Score".into(),
                    op: Comparison::Gt,
                    value: Value::Number(v),
                },
            )
        };
        assert_eq!(canonical_state_key(&filter(80.0), None), canonical_state_key(&filter(84.9), None));
        assert_ne!(canonical_state_key(&filter(80.0), None), canonical_state_key(&filter(86.0), None));
    }

    #[test]
    fn model_distinguishes_states() {
        use crate::mining::fit;
        let d = crate::tabular::Dataset::new(vec![crate::tabular::Column::numerical(
            "x",
            vec![Some(0.0), Some(0.1), Some(0.2), Some(10.0), Some(10.1), Some(10.2)],
        )])
        .unwrap();
        let a = GroundAction::new(Action::Clustering { k: 2 }, &d);
        let m = fit(&d, &a).unwrap();
        assert_ne!(canonical_state_key(&d, None), canonical_state_key(&d, Some(&m)));
    }
}
