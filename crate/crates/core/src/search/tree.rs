//! Arena-backed search DAG with a transposition table.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use serde::Serialize;

use super::config::Backprop;
use crate::actions::{ActionTemplate, GroundAction, StateKey};
use crate::mining::FittedModel;
use crate::tabular::Dataset;

pub type NodeId = usize;

/// Visit count with reward sum and squared-reward sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RewardStats {
    pub visits: u64,
    pub reward_sum: f64,
    pub reward_square_sum: f64,
}

impl RewardStats {
    pub fn new(visits: u64, reward_sum: f64, reward_square_sum: f64) -> Self {
        RewardStats {
            visits,
            reward_sum,
            reward_square_sum,
        }
    }

    pub fn record(&mut self, reward: f64) {
        self.visits += 1;
        self.reward_sum += reward;
        self.reward_square_sum += reward * reward;
    }

    pub fn q(&self, backprop: Backprop) -> f64 {
        backprop.aggregate(self.visits, self.reward_sum, self.reward_square_sum)
    }

    /// `W2/n − (W/n)²`, clamped at 0; 0 without visits.
    pub fn variance(&self) -> f64 {
        if self.visits == 0 {
            return 0.0;
        }
        let n = self.visits as f64;
        let mean = self.reward_sum / n;
        (self.reward_square_sum / n - mean * mean).max(0.0)
    }
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub action: Arc<GroundAction>,
    pub child: NodeId,
    pub stats: RewardStats,
}

#[derive(Debug, Clone)]
pub struct SearchNode {
    pub key: StateKey,
    pub dataset: Dataset,
    pub model: Option<Arc<FittedModel>>,
    pub edges: Vec<Edge>,
    pub active: Vec<ActionTemplate>,
    pub inactive: Vec<ActionTemplate>,
    pub stats: RewardStats,
    /// Reward of the node's own simulation.
    pub base_score: f64,
    /// Forms instantiated here whose application or fit failed.
    pub failed: HashSet<String>,
    /// No further iteration can enter this node's subtree.
    pub exhausted: bool,
}

impl SearchNode {
    /// No template left and no child.
    pub fn is_terminal(&self) -> bool {
        self.active.is_empty() && self.edges.is_empty()
    }
}

/// All nodes of one search, one per state key.
#[derive(Debug, Default)]
pub struct SearchTree {
    nodes: Vec<SearchNode>,
    table: HashMap<StateKey, NodeId>,
}

impl SearchTree {
    pub fn insert(&mut self, node: SearchNode) -> NodeId {
        let id = self.nodes.len();
        self.table.insert(node.key.clone(), id);
        self.nodes.push(node);
        id
    }

    pub fn lookup(&self, key: &StateKey) -> Option<NodeId> {
        self.table.get(key).copied()
    }

    pub fn node(&self, id: NodeId) -> &SearchNode {
        &self.nodes[id]
    }

    pub fn node_mut(&mut self, id: NodeId) -> &mut SearchNode {
        &mut self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn table_len(&self) -> usize {
        self.table.len()
    }

    pub fn nodes(&self) -> &[SearchNode] {
        &self.nodes
    }

    /// Edges from any node into `child`, as (parent, edge index).
    pub fn parents_of(&self, child: NodeId) -> Vec<(NodeId, usize)> {
        self.nodes
            .iter()
            .enumerate()
            .flat_map(|(p, n)| {
                n.edges
                    .iter()
                    .enumerate()
                    .filter(move |(_, e)| e.child == child)
                    .map(move |(i, _)| (p, i))
            })
            .collect()
    }
}
