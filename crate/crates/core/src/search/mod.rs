//! Single-player Monte Carlo tree search over data and model actions.

mod config;
mod engine;
mod metrics;
mod policy;
mod tree;

pub use config::{ActionPolicy, Backprop, Expansion, Preset, SearchConfig, TreePolicy};
pub use engine::{run_search, Search, SearchResult, TraceEntry, ROOT};
pub use metrics::{collect_metrics, Metric, PatternDescriptor};
pub use policy::{child_score, select_child, ChildView};
pub use tree::{Edge, NodeId, RewardStats, SearchNode, SearchTree};
