//! Automated insight discovery: Monte Carlo tree search over tabular data
//! transformations and pattern-mining models.

pub mod actions;
pub mod error;
pub mod interestingness;
pub mod mining;
pub mod report;
pub mod search;
pub mod synth;
pub mod tabular;

pub use actions::{Action, ActionKind, GroundAction};
pub use error::{Error, Result};
pub use interestingness::IntrConfig;
pub use mining::{FittedModel, ModelKind, Pattern};
pub use search::{run_search, Preset, SearchConfig, SearchResult};
pub use tabular::{Column, ColumnType, Dataset};
