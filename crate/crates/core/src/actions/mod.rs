//! Data and model actions: parameter trees, preconditions, grounding and
//! execution.

mod action;
mod apply;
mod instantiate;
mod key;
mod precondition;
mod template;

pub use action::{
    Action, ActionKind, Aggregator, BinaryOperator, Comparison, Discretization, GroundAction, BIN_COUNTS,
    QUANTILE_COUNTS,
};
pub use apply::apply_data_action;
pub use instantiate::{
    choose_value, instantiate, selection_weights, NoValidAction, ParamStatsStore, ParamValueStats, ParameterPolicy,
    WEIGHT_FLOOR,
};
pub use key::{canonical_state_key, StateKey};
pub use precondition::{
    check_precondition, PreconditionClass, PreconditionContext, Verdict, DEFAULT_MIN_ROWS, MIN_MODEL_ROWS,
};
pub use template::{enumerate_templates, value_candidates, ActionTemplate, ParamNode, ParamValue};
