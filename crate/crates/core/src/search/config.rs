use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::actions::{ActionKind, ParameterPolicy, DEFAULT_MIN_ROWS};
use crate::error::{Error, Result};
use crate::interestingness::IntrConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum TreePolicy {
    Random,
    Uct,
    SpUct,
    Uct2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum ActionPolicy {
    Random,
    WeightedRandom,
    Uct,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", tag = "mode", deny_unknown_fields)]
pub enum Expansion {
    /// Expand while `floor(N^alpha) >= |children|`.
    ProgressiveWidening { alpha: f64 },
    /// Expand while `|children| < fan_out`.
    #[serde(rename_all = "camelCase")]
    FixedFanOut { fan_out: usize },
}

impl Expansion {
    pub fn gate_open(self, visits: u64, children: usize) -> bool {
        match self {
            Expansion::ProgressiveWidening { alpha } => (visits as f64).powf(alpha).floor() >= children as f64,
            Expansion::FixedFanOut { fan_out } => children < fan_out,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum Backprop {
    Mean,
    Rms,
}

impl Backprop {
    /// Aggregate of `visits` rewards with sum `sum` and square sum `sum_sq`.
    pub fn aggregate(self, visits: u64, sum: f64, sum_sq: f64) -> f64 {
        if visits == 0 {
            return 0.0;
        }
        let n = visits as f64;
        let q = match self {
            Backprop::Mean => sum / n,
            Backprop::Rms => (sum_sq / n).max(0.0).sqrt(),
        };
        q.clamp(0.0, 1.0)
    }
}

/// The ten experimental configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Preset {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    C9,
    C10,
}

impl Preset {
    pub const ALL: [Preset; 10] = [
        Preset::C1,
        Preset::C2,
        Preset::C3,
        Preset::C4,
        Preset::C5,
        Preset::C6,
        Preset::C7,
        Preset::C8,
        Preset::C9,
        Preset::C10,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::C1 => "C1",
            Preset::C2 => "C2",
            Preset::C3 => "C3",
            Preset::C4 => "C4",
            Preset::C5 => "C5",
            Preset::C6 => "C6",
            Preset::C7 => "C7",
            Preset::C8 => "C8",
            Preset::C9 => "C9",
            Preset::C10 => "C10",
        }
    }

    pub fn config(self, iterations: u64, seed: u64) -> SearchConfig {
        use ActionPolicy as A;
        use TreePolicy as T;
        let pw = |alpha| Expansion::ProgressiveWidening { alpha };
        let fan = |fan_out| Expansion::FixedFanOut { fan_out };
        let (tree_policy, action_policy, random_simulation, expansion) = match self {
            Preset::C1 => (T::Random, A::Random, true, pw(0.5)),
            Preset::C2 => (T::Uct, A::Random, true, pw(0.5)),
            Preset::C3 => (T::Uct, A::Random, false, pw(0.5)),
            Preset::C4 => (T::Uct, A::WeightedRandom, false, pw(0.5)),
            Preset::C5 => (T::Uct, A::Uct, false, pw(0.25)),
            Preset::C6 => (T::Uct, A::Uct, false, pw(0.5)),
            Preset::C7 => (T::Uct, A::Uct, false, pw(0.75)),
            Preset::C8 => (T::Uct, A::Uct, false, fan(3)),
            Preset::C9 => (T::Uct, A::Uct, false, fan(6)),
            Preset::C10 => (T::SpUct, A::Uct, false, pw(0.5)),
        };
        SearchConfig {
            tree_policy,
            action_policy,
            random_simulation,
            expansion,
            iterations,
            seed,
            ..SearchConfig::default()
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown preset `{s}` (expected C1..C10)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct SearchConfig {
    pub tree_policy: TreePolicy,
    pub action_policy: ActionPolicy,
    pub random_simulation: bool,
    pub expansion: Expansion,
    /// UCT exploration constant, also used by UCT parameter selection.
    pub c: f64,
    /// spUCT variance constant.
    pub d_const: f64,
    pub backprop: Backprop,
    pub iterations: u64,
    pub seed: u64,
    pub intr: IntrConfig,
    /// Minimum rows a `where` action must keep.
    pub min_rows: usize,
    /// Restricts the model actions offered; data actions are unaffected.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model_kinds: Option<Vec<ActionKind>>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            tree_policy: TreePolicy::Uct,
            action_policy: ActionPolicy::Random,
            random_simulation: false,
            expansion: Expansion::ProgressiveWidening { alpha: 0.5 },
            c: std::f64::consts::SQRT_2,
            d_const: 1.0,
            backprop: Backprop::Mean,
            iterations: 1000,
            seed: 0,
            intr: IntrConfig::default(),
            min_rows: DEFAULT_MIN_ROWS,
            model_kinds: None,
        }
    }
}

impl SearchConfig {
    pub fn parameter_policy(&self) -> ParameterPolicy {
        match self.action_policy {
            ActionPolicy::Random => ParameterPolicy::Random,
            ActionPolicy::WeightedRandom => ParameterPolicy::WeightedRandom,
            ActionPolicy::Uct => ParameterPolicy::Uct { c: self.c },
        }
    }

    pub fn allows(&self, kind: ActionKind) -> bool {
        !kind.is_model() || self.model_kinds.as_ref().is_none_or(|ks| ks.contains(&kind))
    }

    pub fn validate(&self) -> Result<()> {
        match self.expansion {
            Expansion::ProgressiveWidening { alpha } if !(alpha > 0.0 && alpha < 1.0) => {
                return Err(Error::InvalidArgument(format!("widening alpha {alpha} outside (0,1)")));
            }
            Expansion::FixedFanOut { fan_out: 0 } => {
                return Err(Error::InvalidArgument("fan-out must be at least 1".into()));
            }
            _ => {}
        }
        if !(self.c >= 0.0 && self.c.is_finite()) || !(self.d_const >= 0.0 && self.d_const.is_finite()) {
            return Err(Error::InvalidArgument("exploration constants must be finite and non-negative".into()));
        }
        if let Some(kinds) = &self.model_kinds {
            if let Some(k) = kinds.iter().find(|k| !k.is_model()) {
                return Err(Error::InvalidArgument(format!("`{k}` is not a model action")));
            }
        }
        self.intr.validate()
    }
}
