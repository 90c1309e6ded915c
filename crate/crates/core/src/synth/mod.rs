//! Synthetic benchmarks with planted patterns and their evaluation.

mod evaluate;
mod generate;
mod planted;

pub use evaluate::{evaluate_run, export_dataset, mean_found, rank_configurations, Evaluation};
pub use generate::{
    generate_scenario1, generate_scenario2, generate_scenario2_with, plant_strength, GeneratorParams, Scenario2,
    Shape,
};
pub use planted::{PlantedKind, PlantedPatternSpec, Relation, TrendShape};

/// Iteration budgets at which runs are evaluated.
pub const CUTOFFS: [u64; 4] = [100, 250, 500, 1000];
/// Seeds shared by all configurations.
pub const SEEDS: [u64; 10] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9];
