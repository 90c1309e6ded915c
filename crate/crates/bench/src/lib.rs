//! Shared fixtures for the benchmarks.

use insight_core::synth::{generate_scenario2, Scenario2};
use insight_core::Dataset;

/// The smallest scenario-2 dataset at data seed 0.
pub fn small_table() -> Dataset {
    generate_scenario2(Scenario2::A, 0).expect("generator succeeds").0
}

/// The largest scenario-2 dataset at data seed 0.
pub fn large_table() -> Dataset {
    generate_scenario2(Scenario2::E, 0).expect("generator succeeds").0
}
