//! Fixtures shared by the benchmarks.

use fdcell_core::geometry::{generate_scenario, Scenario, ScenarioConfig};
use fdcell_core::scheduler::{run_simulation, SchedulerMode, SimulationConfig};
use fdcell_core::utility::RateState;

pub fn default_scenario(seed: u64) -> Scenario {
    generate_scenario(&ScenarioConfig::default(), seed).expect("default config is valid")
}

/// Rate state after `warmup` FPA TTIs, so averages are no longer uniform.
pub fn warmed_state(scenario: &Scenario, cfg: &SimulationConfig, warmup: usize) -> RateState {
    run_simulation(scenario, SchedulerMode::Fpa, warmup, cfg).expect("valid run").final_state
}
