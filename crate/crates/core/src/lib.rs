//! Proportional-fair scheduling and power allocation for a full-duplex
//! femtocell with underlaid D2D links.

pub mod error;
pub mod experiment;
pub mod geometry;
pub mod link;
pub mod metrics;
pub mod optimizer;
pub mod scheduler;
pub mod units;
pub mod utility;

pub use error::{Error, Result};
pub use experiment::{
    run_experiment, run_on_scenarios, sic_sweep, sic_sweep_with, weight_sweep, ExperimentConfig, RunConfig, SicSweep,
    WeightPoint,
};
pub use geometry::{generate_scenario, D2dPair, Position, Scenario, ScenarioConfig};
pub use link::{CqiTable, PowerAllocation, Selection, SinrTriple};
pub use metrics::{energy_efficiency, throughput_cdf, CombinationShares, LinkClass, MetricsReport};
pub use optimizer::{OptimizerConfig, StartStrategy};
pub use scheduler::{
    run_simulation, CombinationClass, LinkConfig, Scheduler, SchedulerMode, SimulationConfig, SimulationTrace,
    TtiDecision,
};
pub use utility::{RateState, UtilityConfig};
