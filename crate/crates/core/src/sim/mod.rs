//! Seeded simulation of a contact group's lifetime: join and leave events
//! trigger re-allocation, estimation error and packet loss perturb the plan.

mod engine;
mod experiments;
mod rng;
mod scenario;

pub use engine::{round_intervals, run_scenario, run_scenario_with, Policy, RoundReport, SimulationReport};
pub use experiments::{
    compare_over_durations, compare_policies, mean_and_stddev, repeated_contacts, slot_size_sweep, spearman,
    DurationRow, PolicyOutcome, RepeatedContacts, SweepPoint,
};
pub use rng::{derive_seed, effective_upload_rate, estimate_pcd, MIN_ESTIMATED_PCD_S};
pub use scenario::{Connectivity, DataSpec, LossModel, NodeSpec, PcdErrorModel, Scenario};
