//! Two-time-scale consensus over clustered networks with delayed
//! inter-leader communication.
//!
//! Followers mix quickly inside their cluster and track their leader with
//! step `gamma`; leaders mix slowly with delayed neighbour values using
//! step `beta`. The crate builds clustered topologies, runs the protocol
//! deterministically and checks every run against the closed-form
//! convergence bounds.

pub mod analysis;
pub mod engine;
mod error;
pub mod experiments;
pub mod topology;

pub use analysis::{
    diagnostics, eta, max_stable_beta, theoretical_bounds, verify_bounds, BoundParams, BoundReport,
    DiagnosticsRecord,
};
pub use engine::{
    advance, init_state, run, run_until, NetworkState, RunConfig, RunOutcome, StepSizes, Trace,
};
pub use error::{Error, Result};
pub use experiments::{preset_large, preset_small, ScenarioSpec, SweepResult};
pub use topology::{
    build_clustered_network, metropolis_weights, second_largest_singular_value, spectral_summary,
    AdjacencyGraph, ClusteredNetwork, LeaderSchedule, SpectralSummary, WeightMatrix,
};
