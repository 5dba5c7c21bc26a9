//! Synchronous execution of the two-time-scale protocol with delay buffers.

mod run;
mod state;
mod step;

pub use run::{
    fingerprint, initial_state, run, run_from, run_until, run_while, RunConfig, RunOutcome,
    StateSnapshot, StepSizes, Trace,
};
pub use state::{init_state, sample_initial_values, DelayBuffer, NetworkState};
pub use step::{advance, follower_step, leader_step};
