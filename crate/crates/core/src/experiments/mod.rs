//! Seeded scenarios and parameter sweeps reproducing the simulation studies.

mod scenario;
mod sweep;

pub use scenario::{
    preset, preset_large, preset_large_desk, preset_small, ScenarioSpec, DEFAULT_INIT_INTERVAL,
    DEFAULT_MAX_ITERS, DEFAULT_SEED, DEFAULT_THRESHOLD,
};
pub use sweep::{
    intra_delay_study, linear_fit, rate_study, tau_sweep, LinearFit, SweepAxis, SweepResult,
    SweepRow,
};
