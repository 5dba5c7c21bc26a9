//! Consensus diagnostics, step-size admissibility and convergence bounds.

mod bounds;
mod diagnostics;

pub use bounds::{
    eta, max_stable_beta, theoretical_bounds, verify_bounds, Applicability, BoundCheck, BoundKind,
    BoundParams, BoundReport, BoundRow, BoundSummary, BoundValues, VERIFY_SLACK,
};
pub use diagnostics::{diagnostics, disagreement, DiagnosticsRecord};
