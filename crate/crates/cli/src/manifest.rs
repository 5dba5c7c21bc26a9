use clustersync::analysis::eta;
use clustersync::experiments::ScenarioSpec;
use clustersync::topology::SpectralSummary;
use serde::{Deserialize, Serialize};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Admissible,
    Inadmissible,
}

/// Leader step size against the largest stable value for the configured delay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Admissibility {
    pub beta: f64,
    pub beta_max: f64,
    /// Contraction factor of the leader disagreement; absent for `beta = 1`.
    pub eta: Option<f64>,
    pub verdict: Verdict,
}

impl Admissibility {
    pub fn evaluate(beta: f64, summary: &SpectralSummary) -> Self {
        let verdict = if beta < summary.beta_max && beta < 1.0 {
            Verdict::Admissible
        } else {
            Verdict::Inadmissible
        };
        Self {
            beta,
            beta_max: summary.beta_max,
            eta: (beta < 1.0)
                .then(|| eta(beta, summary.delta_c, summary.tau).ok())
                .flatten(),
            verdict,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    /// Iteration at which the stopping threshold was met.
    pub iterations: Option<usize>,
    pub capped: bool,
    pub final_global_error: f64,
    pub final_leader_deviation: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Artifacts {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub manifest: Option<String>,
}

/// Everything needed to reproduce a run: `config` already carries every
/// command-line override.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config: ScenarioSpec,
    pub spectral: SpectralSummary,
    pub admissibility: Admissibility,
    pub outcome: Outcome,
    pub artifacts: Artifacts,
    pub seed: u64,
    pub fingerprint: String,
}
