use serde::{Deserialize, Serialize};

use crate::engine::{RunConfig, StepSizes};
use crate::error::{Error, Result};
use crate::topology::{
    build_clustered_network, ClusteredNetwork, LeaderGraphSpec, LeaderPlacement, TopologySpec,
};

pub const DEFAULT_SEED: u64 = 2021;
pub const DEFAULT_THRESHOLD: f64 = 1e-3;
pub const DEFAULT_MAX_ITERS: usize = 10_000;
pub const DEFAULT_INIT_INTERVAL: [f64; 2] = [-4.0, 4.0];

fn default_dim() -> usize {
    1
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_max_iters() -> usize {
    DEFAULT_MAX_ITERS
}
fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}
fn default_interval() -> [f64; 2] {
    DEFAULT_INIT_INTERVAL
}

/// Complete description of one simulation: topology, protocol parameters,
/// initial-value distribution and stopping rule. Times are in iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub topology: TopologySpec,
    #[serde(default)]
    pub leader_placement: LeaderPlacement,
    #[serde(default)]
    pub leader_graph: LeaderGraphSpec,
    pub gamma: f64,
    pub beta: f64,
    pub tau: usize,
    #[serde(default)]
    pub tau_intra: usize,
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default = "default_interval")]
    pub init_interval: [f64; 2],
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_stride: Option<usize>,
}

impl ScenarioSpec {
    /// Range checks that serde cannot express. Errors name the field.
    pub fn validate(&self) -> Result<()> {
        StepSizes::new(self.gamma, self.beta)?;
        if self.dim == 0 {
            return Err(Error::config("dim", "must be at least 1"));
        }
        if !(self.threshold > 0.0 && self.threshold.is_finite()) {
            return Err(Error::config(
                "threshold",
                format!("must be positive, got {}", self.threshold),
            ));
        }
        let [lo, hi] = self.init_interval;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::config(
                "init_interval",
                format!("[{lo}, {hi}] is not a finite interval"),
            ));
        }
        if self.record_stride == Some(0) {
            return Err(Error::config("record_stride", "must be at least 1"));
        }
        let sizes = self.topology.cluster_sizes();
        if sizes.is_empty() {
            return Err(Error::config(
                "topology",
                "at least one cluster is required",
            ));
        }
        if let Some(s) = sizes.iter().find(|&&s| s < 2) {
            return Err(Error::config("topology", format!("cluster size {s} < 2")));
        }
        if let TopologySpec::RandomGeometric { radius, .. } = self.topology {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Error::config(
                    "radius",
                    format!("must be positive, got {radius}"),
                ));
            }
        }
        Ok(())
    }

    pub fn steps(&self) -> Result<StepSizes> {
        StepSizes::new(self.gamma, self.beta)
    }

    pub fn run_config(&self) -> Result<RunConfig> {
        self.validate()?;
        Ok(RunConfig {
            steps: self.steps()?,
            tau: self.tau,
            tau_intra: self.tau_intra,
            dim: self.dim,
            seed: self.seed,
            max_iters: self.max_iters,
            record_stride: self.record_stride,
            init_interval: self.init_interval,
        })
    }

    pub fn build_network(&self) -> Result<ClusteredNetwork> {
        self.validate()?;
        build_clustered_network(self)
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_tau(mut self, tau: usize) -> Self {
        self.tau = tau;
        self
    }

    pub fn with_tau_intra(mut self, tau_intra: usize) -> Self {
        self.tau_intra = tau_intra;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// 60 nodes in 3 ring clusters of 20 (leaders at global indices 0, 20,
/// 40), line leader graph, `gamma = 0.5`, `beta = 0.1`, `tau = 10`.
pub fn preset_small() -> ScenarioSpec {
    ScenarioSpec {
        name: Some("small".into()),
        topology: TopologySpec::Ring {
            cluster_sizes: vec![20; 3],
        },
        leader_placement: LeaderPlacement::First,
        leader_graph: LeaderGraphSpec::Line,
        gamma: 0.5,
        beta: 0.1,
        tau: 10,
        tau_intra: 0,
        dim: 1,
        init_interval: DEFAULT_INIT_INTERVAL,
        seed: DEFAULT_SEED,
        max_iters: DEFAULT_MAX_ITERS,
        threshold: DEFAULT_THRESHOLD,
        record_stride: None,
    }
}

/// 400 nodes in 5 random-geometric clusters of 80 (radius 0.3), line
/// leader graph, `gamma = 0.5`, `beta = 0.05`, `tau = 20`.
pub fn preset_large() -> ScenarioSpec {
    ScenarioSpec {
        name: Some("large".into()),
        topology: TopologySpec::RandomGeometric {
            cluster_sizes: vec![80; 5],
            radius: 0.3,
        },
        beta: 0.05,
        tau: 20,
        ..preset_small()
    }
}

/// [`preset_large`] scaled down to clusters of 20.
pub fn preset_large_desk() -> ScenarioSpec {
    ScenarioSpec {
        name: Some("large-desk".into()),
        topology: TopologySpec::RandomGeometric {
            cluster_sizes: vec![20; 5],
            radius: 0.3,
        },
        ..preset_large()
    }
}

pub fn preset(name: &str) -> Option<ScenarioSpec> {
    match name {
        "small" => Some(preset_small()),
        "large" => Some(preset_large()),
        "large-desk" => Some(preset_large_desk()),
        _ => None,
    }
}
