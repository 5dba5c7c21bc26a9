use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::state::{init_state, sample_initial_values, NetworkState};
use super::step::advance;
use crate::analysis::{diagnostics, DiagnosticsRecord};
use crate::error::{Error, Result};
use crate::topology::ClusteredNetwork;

/// Follower step `gamma` in (0, 1) and leader step `beta` in (0, 1].
///
/// `beta = 1` is accepted so the undamped delayed regime can be simulated;
/// the bound analysis marks it inapplicable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSizes {
    gamma: f64,
    beta: f64,
}

impl StepSizes {
    pub fn new(gamma: f64, beta: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::config(
                "gamma",
                format!("must lie in (0, 1), got {gamma}"),
            ));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::config(
                "beta",
                format!("must lie in (0, 1], got {beta}"),
            ));
        }
        Ok(Self { gamma, beta })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub steps: StepSizes,
    pub tau: usize,
    pub tau_intra: usize,
    pub dim: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// Keep raw states every `stride` iterations when set.
    pub record_stride: Option<usize>,
    pub init_interval: [f64; 2],
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        StepSizes::new(self.steps.gamma, self.steps.beta)?;
        if self.dim == 0 {
            return Err(Error::config("dim", "must be at least 1"));
        }
        if self.record_stride == Some(0) {
            return Err(Error::config("record_stride", "must be at least 1"));
        }
        let [lo, hi] = self.init_interval;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::config(
                "init_interval",
                format!("[{lo}, {hi}] is not a finite interval"),
            ));
        }
        Ok(())
    }
}

/// Raw node values at iteration `k`, in global node order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateSnapshot {
    pub k: usize,
    pub values: Vec<Vec<f64>>,
}

/// Per-iteration diagnostics of a run, starting at `k = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub fingerprint: String,
    pub records: Vec<DiagnosticsRecord>,
    pub snapshots: Vec<StateSnapshot>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&DiagnosticsRecord> {
        self.records.last()
    }

    /// First recorded `k` whose record satisfies `pred`.
    pub fn first_k(&self, pred: impl Fn(&DiagnosticsRecord) -> bool) -> Option<usize> {
        self.records.iter().find(|r| pred(r)).map(|r| r.k)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    /// First `k` meeting the stopping criterion; `None` when the cap was hit.
    pub iterations: Option<usize>,
    pub trace: Trace,
}

impl RunOutcome {
    pub fn capped(&self) -> bool {
        self.iterations.is_none()
    }
}

/// Hash identifying the network, the run configuration and the initial
/// values a trace was produced from.
pub fn fingerprint(
    network: &ClusteredNetwork,
    config: &RunConfig,
    initial: &NetworkState,
) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(config).expect("config serializes"));
    for c in network.clusters() {
        h.update((c.leader_id() as u64).to_le_bytes());
        for &id in c.follower_ids() {
            h.update((id as u64).to_le_bytes());
        }
        for v in c.follower_weights().entries().iter() {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    for m in network.leader_schedule().matrices() {
        for v in m.entries().iter() {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    for a in 0..initial.cluster_count() {
        for v in initial.followers(a).iter() {
            h.update(v.to_bits().to_le_bytes());
        }
    }
    for v in initial.leaders().iter() {
        h.update(v.to_bits().to_le_bytes());
    }
    let digest = h.finalize();
    digest[..16].iter().map(|b| format!("{b:02x}")).collect()
}

/// Initial state for `config`, with values sampled from its seed.
pub fn initial_state(network: &ClusteredNetwork, config: &RunConfig) -> Result<NetworkState> {
    config.validate()?;
    let values = sample_initial_values(
        network.total_nodes(),
        config.dim,
        config.init_interval,
        config.seed,
    );
    init_state(network, &values, config.tau, config.tau_intra)
}

/// Runs exactly `config.max_iters` steps from seeded initial values.
pub fn run(network: &ClusteredNetwork, config: &RunConfig) -> Result<Trace> {
    let state = initial_state(network, config)?;
    Ok(run_while(network, config, state, |_| false)?.trace)
}

/// Runs from an explicit initial state for `config.max_iters` steps.
pub fn run_from(
    network: &ClusteredNetwork,
    config: &RunConfig,
    state: NetworkState,
) -> Result<Trace> {
    Ok(run_while(network, config, state, |_| false)?.trace)
}

/// Runs until every follower is within `threshold` of its own leader
/// (`max_a max_i ||x_i^a - x_l^a|| <= threshold`) or `config.max_iters`
/// steps have been taken.
// negated comparisons also reject NaN
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn run_until(
    network: &ClusteredNetwork,
    config: &RunConfig,
    threshold: f64,
) -> Result<RunOutcome> {
    if !(threshold > 0.0) {
        return Err(Error::config(
            "threshold",
            format!("must be positive, got {threshold}"),
        ));
    }
    let state = initial_state(network, config)?;
    run_while(network, config, state, |r| r.leader_deviation <= threshold)
}

/// Steps the protocol until `stop` accepts a record or the cap is reached.
pub fn run_while(
    network: &ClusteredNetwork,
    config: &RunConfig,
    mut state: NetworkState,
    stop: impl Fn(&DiagnosticsRecord) -> bool,
) -> Result<RunOutcome> {
    config.validate()?;
    if state.cluster_count() != network.cluster_count() {
        return Err(Error::Shape("state does not match network".into()));
    }
    if state.tau() != config.tau || state.tau_intra() != config.tau_intra {
        return Err(Error::Consistency(
            "state delays differ from the run configuration".into(),
        ));
    }
    let fingerprint = fingerprint(network, config, &state);
    let mut records = Vec::with_capacity(config.max_iters.min(1 << 16) + 1);
    let mut snapshots = Vec::new();
    let mut iterations = None;
    loop {
        let k = state.k();
        if config.record_stride.is_some_and(|s| k.is_multiple_of(s)) {
            snapshots.push(StateSnapshot {
                k,
                values: state.node_values(network),
            });
        }
        let record = diagnostics(&state);
        let done = stop(&record);
        records.push(record);
        if done {
            iterations = Some(k);
            break;
        }
        if k >= config.max_iters {
            break;
        }
        advance(&mut state, network, config.steps);
    }
    Ok(RunOutcome {
        iterations,
        trace: Trace {
            fingerprint,
            records,
            snapshots,
        },
    })
}
