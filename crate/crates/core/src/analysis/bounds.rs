use std::fmt;

use serde::{Deserialize, Serialize};

use super::diagnostics::row_mean;
use crate::engine::{fingerprint, initial_state, NetworkState, RunConfig, Trace};
use crate::error::{Error, Result};
use crate::topology::{spectral_summary, ClusteredNetwork, SpectralSummary};

/// Absolute slack allowed between an empirical error and its bound.
pub const VERIFY_SLACK: f64 = 1e-9;

/// Open upper end of the leader step sizes for which the delayed leader
/// iteration contracts: `1 - delta_c^(1/tau)` for `tau >= 1` and the
/// delay-free condition `1 - delta_c` for `tau = 0`.
pub fn max_stable_beta(delta_c: f64, tau: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&delta_c) {
        return Err(Error::Domain(format!(
            "delta_c must lie in [0, 1), got {delta_c}"
        )));
    }
    Ok(match tau {
        0 => 1.0 - delta_c,
        t => 1.0 - delta_c.powf(1.0 / t as f64),
    })
}

/// `eta = 1 - beta + delta_c beta / (1 - beta)^tau`.
pub fn eta(beta: f64, delta_c: f64, tau: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::Domain(format!(
            "beta must lie in [0, 1), got {beta}"
        )));
    }
    if !(0.0..1.0).contains(&delta_c) {
        return Err(Error::Domain(format!(
            "delta_c must lie in [0, 1), got {delta_c}"
        )));
    }
    Ok(1.0 - beta + delta_c * beta / (1.0 - beta).powi(tau as i32))
}

/// Everything the closed-form bounds need about a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundParams {
    pub fingerprint: String,
    pub sigma_per_cluster: Vec<f64>,
    pub delta_c: f64,
    pub tau: usize,
    pub tau_intra: usize,
    pub beta: f64,
    pub gamma: f64,
    pub beta_max: f64,
    /// `None` when `beta = 1`, where `eta` is undefined.
    pub eta: Option<f64>,
    pub p_max: f64,
    /// `||X^a(0)||_F` per cluster.
    pub follower_norms: Vec<f64>,
    /// `||X_l(0)||_F`.
    pub leader_norm: f64,
    /// `||xbar^a(0) - x_l^a(0)||` per cluster.
    pub initial_gaps: Vec<f64>,
}

impl BoundParams {
    /// Parameters for a seeded run of `config` on `network`.
    pub fn for_run(network: &ClusteredNetwork, config: &RunConfig) -> Result<Self> {
        let state = initial_state(network, config)?;
        Self::from_state(network, config, &state)
    }

    /// Parameters for a run starting from `state` (which must be at `k = 0`).
    pub fn from_state(
        network: &ClusteredNetwork,
        config: &RunConfig,
        state: &NetworkState,
    ) -> Result<Self> {
        if state.k() != 0 {
            return Err(Error::Consistency(
                "bound parameters need the initial state".into(),
            ));
        }
        let summary = spectral_summary(network, config.tau)?;
        Self::assemble(&summary, config, state, fingerprint(network, config, state))
    }

    pub fn assemble(
        summary: &SpectralSummary,
        config: &RunConfig,
        state: &NetworkState,
        fingerprint: String,
    ) -> Result<Self> {
        if summary.sigma_per_cluster.len() != state.cluster_count() {
            return Err(Error::Shape("spectral summary does not match state".into()));
        }
        let beta = config.steps.beta();
        let leaders = state.leaders();
        let (follower_norms, initial_gaps) = (0..state.cluster_count())
            .map(|a| {
                let block = state.followers(a);
                (block.norm(), (row_mean(block) - leaders.row(a)).norm())
            })
            .unzip();
        Ok(Self {
            fingerprint,
            sigma_per_cluster: summary.sigma_per_cluster.clone(),
            delta_c: summary.delta_c,
            tau: config.tau,
            tau_intra: config.tau_intra,
            beta,
            gamma: config.steps.gamma(),
            beta_max: summary.beta_max,
            eta: if beta < 1.0 {
                Some(eta(beta, summary.delta_c, config.tau)?)
            } else {
                None
            },
            p_max: state.p_max(),
            follower_norms,
            leader_norm: leaders.norm(),
            initial_gaps,
        })
    }

    pub fn applicability(&self) -> Applicability {
        let follower_side = if self.tau_intra == 0 {
            None
        } else {
            Some(format!("intra-cluster delay {} > 0", self.tau_intra))
        };
        let leader_side = if self.beta < self.beta_max && self.beta < 1.0 {
            None
        } else {
            Some(format!(
                "beta {} outside the admissible interval (0, {})",
                self.beta, self.beta_max
            ))
        };
        let t1 = follower_side.clone().or_else(|| leader_side.clone());
        Applicability {
            l1: follower_side.clone(),
            l2: leader_side,
            l3: follower_side,
            t1,
        }
    }
}

/// Reason a bound does not apply, per bound; `None` means applicable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Applicability {
    pub l1: Option<String>,
    pub l2: Option<String>,
    pub l3: Option<String>,
    pub t1: Option<String>,
}

impl Applicability {
    pub fn applies(&self, kind: BoundKind) -> bool {
        match kind {
            BoundKind::L1 => self.l1.is_none(),
            BoundKind::L2 => self.l2.is_none(),
            BoundKind::L3 => self.l3.is_none(),
            BoundKind::T1 => self.t1.is_none(),
        }
    }
}

/// Closed-form bound values at one iteration; `None` marks an
/// inapplicable bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValues {
    pub k: usize,
    /// Follower disagreement: `((1-gamma) sigma_a)^k ||X^a(0)||`.
    pub l1: Option<Vec<f64>>,
    /// Leader disagreement: `2 eta^k ||X_l(0)||`.
    pub l2: Option<f64>,
    /// Leader-follower gap: `(1-gamma)^k ||xbar^a(0) - x_l^a(0)|| + 2 P beta / gamma`.
    pub l3: Option<Vec<f64>>,
    /// Distance of any node of cluster `a` to the leader average: `L1 + L2 + L3`.
    pub t1: Option<Vec<f64>>,
}

pub fn theoretical_bounds(params: &BoundParams, k: usize) -> BoundValues {
    let app = params.applicability();
    let exp = i32::try_from(k).unwrap_or(i32::MAX);
    let keep = 1.0 - params.gamma;
    let l1: Vec<f64> = params
        .sigma_per_cluster
        .iter()
        .zip(&params.follower_norms)
        .map(|(s, n)| (keep * s).powi(exp) * n)
        .collect();
    let residual = 2.0 * params.p_max * params.beta / params.gamma;
    let l3: Vec<f64> = params
        .initial_gaps
        .iter()
        .map(|g| keep.powi(exp) * g + residual)
        .collect();
    let l2 = params.eta.map(|e| 2.0 * e.powi(exp) * params.leader_norm);
    let t1 = l2.map(|l2| l1.iter().zip(&l3).map(|(a, c)| a + l2 + c).collect());
    BoundValues {
        k,
        l1: app.l1.is_none().then_some(l1.clone()),
        l2: l2.filter(|_| app.l2.is_none()),
        l3: app.l3.is_none().then_some(l3),
        t1: t1.filter(|_: &Vec<f64>| app.t1.is_none()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BoundKind {
    L1,
    L2,
    L3,
    T1,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundKind::L1 => "L1",
            BoundKind::L2 => "L2",
            BoundKind::L3 => "L3",
            BoundKind::T1 => "T1",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub bound: BoundKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cluster: Option<usize>,
    pub empirical: f64,
    pub theoretical: f64,
    pub satisfied: bool,
}

impl BoundCheck {
    fn new(bound: BoundKind, cluster: Option<usize>, empirical: f64, theoretical: f64) -> Self {
        Self {
            bound,
            cluster,
            empirical,
            theoretical,
            satisfied: empirical <= theoretical + VERIFY_SLACK,
        }
    }

    pub fn margin(&self) -> f64 {
        self.theoretical - self.empirical
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub k: usize,
    pub checks: Vec<BoundCheck>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub total_checks: usize,
    pub failed_checks: usize,
    /// Smallest `theoretical - empirical` per applicable bound.
    pub worst_margin: Vec<(BoundKind, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub fingerprint: String,
    pub params: BoundParams,
    pub applicability: Applicability,
    pub summary: BoundSummary,
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn all_satisfied(&self) -> bool {
        self.summary.failed_checks == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = (usize, &BoundCheck)> {
        self.rows.iter().flat_map(|r| {
            r.checks
                .iter()
                .filter(|c| !c.satisfied)
                .map(move |c| (r.k, c))
        })
    }
}

/// Compares every recorded iteration of `trace` with the applicable bounds.
pub fn verify_bounds(trace: &Trace, params: &BoundParams) -> Result<BoundReport> {
    if trace.fingerprint != params.fingerprint {
        return Err(Error::Consistency(format!(
            "trace fingerprint {} does not match parameters {}",
            trace.fingerprint, params.fingerprint
        )));
    }
    let mut rows = Vec::with_capacity(trace.records.len());
    let mut worst: Vec<(BoundKind, f64)> = Vec::new();
    let (mut total, mut failed) = (0, 0);
    for rec in &trace.records {
        let b = theoretical_bounds(params, rec.k);
        let mut checks = Vec::new();
        if let Some(l1) = &b.l1 {
            for (a, (&emp, &th)) in rec.follower_disagreement.iter().zip(l1).enumerate() {
                checks.push(BoundCheck::new(BoundKind::L1, Some(a), emp, th));
            }
        }
        if let Some(l2) = b.l2 {
            checks.push(BoundCheck::new(
                BoundKind::L2,
                None,
                rec.leader_disagreement,
                l2,
            ));
        }
        if let Some(l3) = &b.l3 {
            for (a, (&emp, &th)) in rec.leader_follower_gap.iter().zip(l3).enumerate() {
                checks.push(BoundCheck::new(BoundKind::L3, Some(a), emp, th));
            }
        }
        if let Some(t1) = &b.t1 {
            for (a, (&emp, &th)) in rec.cluster_error.iter().zip(t1).enumerate() {
                checks.push(BoundCheck::new(BoundKind::T1, Some(a), emp, th));
            }
        }
        for c in &checks {
            total += 1;
            failed += usize::from(!c.satisfied);
            match worst.iter_mut().find(|(k, _)| *k == c.bound) {
                Some((_, m)) => *m = m.min(c.margin()),
                None => worst.push((c.bound, c.margin())),
            }
        }
        rows.push(BoundRow { k: rec.k, checks });
    }
    worst.sort_by_key(|(k, _)| *k);
    Ok(BoundReport {
        fingerprint: trace.fingerprint.clone(),
        params: params.clone(),
        applicability: params.applicability(),
        summary: BoundSummary {
            total_checks: total,
            failed_checks: failed,
            worst_margin: worst,
        },
        rows,
    })
}
