use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::ScenarioSpec;
use crate::analysis::{max_stable_beta, theoretical_bounds, BoundParams, DiagnosticsRecord};
use crate::engine::{run, run_until, Trace};
use crate::error::{Error, Result};
use crate::topology::{spectral_summary, ClusteredNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Tau,
    Beta,
    TauIntra,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Tau => "tau",
            SweepAxis::Beta => "beta",
            SweepAxis::TauIntra => "tau_intra",
        }
    }
}

/// One swept parameter value and what its run produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub tau: usize,
    pub tau_intra: usize,
    pub beta: f64,
    pub gamma: f64,
    pub beta_max: f64,
    pub admissible: bool,
    /// Iterations until every follower is within the threshold of its
    /// leader; `None` when the cap was reached.
    pub iterations: Option<usize>,
    /// First iteration at which every cluster's follower disagreement is
    /// within the threshold.
    pub follower_iterations: Option<usize>,
    /// First iteration at which the leader disagreement is within the threshold.
    pub leader_iterations: Option<usize>,
    /// `iterations / follower_iterations`.
    pub separation_ratio: Option<f64>,
    /// `2 P beta / gamma`.
    pub residual: Option<f64>,
    /// `sup_k max_a ||xbar^a(k) - x_l^a(k)||` over the run.
    pub sup_gap: Option<f64>,
    /// Iterations at which some cluster's gap exceeded its bound.
    pub gap_bound_violations: Option<usize>,
    pub final_global_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(x, y)`; `None` with fewer than two points
/// or no spread in `x`.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<LinearFit> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - (slope * p.0 + intercept)).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        1.0 - ss_res / ss_tot
    };
    Some(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub base: ScenarioSpec,
    pub rows: Vec<SweepRow>,
    /// Fit of `iterations` against the axis over terminating rows.
    pub fit: Option<LinearFit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl SweepResult {
    pub fn all_capped(&self) -> bool {
        self.rows.iter().all(|r| r.iterations.is_none())
    }

    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }
}

fn crossing(trace: &Trace, pred: impl Fn(&DiagnosticsRecord) -> bool) -> Option<usize> {
    trace.first_k(pred)
}

fn summarize(
    spec: &ScenarioSpec,
    value: f64,
    beta_max: f64,
    iterations: Option<usize>,
    trace: &Trace,
) -> SweepRow {
    let thr = spec.threshold;
    let follower_iterations =
        crossing(trace, |r| r.follower_disagreement.iter().all(|&v| v <= thr));
    let leader_iterations = crossing(trace, |r| r.leader_disagreement <= thr);
    SweepRow {
        value,
        tau: spec.tau,
        tau_intra: spec.tau_intra,
        beta: spec.beta,
        gamma: spec.gamma,
        beta_max,
        admissible: spec.beta < beta_max,
        iterations,
        follower_iterations,
        leader_iterations,
        separation_ratio: match (iterations, follower_iterations) {
            (Some(g), Some(f)) if f > 0 => Some(g as f64 / f as f64),
            _ => None,
        },
        residual: None,
        sup_gap: None,
        gap_bound_violations: None,
        final_global_error: trace.last().map_or(0.0, |r| r.global_error),
    }
}

fn leader_delta(network: &ClusteredNetwork) -> Result<f64> {
    Ok(spectral_summary(network, 0)?.delta_c)
}

fn finish(
    axis: SweepAxis,
    base: &ScenarioSpec,
    rows: Vec<SweepRow>,
    fit: Option<LinearFit>,
) -> SweepResult {
    let mut result = SweepResult {
        axis,
        base: base.clone(),
        rows,
        fit,
        note: None,
    };
    // the rate study runs a fixed horizon, so hitting it is expected
    if axis != SweepAxis::Beta && result.all_capped() {
        result.note = Some("every row reached the iteration cap".into());
    }
    result
}

/// Iterations-to-threshold for each inter-leader delay, all rows sharing
/// the base seed, plus a linear fit over terminating rows.
pub fn tau_sweep(base: &ScenarioSpec, taus: &[usize]) -> Result<SweepResult> {
    if taus.is_empty() {
        return Err(Error::config("taus", "at least one delay is required"));
    }
    let network = base.build_network()?;
    let delta = leader_delta(&network)?;
    let mut rows = taus
        .par_iter()
        .map(|&tau| {
            let spec = base.clone().with_tau(tau);
            let outcome = run_until(&network, &spec.run_config()?, spec.threshold)?;
            let beta_max = max_stable_beta(delta, tau)?;
            Ok(summarize(
                &spec,
                tau as f64,
                beta_max,
                outcome.iterations,
                &outcome.trace,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.value.total_cmp(&b.value));
    let points: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.iterations.map(|i| (r.value, i as f64)))
        .collect();
    let fit = linear_fit(&points);
    Ok(finish(SweepAxis::Tau, base, rows, fit))
}

/// Runs each `beta` with `gamma = beta^(1/3)` for `base.max_iters` steps,
/// recording the residual `2 P beta / gamma` and the worst leader-follower
/// gap against its bound.
pub fn rate_study(base: &ScenarioSpec, betas: &[f64]) -> Result<SweepResult> {
    if betas.is_empty() {
        return Err(Error::config("betas", "at least one step size is required"));
    }
    if let Some(b) = betas.iter().find(|&&b| !(b > 0.0 && b < 1.0)) {
        return Err(Error::config("betas", format!("{b} is outside (0, 1)")));
    }
    if base.tau_intra > 0 {
        return Err(Error::config(
            "tau_intra",
            "the gap bound needs undelayed follower updates",
        ));
    }
    let network = base.build_network()?;
    let mut rows = betas
        .par_iter()
        .map(|&beta| {
            let mut spec = base.clone().with_beta(beta);
            spec.gamma = beta.cbrt();
            let config = spec.run_config()?;
            let params = BoundParams::for_run(&network, &config)?;
            let trace = run(&network, &config)?;
            let iterations = trace.first_k(|r| r.leader_deviation <= spec.threshold);
            let mut row = summarize(&spec, beta, params.beta_max, iterations, &trace);
            let residual = 2.0 * params.p_max * beta / spec.gamma;
            let mut sup_gap = 0.0_f64;
            let mut violations = 0;
            for rec in &trace.records {
                let bounds = theoretical_bounds(&params, rec.k);
                let l3 = bounds
                    .l3
                    .expect("gap bound applies without intra-cluster delay");
                sup_gap = rec
                    .leader_follower_gap
                    .iter()
                    .copied()
                    .fold(sup_gap, f64::max);
                if rec
                    .leader_follower_gap
                    .iter()
                    .zip(&l3)
                    .any(|(g, b)| *g > b + crate::analysis::VERIFY_SLACK)
                {
                    violations += 1;
                }
            }
            row.residual = Some(residual);
            row.sup_gap = Some(sup_gap);
            row.gap_bound_violations = Some(violations);
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(finish(SweepAxis::Beta, base, rows, None))
}

/// Iterations to the follower and global thresholds for each intra-cluster
/// delay, recording their ratio as the time-scale separation indicator.
pub fn intra_delay_study(base: &ScenarioSpec, tau_intra_values: &[usize]) -> Result<SweepResult> {
    if tau_intra_values.is_empty() {
        return Err(Error::config("tau_intra", "at least one delay is required"));
    }
    let network = base.build_network()?;
    let delta = leader_delta(&network)?;
    let beta_max = max_stable_beta(delta, base.tau)?;
    let mut rows = tau_intra_values
        .par_iter()
        .map(|&ta| {
            let spec = base.clone().with_tau_intra(ta);
            let outcome = run_until(&network, &spec.run_config()?, spec.threshold)?;
            Ok(summarize(
                &spec,
                ta as f64,
                beta_max,
                outcome.iterations,
                &outcome.trace,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(finish(SweepAxis::TauIntra, base, rows, None))
}
