use nalgebra::DMatrix;

use super::state::NetworkState;
use super::StepSizes;
use crate::topology::{ClusteredNetwork, WeightMatrix};

/// Follower update for cluster `a`:
/// `x_i(k+1) = (1 - gamma) sum_j w_ij x_j(k - tau_a) + gamma x_l(k - tau_a)`.
///
/// Reads only pre-step values; `tau_a = 0` is the undelayed protocol.
pub fn follower_step(
    network: &ClusteredNetwork,
    state: &NetworkState,
    a: usize,
    gamma: f64,
) -> DMatrix<f64> {
    let lag = state.tau_intra();
    let x = state.follower_history(a).lookup(lag);
    let leader = state.leader_history().lookup(lag).row(a);
    let w = network.cluster(a).follower_weights();
    let graph = w.support();
    let (n, dim) = x.shape();
    let mut out = DMatrix::zeros(n, dim);
    for i in 0..n {
        for c in 0..dim {
            let mut mix = w.get(i, i) * x[(i, c)];
            for &j in graph.neighbors(i) {
                mix += w.get(i, j) * x[(j, c)];
            }
            out[(i, c)] = (1.0 - gamma) * mix + gamma * leader[c];
        }
    }
    out
}

/// Leader update with delayed neighbour information:
/// `x_a(k+1) = (1 - beta) x_a(k) + beta sum_b v_ab(k) x_b(k - tau)`.
pub fn leader_step(state: &NetworkState, beta: f64, mixing: &WeightMatrix) -> DMatrix<f64> {
    let current = state.leaders();
    let delayed = state.leader_history().lookup(state.tau());
    let graph = mixing.support();
    let (r, dim) = current.shape();
    let mut out = DMatrix::zeros(r, dim);
    for a in 0..r {
        for c in 0..dim {
            let mut mix = mixing.get(a, a) * delayed[(a, c)];
            for &b in graph.neighbors(a) {
                mix += mixing.get(a, b) * delayed[(b, c)];
            }
            out[(a, c)] = (1.0 - beta) * current[(a, c)] + beta * mix;
        }
    }
    out
}

/// One synchronous round: every cluster's follower step and the leader
/// step, all reading the state at `k`, then the histories rotate.
pub fn advance(state: &mut NetworkState, network: &ClusteredNetwork, steps: StepSizes) {
    let followers = (0..network.cluster_count())
        .map(|a| follower_step(network, state, a, steps.gamma()))
        .collect();
    let leaders = leader_step(state, steps.beta(), network.leader_schedule().at(state.k()));
    state.commit(followers, leaders);
}
