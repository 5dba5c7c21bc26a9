//! Shared fixtures and the dense matrix-form oracle for integration tests.
#![allow(dead_code)]

use clustersync::engine::{NetworkState, RunConfig, StepSizes};
use clustersync::topology::{
    build_leader_schedule, metropolis_weights, AdjacencyGraph, Cluster, ClusteredNetwork,
    LeaderGraphSpec,
};
use clustersync::{max_stable_beta, spectral_summary};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected_graph<R: Rng>(n: usize, extra_p: f64, rng: &mut R) -> AdjacencyGraph {
    let mut edges = Vec::new();
    for i in 1..n {
        edges.push((rng.random_range(0..i), i));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < extra_p {
                edges.push((i, j));
            }
        }
    }
    AdjacencyGraph::new(n, edges).unwrap()
}

/// Network with contiguous clusters, leader first in each block.
pub fn network_from_graphs(
    graphs: Vec<AdjacencyGraph>,
    leader_graph: &LeaderGraphSpec,
) -> ClusteredNetwork {
    let mut offset = 0;
    let clusters: Vec<Cluster> = graphs
        .into_iter()
        .map(|g| {
            let n = g.node_count();
            let c = Cluster::new(
                offset,
                (offset + 1..=offset + n).collect(),
                metropolis_weights(&g).unwrap(),
            )
            .unwrap();
            offset += n + 1;
            c
        })
        .collect();
    let r = clusters.len();
    ClusteredNetwork::new(clusters, build_leader_schedule(leader_graph, r).unwrap()).unwrap()
}

/// Random instance drawn from: r in [2,5], 3..=10 followers per cluster,
/// tau in [0,10], gamma in [0.3,0.9], d in {1,3}, beta = 0.5 beta_max.
pub fn random_instance(seed: u64, max_iters: usize) -> (ClusteredNetwork, RunConfig) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = rng.random_range(2..=5);
    let graphs = (0..r)
        .map(|_| {
            let n = rng.random_range(3..=10);
            random_connected_graph(n, 0.3, &mut rng)
        })
        .collect();
    let leader_graph = match rng.random_range(0..3) {
        0 => LeaderGraphSpec::Line,
        1 => LeaderGraphSpec::Complete,
        _ => LeaderGraphSpec::Cyclic {
            graphs: vec![LeaderGraphSpec::Line, LeaderGraphSpec::Complete],
        },
    };
    let network = network_from_graphs(graphs, &leader_graph);
    let tau = rng.random_range(0..=10);
    let gamma = rng.random_range(0.3..=0.9);
    let dim = if rng.random::<bool>() { 1 } else { 3 };
    let delta = spectral_summary(&network, tau).unwrap().delta_c;
    let beta = 0.5 * max_stable_beta(delta, tau).unwrap();
    let config = RunConfig {
        steps: StepSizes::new(gamma, beta).unwrap(),
        tau,
        tau_intra: 0,
        dim,
        seed: seed.wrapping_mul(31).wrapping_add(7),
        max_iters,
        record_stride: None,
        init_interval: [-4.0, 4.0],
    };
    (network, config)
}

pub type DenseState = (Vec<DMatrix<f64>>, DMatrix<f64>);

/// Evaluates the stacked matrix form
///   X^a(k+1) = (1-gamma) W^a X^a(k-tau_a) + gamma 1 x_l^a(k-tau_a)^T
///   X_l(k+1) = (1-beta) X_l(k) + beta V(k) X_l(k-tau)
/// with dense products, treating every negative time as time 0.
pub fn dense_trajectory(
    network: &ClusteredNetwork,
    steps: StepSizes,
    tau: usize,
    tau_intra: usize,
    initial: &NetworkState,
    n_steps: usize,
) -> Vec<DenseState> {
    let r = network.cluster_count();
    let mut hist: Vec<DenseState> = vec![(
        (0..r).map(|a| initial.followers(a).clone()).collect(),
        initial.leaders().clone(),
    )];
    let at = |k: isize| k.max(0) as usize;
    let (g, b) = (steps.gamma(), steps.beta());
    for k in 0..n_steps {
        let ki = k as isize;
        let (fol_lag, lead_lag) = (
            &hist[at(ki - tau_intra as isize)],
            &hist[at(ki - tau as isize)],
        );
        let followers = (0..r)
            .map(|a| {
                let w = network.cluster(a).follower_weights().entries();
                let n = w.nrows();
                let ones = DMatrix::from_element(n, 1, 1.0);
                let leader_row = fol_lag.1.rows(a, 1).into_owned();
                w * &fol_lag.0[a] * (1.0 - g) + ones * leader_row * g
            })
            .collect();
        let v = network.leader_schedule().at(k).entries();
        let leaders = &hist[k].1 * (1.0 - b) + v * &lead_lag.1 * b;
        hist.push((followers, leaders));
    }
    hist
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

pub fn col(v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_column_slice(v.len(), 1, v)
}
