#![allow(clippy::needless_range_loop)]

mod common;

use clustersync::analysis::diagnostics;
use clustersync::engine::{
    advance, follower_step, init_state, initial_state, leader_step, run, run_until, DelayBuffer,
    NetworkState, RunConfig, StepSizes,
};
use clustersync::experiments::preset_small;
use clustersync::topology::{
    build_leader_schedule, metropolis_weights, AdjacencyGraph, Cluster, ClusteredNetwork,
    LeaderGraphSpec, LeaderSchedule,
};
use clustersync::Error;
use common::{col, dense_trajectory, max_abs_diff, network_from_graphs, random_instance};
use nalgebra::DMatrix;

/// Two clusters of two followers each, every matrix the uniform 2x2 average.
fn toy_network() -> ClusteredNetwork {
    let pair = || metropolis_weights(&AdjacencyGraph::line(2).unwrap()).unwrap();
    let clusters = vec![
        Cluster::new(0, vec![1, 2], pair()).unwrap(),
        Cluster::new(3, vec![4, 5], pair()).unwrap(),
    ];
    ClusteredNetwork::new(clusters, LeaderSchedule::fixed(pair()).unwrap()).unwrap()
}

fn toy_state() -> NetworkState {
    // followers (0),(2) led by 4; second cluster unused by the follower check
    let values: Vec<Vec<f64>> = [4.0, 0.0, 2.0, 2.0, 1.0, 1.0]
        .iter()
        .map(|v| vec![*v])
        .collect();
    init_state(&toy_network(), &values, 0, 0).unwrap()
}

fn config(steps: usize, gamma: f64, beta: f64, tau: usize) -> RunConfig {
    RunConfig {
        steps: StepSizes::new(gamma, beta).unwrap(),
        tau,
        tau_intra: 0,
        dim: 1,
        seed: 11,
        max_iters: steps,
        record_stride: None,
        init_interval: [-4.0, 4.0],
    }
}

#[test]
fn step_sizes_domain() {
    assert!(StepSizes::new(0.5, 1.0).is_ok());
    assert!(matches!(
        StepSizes::new(1.0, 0.1),
        Err(Error::Config { .. })
    ));
    assert!(matches!(
        StepSizes::new(0.5, 0.0),
        Err(Error::Config { .. })
    ));
    assert!(matches!(
        StepSizes::new(0.5, 1.5),
        Err(Error::Config { .. })
    ));
}

#[test]
fn init_fills_every_slot() {
    let net = toy_network();
    let values = vec![vec![1.5, -2.0]; 6];
    let state = init_state(&net, &values, 3, 2).unwrap();
    assert_eq!(state.leader_history().len(), 4);
    for slot in state
        .leader_history()
        .iter()
        .chain(state.follower_history(1).iter())
    {
        assert!(slot.row_iter().all(|r| r[0] == 1.5 && r[1] == -2.0));
    }
    assert_eq!(state.follower_history(0).len(), 3);
    let undelayed = init_state(&net, &values, 0, 0).unwrap();
    assert_eq!(undelayed.leader_history().len(), 1);
    assert!(matches!(
        init_state(&net, &values[..5], 0, 0),
        Err(Error::Shape(_))
    ));
}

#[test]
fn follower_substep_example() {
    let out = follower_step(&toy_network(), &toy_state(), 0, 0.5);
    assert_eq!(out, col(&[2.5, 2.5]));
}

#[test]
fn follower_substep_full_gamma_adopts_leader() {
    let state = toy_state();
    let out = follower_step(&toy_network(), &state, 0, 1.0);
    assert_eq!(out, col(&[4.0, 4.0]));
}

#[test]
fn leader_substep_example() {
    let v = metropolis_weights(&AdjacencyGraph::line(2).unwrap()).unwrap();
    let followers = (0..2)
        .map(|_| DelayBuffer::from_slots(vec![col(&[0.0, 0.0])]).unwrap())
        .collect();
    // newest first: current (0),(2); one step back (1),(1)
    let leaders = DelayBuffer::from_slots(vec![col(&[0.0, 2.0]), col(&[1.0, 1.0])]).unwrap();
    let state = NetworkState::from_histories(followers, leaders, 1, 0).unwrap();
    let out = leader_step(&state, 0.2, &v);
    assert!(max_abs_diff(&out, &col(&[0.2, 1.8])) < 1e-15);
    assert_eq!(leader_step(&state, 0.0, &v), col(&[0.0, 2.0]));
}

#[test]
fn advance_composes_substeps() {
    let net = toy_network();
    let mut state = toy_state();
    let steps = StepSizes::new(0.5, 0.2).unwrap();
    let f1 = follower_step(&net, &state, 1, 0.5);
    let leaders = leader_step(&state, 0.2, net.leader_schedule().at(0));
    advance(&mut state, &net, steps);
    assert_eq!(state.k(), 1);
    assert_eq!(state.followers(0), &col(&[2.5, 2.5]));
    assert_eq!(state.followers(1), &f1);
    assert_eq!(state.leaders(), &leaders);
    // leaders 4 and 2 mix to 3: 0.8*4 + 0.2*3, 0.8*2 + 0.2*3
    assert!(max_abs_diff(&leaders, &col(&[3.8, 2.2])) < 1e-12);
}

#[test]
fn consensus_is_a_fixed_point() {
    let net = network_from_graphs(
        vec![
            AdjacencyGraph::ring(5).unwrap(),
            AdjacencyGraph::line(3).unwrap(),
        ],
        &LeaderGraphSpec::Line,
    );
    let values = vec![vec![0.75, -3.0]; net.total_nodes()];
    let mut state = init_state(&net, &values, 4, 2).unwrap();
    let before: Vec<DMatrix<f64>> = (0..2).map(|a| state.followers(a).clone()).collect();
    let leaders = state.leaders().clone();
    for _ in 0..20 {
        advance(&mut state, &net, StepSizes::new(0.4, 0.3).unwrap());
    }
    // weights like 1/3 only sum to one up to rounding
    for a in 0..2 {
        assert!(max_abs_diff(state.followers(a), &before[a]) < 1e-12);
    }
    assert!(max_abs_diff(state.leaders(), &leaders) < 1e-12);
    let d = diagnostics(&state);
    assert!(d.global_error < 1e-12);
    assert!(d.leader_disagreement < 1e-12);
}

#[test]
fn loop_form_matches_dense_matrix_form() {
    for seed in 0..10u64 {
        let (net, mut cfg) = random_instance(1000 + seed, 100);
        cfg.tau_intra = (seed % 3) as usize;
        let mut state = initial_state(&net, &cfg).unwrap();
        let dense = dense_trajectory(&net, cfg.steps, cfg.tau, cfg.tau_intra, &state, 100);
        for k in 0..100 {
            advance(&mut state, &net, cfg.steps);
            let (fol, lead) = &dense[k + 1];
            assert!(
                max_abs_diff(state.leaders(), lead) <= 1e-12,
                "seed {seed} k {k}"
            );
            for a in 0..net.cluster_count() {
                assert!(
                    max_abs_diff(state.followers(a), &fol[a]) <= 1e-12,
                    "seed {seed} k {k} a {a}"
                );
            }
        }
    }
}

#[test]
fn states_stay_bounded_by_initial_maximum() {
    for seed in 0..10u64 {
        let (net, mut cfg) = random_instance(2000 + seed, 300);
        cfg.tau_intra = (seed % 4) as usize;
        let mut state = initial_state(&net, &cfg).unwrap();
        let p = state.p_max();
        for _ in 0..300 {
            advance(&mut state, &net, cfg.steps);
            for v in state.node_values(&net) {
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!(norm <= p + 1e-9);
            }
        }
    }
}

fn mean(m: &DMatrix<f64>) -> Vec<f64> {
    m.column_iter().map(|c| c.mean()).collect()
}

#[test]
fn average_recursions_hold() {
    for seed in 0..10u64 {
        let (net, mut cfg) = random_instance(3000 + seed, 200);
        cfg.tau_intra = (seed % 3) as usize;
        let (g, b) = (cfg.steps.gamma(), cfg.steps.beta());
        let mut state = initial_state(&net, &cfg).unwrap();
        let initial_leader_mean = mean(state.leaders());
        for _ in 0..200 {
            let lead_prev = mean(state.leaders());
            let lead_lag = mean(state.leader_history().lookup(cfg.tau));
            let lead_intra = state.leader_history().lookup(cfg.tau_intra).clone();
            let fol_intra: Vec<Vec<f64>> = (0..net.cluster_count())
                .map(|a| mean(state.follower_history(a).lookup(cfg.tau_intra)))
                .collect();
            advance(&mut state, &net, cfg.steps);
            let lead_now = mean(state.leaders());
            for c in 0..cfg.dim {
                let expect = (1.0 - b) * lead_prev[c] + b * lead_lag[c];
                assert!((lead_now[c] - expect).abs() <= 1e-12);
                assert!((lead_now[c] - initial_leader_mean[c]).abs() <= 1e-12);
            }
            for a in 0..net.cluster_count() {
                let now = mean(state.followers(a));
                for c in 0..cfg.dim {
                    let expect = (1.0 - g) * fol_intra[a][c] + g * lead_intra[(a, c)];
                    assert!((now[c] - expect).abs() <= 1e-12);
                }
            }
        }
    }
}

#[test]
fn runs_are_deterministic() {
    let (net, cfg) = random_instance(77, 150);
    let a = run(&net, &cfg).unwrap();
    let b = run(&net, &cfg).unwrap();
    assert_eq!(a, b);
    let other = RunConfig {
        seed: cfg.seed + 1,
        ..cfg.clone()
    };
    assert_ne!(run(&net, &other).unwrap().fingerprint, a.fingerprint);
}

#[test]
fn trace_length_and_indices() {
    let net = toy_network();
    let empty = run(&net, &config(0, 0.5, 0.1, 2)).unwrap();
    assert_eq!(empty.len(), 1);
    assert_eq!(empty.records[0].k, 0);
    let t = run(&net, &config(25, 0.5, 0.1, 2)).unwrap();
    assert_eq!(t.len(), 26);
    assert!(t.records.iter().enumerate().all(|(i, r)| r.k == i));
}

#[test]
fn consensus_start_terminates_immediately() {
    let net = toy_network();
    let mut cfg = config(100, 0.5, 0.1, 3);
    cfg.init_interval = [1.25, 1.25];
    let out = run_until(&net, &cfg, 1e-3).unwrap();
    assert_eq!(out.iterations, Some(0));
    let t = run(&net, &cfg).unwrap();
    for r in &t.records {
        assert_eq!(r.global_error, 0.0);
        assert!(r
            .follower_disagreement
            .iter()
            .chain(&r.leader_follower_gap)
            .all(|x| *x == 0.0));
    }
}

#[test]
fn small_preset_p_is_reproducible() {
    let spec = preset_small();
    let net = spec.build_network().unwrap();
    let cfg = spec.run_config().unwrap();
    let s1 = initial_state(&net, &cfg).unwrap();
    let s2 = initial_state(&net, &cfg).unwrap();
    let values = s1.node_values(&net);
    let max_abs = values.iter().map(|v| v[0].abs()).fold(0.0, f64::max);
    assert_eq!(s1.p_max(), max_abs);
    assert_eq!(s1.p_max(), s2.p_max());
    assert!(max_abs <= 4.0);
}

#[test]
fn small_preset_leaders_contract_by_500() {
    let spec = preset_small();
    let net = spec.build_network().unwrap();
    let mut cfg = spec.run_config().unwrap();
    cfg.max_iters = 500;
    let t = run(&net, &cfg).unwrap();
    assert!(t.records[500].leader_disagreement < t.records[0].leader_disagreement);
}

#[test]
fn small_preset_terminates_before_cap() {
    let spec = preset_small();
    let net = spec.build_network().unwrap();
    let out = run_until(&net, &spec.run_config().unwrap(), spec.threshold).unwrap();
    let n = out.iterations.expect("small preset converges");
    assert!(n < spec.max_iters);
    assert_eq!(out.trace.len(), n + 1);
    assert!(out.trace.last().unwrap().leader_deviation <= spec.threshold);
    assert!(out.trace.records[n - 1].leader_deviation > spec.threshold);
}

#[test]
fn single_cluster_network_runs() {
    let net = network_from_graphs(
        vec![AdjacencyGraph::ring(4).unwrap()],
        &LeaderGraphSpec::Line,
    );
    assert_eq!(
        build_leader_schedule(&LeaderGraphSpec::Complete, 1)
            .unwrap()
            .at(0)
            .dim(),
        1
    );
    let t = run(&net, &config(50, 0.5, 0.5, 3)).unwrap();
    assert!(t.records.iter().all(|r| r.leader_disagreement == 0.0));
    assert!(t.last().unwrap().follower_disagreement[0] < t.records[0].follower_disagreement[0]);
}
