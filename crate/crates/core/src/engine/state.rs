use std::collections::VecDeque;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::topology::ClusteredNetwork;

/// Ring of the most recent `delay + 1` snapshots of a state block.
///
/// Offset 0 is the current block, offset `t` the block from `t` steps ago.
/// A fresh buffer holds the initial block in every slot, so lookups before
/// the first `delay` steps see the initial values.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayBuffer {
    slots: VecDeque<DMatrix<f64>>,
    delay: usize,
}

impl DelayBuffer {
    pub fn filled(initial: DMatrix<f64>, delay: usize) -> Self {
        let slots = std::iter::repeat_n(initial, delay + 1).collect();
        Self { slots, delay }
    }

    /// Buffer from explicit snapshots, newest first; holds `slots.len() - 1`
    /// steps of delay.
    pub fn from_slots(slots: Vec<DMatrix<f64>>) -> Result<Self> {
        let Some(first) = slots.first() else {
            return Err(Error::Shape(
                "delay buffer needs at least one snapshot".into(),
            ));
        };
        if slots.iter().any(|s| s.shape() != first.shape()) {
            return Err(Error::Shape(
                "delay buffer snapshots differ in shape".into(),
            ));
        }
        let delay = slots.len() - 1;
        Ok(Self {
            slots: slots.into(),
            delay,
        })
    }

    pub fn delay(&self) -> usize {
        self.delay
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn current(&self) -> &DMatrix<f64> {
        &self.slots[0]
    }

    /// Block from `offset` steps ago. Panics if `offset > delay`.
    pub fn lookup(&self, offset: usize) -> &DMatrix<f64> {
        assert!(
            offset <= self.delay,
            "offset {offset} exceeds delay {}",
            self.delay
        );
        &self.slots[offset]
    }

    pub fn push(&mut self, block: DMatrix<f64>) {
        self.slots.push_front(block);
        self.slots.truncate(self.delay + 1);
    }

    pub fn iter(&self) -> impl Iterator<Item = &DMatrix<f64>> {
        self.slots.iter()
    }
}

/// Protocol state: follower blocks `X^a` and the leader block `X_l`, each
/// with the history the delayed reads need.
///
/// The leader history spans `max(tau, tau_intra)` steps because followers
/// read their leader at `k - tau_intra`.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    followers: Vec<DelayBuffer>,
    leaders: DelayBuffer,
    tau: usize,
    tau_intra: usize,
    k: usize,
    p_max: f64,
}

impl NetworkState {
    /// Assembles a state from explicit blocks with constant history.
    pub fn from_blocks(
        followers: Vec<DMatrix<f64>>,
        leaders: DMatrix<f64>,
        tau: usize,
        tau_intra: usize,
    ) -> Result<Self> {
        let dim = leaders.ncols();
        if dim == 0 {
            return Err(Error::Shape("state dimension must be positive".into()));
        }
        if followers.len() != leaders.nrows() {
            return Err(Error::Shape(format!(
                "{} follower blocks for {} leaders",
                followers.len(),
                leaders.nrows()
            )));
        }
        if let Some(bad) = followers.iter().position(|b| b.ncols() != dim) {
            return Err(Error::Shape(format!(
                "follower block {bad} has wrong dimension"
            )));
        }
        let p_max = followers
            .iter()
            .chain(std::iter::once(&leaders))
            .flat_map(|b| b.row_iter().map(|r| r.norm()).collect::<Vec<_>>())
            .fold(0.0_f64, f64::max);
        Ok(Self {
            followers: followers
                .into_iter()
                .map(|b| DelayBuffer::filled(b, tau_intra))
                .collect(),
            leaders: DelayBuffer::filled(leaders, tau.max(tau_intra)),
            tau,
            tau_intra,
            k: 0,
            p_max,
        })
    }

    /// Assembles a state from explicit histories. Follower buffers must hold
    /// `tau_intra` steps and the leader buffer `max(tau, tau_intra)` steps.
    /// `P` is taken over every stored snapshot.
    pub fn from_histories(
        followers: Vec<DelayBuffer>,
        leaders: DelayBuffer,
        tau: usize,
        tau_intra: usize,
    ) -> Result<Self> {
        if leaders.delay() != tau.max(tau_intra) {
            return Err(Error::Shape(format!(
                "leader history holds {} steps, expected {}",
                leaders.delay(),
                tau.max(tau_intra)
            )));
        }
        if followers.len() != leaders.current().nrows() {
            return Err(Error::Shape(
                "one follower history per leader is required".into(),
            ));
        }
        let dim = leaders.current().ncols();
        for (a, f) in followers.iter().enumerate() {
            if f.delay() != tau_intra || f.current().ncols() != dim {
                return Err(Error::Shape(format!(
                    "follower history {a} has the wrong shape"
                )));
            }
        }
        let p_max = followers
            .iter()
            .chain(std::iter::once(&leaders))
            .flat_map(DelayBuffer::iter)
            .flat_map(|b| b.row_iter().map(|r| r.norm()).collect::<Vec<_>>())
            .fold(0.0_f64, f64::max);
        Ok(Self {
            followers,
            leaders,
            tau,
            tau_intra,
            k: 0,
            p_max,
        })
    }

    pub fn followers(&self, a: usize) -> &DMatrix<f64> {
        self.followers[a].current()
    }

    pub fn follower_history(&self, a: usize) -> &DelayBuffer {
        &self.followers[a]
    }

    pub fn leaders(&self) -> &DMatrix<f64> {
        self.leaders.current()
    }

    pub fn leader_history(&self) -> &DelayBuffer {
        &self.leaders
    }

    pub fn cluster_count(&self) -> usize {
        self.followers.len()
    }

    pub fn dim(&self) -> usize {
        self.leaders.current().ncols()
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn tau_intra(&self) -> usize {
        self.tau_intra
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `max_i ||p_i||` over the initial values.
    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub(crate) fn commit(&mut self, followers: Vec<DMatrix<f64>>, leaders: DMatrix<f64>) {
        for (buf, block) in self.followers.iter_mut().zip(followers) {
            buf.push(block);
        }
        self.leaders.push(leaders);
        self.k += 1;
    }

    /// Node values in global index order.
    pub fn node_values(&self, network: &ClusteredNetwork) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new(); network.total_nodes()];
        for (a, c) in network.clusters().iter().enumerate() {
            for (i, &id) in c.follower_ids().iter().enumerate() {
                out[id] = self.followers(a).row(i).iter().copied().collect();
            }
            out[c.leader_id()] = self.leaders().row(a).iter().copied().collect();
        }
        out
    }
}

/// Builds the initial state from one `d`-vector per node (global order),
/// filling every history slot with the initial values.
pub fn init_state(
    network: &ClusteredNetwork,
    initial_values: &[Vec<f64>],
    tau: usize,
    tau_intra: usize,
) -> Result<NetworkState> {
    if initial_values.len() != network.total_nodes() {
        return Err(Error::Shape(format!(
            "{} initial values for {} nodes",
            initial_values.len(),
            network.total_nodes()
        )));
    }
    let dim = initial_values.first().map_or(0, Vec::len);
    if dim == 0 {
        return Err(Error::Shape(
            "initial values must have positive dimension".into(),
        ));
    }
    for (i, v) in initial_values.iter().enumerate() {
        if v.len() != dim {
            return Err(Error::Shape(format!(
                "node {i} has dimension {}, expected {dim}",
                v.len()
            )));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric(format!(
                "node {i} has a non-finite initial value"
            )));
        }
    }
    let rows = |ids: &mut dyn Iterator<Item = usize>, n: usize| {
        let mut m = DMatrix::zeros(n, dim);
        for (row, id) in ids.enumerate() {
            for c in 0..dim {
                m[(row, c)] = initial_values[id][c];
            }
        }
        m
    };
    let followers = network
        .clusters()
        .iter()
        .map(|c| rows(&mut c.follower_ids().iter().copied(), c.follower_count()))
        .collect();
    let leaders = rows(
        &mut network.clusters().iter().map(|c| c.leader_id()),
        network.cluster_count(),
    );
    NetworkState::from_blocks(followers, leaders, tau, tau_intra)
}

/// Uniform per-coordinate sampling over `[lo, hi]` from a seeded stream.
pub fn sample_initial_values(
    nodes: usize,
    dim: usize,
    interval: [f64; 2],
    seed: u64,
) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // stream 0 is reserved for topology sampling
    rng.set_stream(1);
    let [lo, hi] = interval;
    (0..nodes)
        .map(|_| {
            (0..dim)
                .map(|_| lo + (hi - lo) * rng.random::<f64>())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn buffer_rotation() {
        let mut b = DelayBuffer::filled(DMatrix::from_element(1, 1, 0.0), 2);
        assert_eq!(b.len(), 3);
        b.push(DMatrix::from_element(1, 1, 1.0));
        b.push(DMatrix::from_element(1, 1, 2.0));
        assert_eq!(b.lookup(0)[(0, 0)], 2.0);
        assert_eq!(b.lookup(1)[(0, 0)], 1.0);
        assert_eq!(b.lookup(2)[(0, 0)], 0.0);
        b.push(DMatrix::from_element(1, 1, 3.0));
        assert_eq!(b.lookup(2)[(0, 0)], 1.0);
        assert_eq!(b.len(), 3);
    }

    #[test]
    fn zero_delay_holds_one_snapshot() {
        let b = DelayBuffer::filled(DMatrix::from_element(2, 1, 5.0), 0);
        assert_eq!(b.len(), 1);
    }

    #[test]
    #[should_panic]
    fn lookup_past_delay_panics() {
        DelayBuffer::filled(DMatrix::zeros(1, 1), 1).lookup(2);
    }

    #[test]
    fn sampling_is_seeded_and_in_range() {
        let a = sample_initial_values(50, 2, [-4.0, 4.0], 9);
        let b = sample_initial_values(50, 2, [-4.0, 4.0], 9);
        let c = sample_initial_values(50, 2, [-4.0, 4.0], 10);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().flatten().all(|v| (-4.0..=4.0).contains(v)));
    }
}
