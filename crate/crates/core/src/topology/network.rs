use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::graph::AdjacencyGraph;
use super::weights::{metropolis_weights, WeightMatrix};
use crate::error::{Error, Result};
use crate::experiments::ScenarioSpec;

/// Resampling budget for random-geometric clusters.
pub const GEOMETRIC_MAX_ATTEMPTS: usize = 100;

/// Intra-cluster layout. Cluster sizes count the leader.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologySpec {
    /// Followers of each cluster form a cycle (each joined to its two
    /// nearest neighbours).
    Ring { cluster_sizes: Vec<usize> },
    /// Followers are uniform points in the unit square joined when their
    /// distance is below `radius`.
    RandomGeometric {
        cluster_sizes: Vec<usize>,
        radius: f64,
    },
    /// Follower edge lists in cluster-local follower indices.
    Explicit { clusters: Vec<ExplicitCluster> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitCluster {
    pub size: usize,
    pub edges: Vec<(usize, usize)>,
}

impl TopologySpec {
    pub fn cluster_sizes(&self) -> Vec<usize> {
        match self {
            TopologySpec::Ring { cluster_sizes }
            | TopologySpec::RandomGeometric { cluster_sizes, .. } => cluster_sizes.clone(),
            TopologySpec::Explicit { clusters } => clusters.iter().map(|c| c.size).collect(),
        }
    }
}

/// Position of the leader inside its cluster's contiguous index block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LeaderPlacement {
    #[default]
    First,
    Last,
    Index(usize),
}

/// Inter-leader graph family. Weights are always max-degree weights.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum LeaderGraphSpec {
    #[default]
    Line,
    Complete,
    Explicit {
        edges: Vec<(usize, usize)>,
    },
    /// Time-varying schedule: graph `k mod len` is used at step `k`.
    Cyclic {
        graphs: Vec<LeaderGraphSpec>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleMode {
    Static,
    Cyclic,
}

/// The sequence of leader mixing matrices `V(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderSchedule {
    matrices: Vec<WeightMatrix>,
    mode: ScheduleMode,
}

impl LeaderSchedule {
    pub fn fixed(matrix: WeightMatrix) -> Result<Self> {
        Self::new(vec![matrix], ScheduleMode::Static)
    }

    pub fn cyclic(matrices: Vec<WeightMatrix>) -> Result<Self> {
        Self::new(matrices, ScheduleMode::Cyclic)
    }

    pub fn new(matrices: Vec<WeightMatrix>, mode: ScheduleMode) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(Error::config("leader_graph", "leader schedule is empty"));
        };
        if mode == ScheduleMode::Static && matrices.len() != 1 {
            return Err(Error::config(
                "leader_graph",
                "static schedule takes exactly one matrix",
            ));
        }
        let r = first.dim();
        for (idx, m) in matrices.iter().enumerate() {
            if m.dim() != r {
                return Err(Error::Shape(format!(
                    "leader matrix {idx} is {}x{0}, expected {r}x{r}",
                    m.dim()
                )));
            }
            if !m.support().is_connected() {
                return Err(Error::Topology(format!(
                    "leader graph {idx} is not connected"
                )));
            }
        }
        Ok(Self { matrices, mode })
    }

    pub fn at(&self, k: usize) -> &WeightMatrix {
        match self.mode {
            ScheduleMode::Static => &self.matrices[0],
            ScheduleMode::Cyclic => &self.matrices[k % self.matrices.len()],
        }
    }

    pub fn matrices(&self) -> &[WeightMatrix] {
        &self.matrices
    }

    pub fn mode(&self) -> ScheduleMode {
        self.mode
    }

    pub fn leader_count(&self) -> usize {
        self.matrices[0].dim()
    }
}

/// One cluster: a leader plus followers mixing over `follower_graph`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    leader_id: usize,
    follower_ids: Vec<usize>,
    follower_weights: WeightMatrix,
}

impl Cluster {
    pub fn new(
        leader_id: usize,
        follower_ids: Vec<usize>,
        follower_weights: WeightMatrix,
    ) -> Result<Self> {
        if follower_ids.len() != follower_weights.dim() {
            return Err(Error::Shape(format!(
                "{} follower ids for a {}-node follower graph",
                follower_ids.len(),
                follower_weights.dim()
            )));
        }
        if !follower_weights.support().is_connected() {
            return Err(Error::Topology("follower graph is not connected".into()));
        }
        Ok(Self {
            leader_id,
            follower_ids,
            follower_weights,
        })
    }

    pub fn leader_id(&self) -> usize {
        self.leader_id
    }

    /// Global node indices of the followers, in local order.
    pub fn follower_ids(&self) -> &[usize] {
        &self.follower_ids
    }

    pub fn follower_count(&self) -> usize {
        self.follower_ids.len()
    }

    pub fn follower_graph(&self) -> &AdjacencyGraph {
        self.follower_weights.support()
    }

    pub fn follower_weights(&self) -> &WeightMatrix {
        &self.follower_weights
    }
}

/// `r` disjoint clusters, each with one leader, plus the leader schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredNetwork {
    clusters: Vec<Cluster>,
    leader_schedule: LeaderSchedule,
    total_nodes: usize,
}

impl ClusteredNetwork {
    pub fn new(clusters: Vec<Cluster>, leader_schedule: LeaderSchedule) -> Result<Self> {
        if clusters.is_empty() {
            return Err(Error::Topology("network needs at least one cluster".into()));
        }
        if leader_schedule.leader_count() != clusters.len() {
            return Err(Error::Shape(format!(
                "leader schedule is over {} leaders, network has {} clusters",
                leader_schedule.leader_count(),
                clusters.len()
            )));
        }
        let total_nodes: usize = clusters.iter().map(|c| c.follower_count() + 1).sum();
        let mut owner = vec![false; total_nodes];
        for c in &clusters {
            for &id in c.follower_ids.iter().chain(std::iter::once(&c.leader_id)) {
                if id >= total_nodes {
                    return Err(Error::Topology(format!(
                        "node id {id} out of range for {total_nodes} nodes"
                    )));
                }
                if std::mem::replace(&mut owner[id], true) {
                    return Err(Error::Topology(format!("node {id} assigned twice")));
                }
            }
        }
        Ok(Self {
            clusters,
            leader_schedule,
            total_nodes,
        })
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster(&self, a: usize) -> &Cluster {
        &self.clusters[a]
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn total_nodes(&self) -> usize {
        self.total_nodes
    }

    pub fn leader_schedule(&self) -> &LeaderSchedule {
        &self.leader_schedule
    }

    pub fn leader_ids(&self) -> Vec<usize> {
        self.clusters.iter().map(|c| c.leader_id).collect()
    }
}

/// Builds the network described by a scenario. Pure in `(spec, spec.seed)`.
pub fn build_clustered_network(spec: &ScenarioSpec) -> Result<ClusteredNetwork> {
    let sizes = spec.topology.cluster_sizes();
    if sizes.is_empty() {
        return Err(Error::config(
            "topology",
            "at least one cluster is required",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut clusters = Vec::with_capacity(sizes.len());
    let mut offset = 0;
    for (a, &size) in sizes.iter().enumerate() {
        if size < 2 {
            return Err(Error::Topology(format!(
                "cluster {a} has size {size}; a leader and at least one follower are required"
            )));
        }
        let followers = size - 1;
        let graph = match &spec.topology {
            TopologySpec::Ring { .. } => AdjacencyGraph::ring(followers)
                .map_err(|e| Error::Topology(format!("cluster {a}: {e}")))?,
            TopologySpec::RandomGeometric { radius, .. } => {
                connected_geometric_graph(followers, *radius, &mut rng)
                    .map_err(|e| Error::Topology(format!("cluster {a}: {e}")))?
            }
            TopologySpec::Explicit { clusters } => {
                let g = AdjacencyGraph::new(followers, clusters[a].edges.iter().copied())?;
                if !g.is_connected() {
                    return Err(Error::Topology(format!(
                        "cluster {a}: follower graph is not connected"
                    )));
                }
                g
            }
        };
        let leader_pos = match spec.leader_placement {
            LeaderPlacement::First => 0,
            LeaderPlacement::Last => size - 1,
            LeaderPlacement::Index(i) if i < size => i,
            LeaderPlacement::Index(i) => {
                return Err(Error::config(
                    "leader_placement",
                    format!("index {i} outside cluster {a} of size {size}"),
                ))
            }
        };
        let leader_id = offset + leader_pos;
        let follower_ids = (offset..offset + size)
            .filter(|&id| id != leader_id)
            .collect();
        clusters.push(Cluster::new(
            leader_id,
            follower_ids,
            metropolis_weights(&graph)?,
        )?);
        offset += size;
    }
    let schedule = build_leader_schedule(&spec.leader_graph, clusters.len())?;
    ClusteredNetwork::new(clusters, schedule)
}

pub fn build_leader_schedule(spec: &LeaderGraphSpec, r: usize) -> Result<LeaderSchedule> {
    match spec {
        LeaderGraphSpec::Cyclic { graphs } => {
            if graphs.is_empty() {
                return Err(Error::config(
                    "leader_graph",
                    "cyclic schedule has no graphs",
                ));
            }
            let matrices = graphs
                .iter()
                .map(|g| match g {
                    LeaderGraphSpec::Cyclic { .. } => Err(Error::config(
                        "leader_graph",
                        "cyclic schedules cannot be nested",
                    )),
                    other => leader_matrix(other, r),
                })
                .collect::<Result<Vec<_>>>()?;
            LeaderSchedule::cyclic(matrices)
        }
        other => LeaderSchedule::fixed(leader_matrix(other, r)?),
    }
}

fn leader_matrix(spec: &LeaderGraphSpec, r: usize) -> Result<WeightMatrix> {
    if r == 1 {
        return Ok(WeightMatrix::identity1());
    }
    let graph = match spec {
        LeaderGraphSpec::Line => AdjacencyGraph::line(r)?,
        LeaderGraphSpec::Complete => AdjacencyGraph::complete(r)?,
        LeaderGraphSpec::Explicit { edges } => AdjacencyGraph::new(r, edges.iter().copied())?,
        LeaderGraphSpec::Cyclic { .. } => unreachable!("handled by build_leader_schedule"),
    };
    if !graph.is_connected() {
        return Err(Error::Topology("leader graph is not connected".into()));
    }
    metropolis_weights(&graph)
}

/// Samples `n` uniform points in the unit square, joining pairs closer than
/// `radius`, until the graph is connected or the attempt budget runs out.
pub fn connected_geometric_graph<R: Rng>(
    n: usize,
    radius: f64,
    rng: &mut R,
) -> Result<AdjacencyGraph> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::config(
            "radius",
            format!("must be positive, got {radius}"),
        ));
    }
    for _ in 0..GEOMETRIC_MAX_ATTEMPTS {
        let pts: Vec<(f64, f64)> = (0..n)
            .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
            .collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
                if (dx * dx + dy * dy).sqrt() < radius {
                    edges.push((i, j));
                }
            }
        }
        let g = AdjacencyGraph::new(n, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(Error::Topology(format!(
        "no connected sample of {n} points at radius {radius} within {GEOMETRIC_MAX_ATTEMPTS} attempts"
    )))
}
