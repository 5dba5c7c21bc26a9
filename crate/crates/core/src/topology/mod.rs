//! Clustered network structure, mixing weights and spectral quantities.

mod graph;
mod network;
mod spectral;
mod weights;

pub use graph::AdjacencyGraph;
pub use network::{
    build_clustered_network, build_leader_schedule, connected_geometric_graph, Cluster,
    ClusteredNetwork, ExplicitCluster, LeaderGraphSpec, LeaderPlacement, LeaderSchedule,
    ScheduleMode, TopologySpec, GEOMETRIC_MAX_ATTEMPTS,
};
pub use spectral::{
    delta_c, delta_c_of, power_iteration_norm, second_largest_singular_value, spectral_summary,
    SpectralSummary, DENSE_LIMIT, POWER_MAX_ITERS, POWER_TOL,
};
pub use weights::{
    metropolis_weights, validate_weights, ValidationReport, Violation, WeightMatrix, STOCHASTIC_TOL,
};
