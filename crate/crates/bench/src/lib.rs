//! Fixtures shared by the criterion benchmarks.

use clustersync::engine::{initial_state, NetworkState, RunConfig};
use clustersync::experiments::ScenarioSpec;
use clustersync::ClusteredNetwork;

/// A built network, its run configuration and the initial state.
pub struct Fixture {
    pub spec: ScenarioSpec,
    pub network: ClusteredNetwork,
    pub config: RunConfig,
    pub state: NetworkState,
}

impl Fixture {
    pub fn new(spec: ScenarioSpec) -> Self {
        let network = spec.build_network().expect("benchmark scenario builds");
        let config = spec.run_config().expect("benchmark scenario is valid");
        let state = initial_state(&network, &config).expect("initial state");
        Self {
            spec,
            network,
            config,
            state,
        }
    }
}
