//! Seeded fixtures shared by the benchmarks.

use steiner_core::harness::{
    generate_instance, generate_scenario, InstanceSpec, SolutionSource, Topology,
};
use steiner_core::{ScenarioFile, ScenarioKind, StpInstance};

/// A random connected instance with `n` vertices and `terminals` terminals.
pub fn instance(seed: u64, n: usize, terminals: usize) -> StpInstance {
    let spec = InstanceSpec {
        n,
        terminal_fraction: terminals as f64 / n as f64,
        weight_min: 1,
        weight_max: 100,
        topology: Topology::RandomConnected { density: 0.25 },
    };
    generate_instance(seed, &spec).expect("valid spec")
}

/// A grid instance, sparse enough for long shortest paths.
pub fn grid(seed: u64, n: usize, terminals: usize) -> StpInstance {
    let spec = InstanceSpec {
        n,
        terminal_fraction: terminals as f64 / n as f64,
        weight_min: 1,
        weight_max: 100,
        topology: Topology::Grid,
    };
    generate_instance(seed, &spec).expect("valid spec")
}

/// A scenario whose provided solution is optimal.
pub fn scenario(seed: u64, n: usize, terminals: usize, kind: ScenarioKind) -> ScenarioFile {
    generate_scenario(
        seed,
        &instance(seed, n, terminals),
        kind,
        SolutionSource::Optimal,
    )
    .expect("valid scenario")
}
