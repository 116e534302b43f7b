//! Seeded instance and scenario generators.

use std::collections::BTreeSet;

use rand::seq::{index, IndexedRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::oracle::{oracle_solve, ORACLE_MAX_TERMINALS, ORACLE_MAX_VERTICES};
use crate::error::{Error, Result};
use crate::exact::{dreyfus_wagner, ExactLimits};
use crate::forest::SteinerForest;
use crate::graph::{Cost, EdgeKey, StpInstance, VertexId};
use crate::io::{Modification, ScenarioFile};
use crate::metric::MetricClosure;
use crate::reopt::{two_approx, ScenarioKind};
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Topology {
    /// A random spanning tree plus every other pair with probability
    /// `density`.
    RandomConnected { density: f64 },
    /// Vertices laid out row by row, `⌈√n⌉` per row, joined to their right
    /// and lower neighbours.
    Grid,
    /// A random spanning tree plus `chords` extra edges.
    TreePlusChords { chords: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceSpec {
    pub n: usize,
    /// Share of vertices that become terminals (at least one).
    pub terminal_fraction: f64,
    pub weight_min: Cost,
    pub weight_max: Cost,
    pub topology: Topology,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        InstanceSpec {
            n: 8,
            terminal_fraction: 0.4,
            weight_min: 1,
            weight_max: 10,
            topology: Topology::RandomConnected { density: 0.3 },
        }
    }
}

/// Where the provided solution of a generated scenario comes from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolutionSource {
    /// An optimal tree, declared with `ρ = 1`.
    #[default]
    Optimal,
    /// The 2-approximation, declared with `ρ = 2`.
    TwoApprox,
}

impl Topology {
    /// Parses `random-connected`, `grid` or `tree-plus-chords`.
    pub fn from_name(name: &str, density: f64, chords: usize) -> Result<Self> {
        match name {
            "random-connected" => Ok(Topology::RandomConnected { density }),
            "grid" => Ok(Topology::Grid),
            "tree-plus-chords" => Ok(Topology::TreePlusChords { chords }),
            other => Err(Error::InvalidInput(format!("unknown topology {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Topology::RandomConnected { .. } => "random-connected",
            Topology::Grid => "grid",
            Topology::TreePlusChords { .. } => "tree-plus-chords",
        }
    }
}

fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> BTreeSet<EdgeKey> {
    let mut order: Vec<VertexId> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    (1..n)
        .map(|i| {
            let parent = order[rng.random_range(0..i)];
            crate::graph::edge_key(parent, order[i])
        })
        .collect()
}

/// A connected instance, identical for identical `seed` and `spec`.
pub fn generate_instance(seed: u64, spec: &InstanceSpec) -> Result<StpInstance> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    if spec.weight_min > spec.weight_max {
        return Err(Error::InvalidInput("weight_min exceeds weight_max".into()));
    }
    if !(0.0..=1.0).contains(&spec.terminal_fraction) {
        return Err(Error::InvalidInput(
            "terminal_fraction must lie in [0, 1]".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: BTreeSet<EdgeKey> = match spec.topology {
        Topology::Grid => {
            let width = (1..=n).find(|w| w * w >= n).unwrap();
            let mut edges = BTreeSet::new();
            for v in 0..n {
                if (v + 1) % width != 0 && v + 1 < n {
                    edges.insert((v, v + 1));
                }
                if v + width < n {
                    edges.insert((v, v + width));
                }
            }
            edges
        }
        Topology::RandomConnected { density } => {
            if !(0.0..=1.0).contains(&density) {
                return Err(Error::InvalidInput("density must lie in [0, 1]".into()));
            }
            let mut edges = random_tree(&mut rng, n);
            for a in 0..n {
                for b in a + 1..n {
                    if !edges.contains(&(a, b)) && rng.random_bool(density) {
                        edges.insert((a, b));
                    }
                }
            }
            edges
        }
        Topology::TreePlusChords { chords } => {
            let mut edges = random_tree(&mut rng, n);
            let missing: Vec<EdgeKey> = (0..n)
                .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
                .filter(|e| !edges.contains(e))
                .collect();
            let take = chords.min(missing.len());
            edges.extend(
                index::sample(&mut rng, missing.len(), take)
                    .into_iter()
                    .map(|i| missing[i]),
            );
            edges
        }
    };
    let weighted: Vec<(VertexId, VertexId, Cost)> = edges
        .into_iter()
        .map(|(a, b)| (a, b, rng.random_range(spec.weight_min..=spec.weight_max)))
        .collect();
    let k = ((n as f64 * spec.terminal_fraction).round() as usize).clamp(1, n);
    let mut terminals = index::sample(&mut rng, n, k).into_vec();
    terminals.sort_unstable();
    StpInstance::new(n, weighted, terminals, 0)
}

/// An optimal Steiner tree, from the oracle when within its caps.
fn optimal_tree(inst: &StpInstance) -> Result<SteinerForest> {
    if inst.vertex_count() <= ORACLE_MAX_VERTICES && inst.terminals().len() <= ORACLE_MAX_TERMINALS
    {
        Ok(oracle_solve(inst)?.tree(inst))
    } else {
        Ok(dreyfus_wagner(inst, &MetricClosure::new(inst), &ExactLimits::default())?.tree)
    }
}

/// A valid scenario of the requested kind on `inst`.
pub fn generate_scenario(
    seed: u64,
    inst: &StpInstance,
    kind: ScenarioKind,
    source: SolutionSource,
) -> Result<ScenarioFile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (solution, rho) = match source {
        SolutionSource::Optimal => (optimal_tree(inst)?, Rational::from_integer(1)),
        SolutionSource::TwoApprox => (
            two_approx(inst, &MetricClosure::new(inst))?,
            Rational::from_integer(2),
        ),
    };
    let n = inst.vertex_count();
    let pick = |rng: &mut ChaCha8Rng, pool: &[VertexId], what: &str| {
        pool.choose(rng)
            .copied()
            .ok_or_else(|| Error::InvalidInput(format!("instance has no {what}")))
    };
    let modification = match kind {
        ScenarioKind::TerminalAdd => {
            let steiner: Vec<VertexId> = (0..n).filter(|&v| !inst.is_terminal(v)).collect();
            Modification::TerminalAdd {
                t: pick(&mut rng, &steiner, "Steiner vertex")?,
            }
        }
        ScenarioKind::TerminalRemove => {
            if inst.terminals().len() < 2 {
                return Err(Error::InvalidInput("instance has a single terminal".into()));
            }
            Modification::TerminalRemove {
                t: pick(&mut rng, inst.terminals(), "terminal")?,
            }
        }
        ScenarioKind::EdgeInc | ScenarioKind::EdgeDec => {
            let dec = kind == ScenarioKind::EdgeDec;
            let usable: Vec<_> = inst.edges().iter().filter(|e| !dec || e.cost > 0).collect();
            // Tree edges for increases, non-tree edges for decreases.
            let preferred: Vec<_> = usable
                .iter()
                .filter(|e| solution.contains_edge(e.u, e.v) != dec)
                .copied()
                .collect();
            let pool = if !preferred.is_empty() && rng.random_bool(0.75) {
                preferred
            } else {
                usable
            };
            let e = *pool
                .choose(&mut rng)
                .ok_or_else(|| Error::InvalidInput("instance has no usable edge".into()))?;
            if dec {
                Modification::EdgeDec {
                    u: e.u,
                    v: e.v,
                    delta: rng.random_range(1..=e.cost),
                }
            } else {
                Modification::EdgeInc {
                    u: e.u,
                    v: e.v,
                    delta: rng.random_range(1..=2 * e.cost.max(1)),
                }
            }
        }
    };
    ScenarioFile::new(inst.clone(), solution, modification, rho)
}
