use serde::Serialize;

use crate::forest::SteinerForest;
use crate::graph::{Cost, StpInstance, VertexId};

/// A simple path of a solution tree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PathCandidate {
    pub vertices: Vec<VertexId>,
    /// Steiner vertices on the path whose degree in the tree is at least 3.
    pub branching_steiner: usize,
    pub cost: Cost,
}

impl PathCandidate {
    fn from_vertices(tree: &SteinerForest, inst: &StpInstance, vertices: Vec<VertexId>) -> Self {
        let branching_steiner = vertices
            .iter()
            .filter(|&&v| !inst.is_terminal(v) && tree.degree(v) >= 3)
            .count();
        let cost = vertices
            .windows(2)
            .map(|w| {
                inst.cost(w[0], w[1])
                    .expect("path edge missing from instance")
            })
            .sum();
        PathCandidate {
            vertices,
            branching_steiner,
            cost,
        }
    }

    pub fn hops(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices
            .windows(2)
            .map(|w| crate::graph::edge_key(w[0], w[1]))
    }
}

/// The longest (by hops) path of `tree` starting at `t` with at most `bound`
/// branching Steiner vertices. Ties go to the smallest far endpoint.
pub fn find_pstar(
    tree: &SteinerForest,
    t: VertexId,
    bound: usize,
    inst: &StpInstance,
) -> Option<PathCandidate> {
    let mut best: Option<PathCandidate> = None;
    for &w in tree.vertices() {
        let path = PathCandidate::from_vertices(tree, inst, tree.tree_path(t, w)?);
        if path.branching_steiner > bound {
            continue;
        }
        if best.as_ref().is_none_or(|b| path.hops() > b.hops()) {
            best = Some(path);
        }
    }
    best
}

/// Every path between two distinct vertices of `tree` with at most `bound`
/// branching Steiner vertices, ordered by `(larger endpoint, smaller
/// endpoint)`.
pub fn enumerate_path_set(
    tree: &SteinerForest,
    bound: usize,
    inst: &StpInstance,
) -> Vec<PathCandidate> {
    let vs: Vec<VertexId> = tree.vertices().iter().copied().collect();
    let mut out = Vec::new();
    for (j, &b) in vs.iter().enumerate() {
        for &a in &vs[..j] {
            let Some(p) = tree.tree_path(a, b) else {
                continue;
            };
            let path = PathCandidate::from_vertices(tree, inst, p);
            if path.branching_steiner <= bound {
                out.push(path);
            }
        }
    }
    out
}
