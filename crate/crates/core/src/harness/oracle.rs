//! Brute-force reference solver.
//!
//! Shares nothing with the exact module: shortest paths come from Dijkstra,
//! and the optimum is the cheapest minimum spanning tree of the distance
//! graph over `R ∪ X`, minimised over every set `X` of Steiner vertices.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::SteinerForest;
use crate::graph::{edge_key, Cost, EdgeKey, StpInstance, VertexId, INFINITE_COST};

pub const ORACLE_MAX_VERTICES: usize = 14;
pub const ORACLE_MAX_TERMINALS: usize = 7;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleSolution {
    pub cost: Cost,
    /// Edges of an optimal Steiner tree of `G`.
    pub edges: Vec<EdgeKey>,
}

impl OracleSolution {
    pub fn tree(&self, inst: &StpInstance) -> SteinerForest {
        SteinerForest::from_parts(inst.terminals().iter().copied(), self.edges.iter().copied())
    }
}

struct ShortestPaths {
    dist: Vec<Vec<Cost>>,
    parent: Vec<Vec<Option<VertexId>>>,
}

fn dijkstra_all(inst: &StpInstance) -> ShortestPaths {
    let n = inst.vertex_count();
    let mut dist = vec![vec![INFINITE_COST; n]; n];
    let mut parent = vec![vec![None; n]; n];
    for s in 0..n {
        let (d, p) = (&mut dist[s], &mut parent[s]);
        d[s] = 0;
        let mut heap = BinaryHeap::from([Reverse((0, s))]);
        while let Some(Reverse((du, u))) = heap.pop() {
            if du > d[u] {
                continue;
            }
            for &(w, c) in inst.neighbors(u) {
                if du + c < d[w] {
                    d[w] = du + c;
                    p[w] = Some(u);
                    heap.push(Reverse((d[w], w)));
                }
            }
        }
    }
    ShortestPaths { dist, parent }
}

/// Prim over the distance graph on `nodes`; returns the cost and the tree
/// edges as pairs of vertices.
fn prim(nodes: &[VertexId], dist: &[Vec<Cost>]) -> (Cost, Vec<(VertexId, VertexId)>) {
    let k = nodes.len();
    let mut done = vec![false; k];
    let mut best = vec![(INFINITE_COST, 0usize); k];
    best[0] = (0, 0);
    let mut total = 0;
    let mut edges = Vec::with_capacity(k.saturating_sub(1));
    for _ in 0..k {
        let i = (0..k)
            .filter(|&i| !done[i])
            .min_by_key(|&i| best[i].0)
            .unwrap();
        done[i] = true;
        total += best[i].0;
        if i != 0 {
            edges.push((nodes[best[i].1], nodes[i]));
        }
        for j in 0..k {
            let d = dist[nodes[i]][nodes[j]];
            if !done[j] && d < best[j].0 {
                best[j] = (d, i);
            }
        }
    }
    (total, edges)
}

/// Exact optimum for `n ≤ 14` and `|R| ≤ 7`.
pub fn oracle_solve(inst: &StpInstance) -> Result<OracleSolution> {
    let n = inst.vertex_count();
    let terminals = inst.terminals();
    if n > ORACLE_MAX_VERTICES || terminals.len() > ORACLE_MAX_TERMINALS {
        return Err(Error::OracleCapExceeded {
            vertices: n,
            terminals: terminals.len(),
            max_vertices: ORACLE_MAX_VERTICES,
            max_terminals: ORACLE_MAX_TERMINALS,
        });
    }
    let sp = dijkstra_all(inst);
    let steiner: Vec<VertexId> = (0..n).filter(|&v| !inst.is_terminal(v)).collect();

    let mut best: Option<(Cost, Vec<(VertexId, VertexId)>)> = None;
    for mask in 0u32..(1 << steiner.len()) {
        let mut nodes = terminals.to_vec();
        nodes.extend(
            (0..steiner.len())
                .filter(|&i| mask >> i & 1 == 1)
                .map(|i| steiner[i]),
        );
        let (cost, edges) = prim(&nodes, &sp.dist);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, edges));
        }
    }
    let (cost, pairs) = best.expect("the empty Steiner set is always tried");

    // Expand the distance-graph edges into shortest paths and take a
    // spanning tree of their union; its cost cannot exceed `cost`.
    let mut union = BTreeSet::new();
    for (a, b) in pairs {
        let mut x = b;
        while x != a {
            let p = sp.parent[a][x].expect("connected instance");
            union.insert(edge_key(p, x));
            x = p;
        }
    }
    let mut by_cost: Vec<(Cost, EdgeKey)> = union
        .into_iter()
        .map(|(a, b)| (inst.cost(a, b).unwrap(), (a, b)))
        .collect();
    by_cost.sort();
    let mut uf = UnionFind::<usize>::new(n);
    let kept: Vec<EdgeKey> = by_cost
        .into_iter()
        .map(|(_, e)| e)
        .filter(|&(a, b)| uf.union(a, b))
        .collect();
    let tree = SteinerForest::from_parts(terminals.iter().copied(), kept).pruned(inst);
    let tree_cost = tree.cost(inst);
    if tree_cost != cost {
        return Err(Error::Internal(format!(
            "oracle tree costs {tree_cost}, expected {cost}"
        )));
    }
    Ok(OracleSolution {
        cost,
        edges: tree.edges().iter().copied().collect(),
    })
}
