//! Undirected weighted graphs with a terminal set.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Zero-based vertex index. File formats use one-based ids.
pub type VertexId = usize;

/// Exact edge cost, in units of `10^-scale` of the written value.
pub type Cost = u64;

/// Distance used for unreachable pairs. Small enough that adding two of them
/// does not overflow.
pub const INFINITE_COST: Cost = u64::MAX / 4;

/// Unordered vertex pair, always stored as `(min, max)`.
pub type EdgeKey = (VertexId, VertexId);

#[inline]
pub fn edge_key(a: VertexId, b: VertexId) -> EdgeKey {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: VertexId,
    pub v: VertexId,
    pub cost: Cost,
}

impl Edge {
    pub fn key(&self) -> EdgeKey {
        (self.u, self.v)
    }
}

/// The triple of a connected graph, its edge costs and the terminal set.
///
/// Edges are kept sorted by endpoint pair, so two instances built from the
/// same edge set compare equal regardless of input order.
#[derive(Clone, Debug)]
pub struct StpInstance {
    vertex_count: usize,
    edges: Vec<Edge>,
    terminals: Vec<VertexId>,
    is_terminal: Vec<bool>,
    scale: u32,
    index: HashMap<EdgeKey, usize>,
    adjacency: Vec<Vec<(VertexId, Cost)>>,
}

impl PartialEq for StpInstance {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count
            && self.scale == other.scale
            && self.edges == other.edges
            && self.terminals == other.terminals
    }
}

impl Eq for StpInstance {}

impl StpInstance {
    /// Builds and validates an instance. `scale` is the number of implied
    /// decimal digits in every cost.
    pub fn new<E, T>(vertex_count: usize, edges: E, terminals: T, scale: u32) -> Result<Self>
    where
        E: IntoIterator<Item = (VertexId, VertexId, Cost)>,
        T: IntoIterator<Item = VertexId>,
    {
        if vertex_count == 0 {
            return Err(Error::Validation("graph has no vertices".into()));
        }
        let mut list = Vec::new();
        for (a, b, cost) in edges {
            if a >= vertex_count || b >= vertex_count {
                return Err(Error::Validation(format!(
                    "edge ({}, {}) references a vertex outside 1..={vertex_count}",
                    a + 1,
                    b + 1
                )));
            }
            if a == b {
                return Err(Error::Validation(format!("self-loop at vertex {}", a + 1)));
            }
            if cost >= INFINITE_COST {
                return Err(Error::Validation(format!(
                    "edge ({}, {}) cost is too large",
                    a + 1,
                    b + 1
                )));
            }
            let (u, v) = edge_key(a, b);
            list.push(Edge { u, v, cost });
        }
        list.sort();
        for pair in list.windows(2) {
            if pair[0].key() == pair[1].key() {
                return Err(Error::Validation(format!(
                    "duplicate edge ({}, {})",
                    pair[0].u + 1,
                    pair[0].v + 1
                )));
            }
        }

        let mut is_terminal = vec![false; vertex_count];
        let mut terms = Vec::new();
        for t in terminals {
            if t >= vertex_count {
                return Err(Error::Validation(format!(
                    "terminal {} is outside 1..={vertex_count}",
                    t + 1
                )));
            }
            if is_terminal[t] {
                return Err(Error::Validation(format!(
                    "terminal {} listed twice",
                    t + 1
                )));
            }
            is_terminal[t] = true;
            terms.push(t);
        }
        if terms.is_empty() {
            return Err(Error::Validation("terminal set is empty".into()));
        }
        terms.sort_unstable();

        let mut uf = UnionFind::<usize>::new(vertex_count);
        for e in &list {
            uf.union(e.u, e.v);
        }
        if let Some(v) = (1..vertex_count).find(|&v| !uf.equiv(0, v)) {
            return Err(Error::Validation(format!(
                "graph is disconnected (vertex {} unreachable from vertex 1)",
                v + 1
            )));
        }

        let mut adjacency = vec![Vec::new(); vertex_count];
        let mut index = HashMap::with_capacity(list.len());
        for (i, e) in list.iter().enumerate() {
            adjacency[e.u].push((e.v, e.cost));
            adjacency[e.v].push((e.u, e.cost));
            index.insert(e.key(), i);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }

        Ok(StpInstance {
            vertex_count,
            edges: list,
            terminals: terms,
            is_terminal,
            scale,
            index,
            adjacency,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn terminals(&self) -> &[VertexId] {
        &self.terminals
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.is_terminal.get(v).copied().unwrap_or(false)
    }

    /// Number of implied decimal digits in every cost.
    pub fn scale(&self) -> u32 {
        self.scale
    }

    pub fn cost(&self, a: VertexId, b: VertexId) -> Option<Cost> {
        self.index.get(&edge_key(a, b)).map(|&i| self.edges[i].cost)
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.index.contains_key(&edge_key(a, b))
    }

    /// Neighbours of `v` with edge costs, ascending by neighbour id.
    pub fn neighbors(&self, v: VertexId) -> &[(VertexId, Cost)] {
        &self.adjacency[v]
    }

    pub fn max_cost(&self) -> Cost {
        self.edges.iter().map(|e| e.cost).max().unwrap_or(0)
    }

    /// Same graph with `t` added to (or removed from) the terminal set.
    pub fn with_terminal(&self, t: VertexId, terminal: bool) -> Result<Self> {
        if t >= self.vertex_count {
            return Err(Error::Validation(format!(
                "vertex {} does not exist",
                t + 1
            )));
        }
        let terms: Vec<_> = self
            .terminals
            .iter()
            .copied()
            .filter(|&x| x != t)
            .chain(terminal.then_some(t))
            .collect();
        self.rebuild(
            self.edges.iter().map(|e| (e.u, e.v, e.cost)),
            terms,
            self.scale,
        )
    }

    /// Same graph and terminals with the cost of edge `(a, b)` replaced.
    pub fn with_edge_cost(&self, a: VertexId, b: VertexId, cost: Cost) -> Result<Self> {
        let key = edge_key(a, b);
        if !self.index.contains_key(&key) {
            return Err(Error::Validation(format!(
                "edge ({}, {}) does not exist",
                a + 1,
                b + 1
            )));
        }
        let edges = self
            .edges
            .iter()
            .map(|e| (e.u, e.v, if e.key() == key { cost } else { e.cost }));
        self.rebuild(edges, self.terminals.clone(), self.scale)
    }

    /// Multiplies every cost by `10^extra` and raises the scale accordingly.
    pub fn rescaled(&self, extra: u32) -> Result<Self> {
        if extra == 0 {
            return Ok(self.clone());
        }
        let factor = 10u64
            .checked_pow(extra)
            .ok_or_else(|| Error::Validation("decimal scale too large".into()))?;
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in &self.edges {
            let cost = e
                .cost
                .checked_mul(factor)
                .filter(|&c| c < INFINITE_COST)
                .ok_or_else(|| Error::Validation("edge cost overflows after rescaling".into()))?;
            edges.push((e.u, e.v, cost));
        }
        self.rebuild(edges, self.terminals.clone(), self.scale + extra)
    }

    fn rebuild<E>(&self, edges: E, terminals: Vec<VertexId>, scale: u32) -> Result<Self>
    where
        E: IntoIterator<Item = (VertexId, VertexId, Cost)>,
    {
        StpInstance::new(self.vertex_count, edges, terminals, scale)
    }

    /// Renders a cost of this instance as a decimal string.
    pub fn format_cost(&self, cost: Cost) -> String {
        format_cost(cost, self.scale)
    }
}

/// Renders a scaled integer cost with exactly `scale` decimal digits.
pub fn format_cost(cost: Cost, scale: u32) -> String {
    if scale == 0 {
        return cost.to_string();
    }
    let factor = 10u64.pow(scale);
    format!(
        "{}.{:0width$}",
        cost / factor,
        cost % factor,
        width = scale as usize
    )
}
