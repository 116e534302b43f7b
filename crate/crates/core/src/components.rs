//! Full components and forests over metric edges.
//!
//! A forest of the copy graph `K_n` is never built explicitly. Instead a
//! [`RestrictedForest`] is a list of [`FullComponent`]s whose edges are pairs
//! of original vertex ids; a vertex id occurring in several components stands
//! for several copies joined by zero-cost edges.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::forest::SteinerForest;
use crate::graph::{edge_key, Cost, EdgeKey, StpInstance, VertexId, INFINITE_COST};
use crate::metric::MetricClosure;

/// An edge of the metric closure, with its cost at construction time.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MetricEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub cost: Cost,
}

impl MetricEdge {
    pub fn new(a: VertexId, b: VertexId, cost: Cost) -> Self {
        let (u, v) = edge_key(a, b);
        MetricEdge { u, v, cost }
    }

    pub fn in_metric(a: VertexId, b: VertexId, metric: &MetricClosure) -> Self {
        Self::new(a, b, metric.dist(a, b))
    }

    pub fn key(&self) -> EdgeKey {
        (self.u, self.v)
    }
}

/// A tree over metric edges whose leaves are the component's terminals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct FullComponent {
    edges: Vec<MetricEdge>,
    leaves: Vec<VertexId>,
    internals: Vec<VertexId>,
    cost: Cost,
}

impl FullComponent {
    /// Builds a component from the edges of a tree with distinct vertex ids.
    pub fn new(mut edges: Vec<MetricEdge>) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::Internal("full component without edges".into()));
        }
        edges.sort();
        let mut degree: BTreeMap<VertexId, usize> = BTreeMap::new();
        for e in &edges {
            if e.u == e.v {
                return Err(Error::Internal(format!(
                    "self-loop at {} in full component",
                    e.u + 1
                )));
            }
            *degree.entry(e.u).or_default() += 1;
            *degree.entry(e.v).or_default() += 1;
        }
        if edges.windows(2).any(|w| w[0].key() == w[1].key()) {
            return Err(Error::Internal("repeated edge in full component".into()));
        }
        let ids: Vec<VertexId> = degree.keys().copied().collect();
        if ids.len() != edges.len() + 1 {
            return Err(Error::Internal("full component is not a tree".into()));
        }
        let pos = |v: VertexId| ids.binary_search(&v).unwrap();
        let mut uf = UnionFind::<usize>::new(ids.len());
        for e in &edges {
            if !uf.union(pos(e.u), pos(e.v)) {
                return Err(Error::Internal("full component contains a cycle".into()));
            }
        }
        let leaves = degree
            .iter()
            .filter(|(_, &d)| d == 1)
            .map(|(&v, _)| v)
            .collect();
        let internals = degree
            .iter()
            .filter(|(_, &d)| d > 1)
            .map(|(&v, _)| v)
            .collect();
        let cost = edges.iter().map(|e| e.cost).sum();
        Ok(FullComponent {
            edges,
            leaves,
            internals,
            cost,
        })
    }

    pub fn edges(&self) -> &[MetricEdge] {
        &self.edges
    }

    /// Degree-one vertices, ascending.
    pub fn leaves(&self) -> &[VertexId] {
        &self.leaves
    }

    pub fn internals(&self) -> &[VertexId] {
        &self.internals
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.leaves.iter().chain(self.internals.iter()).copied()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.leaves.binary_search(&v).is_ok() || self.internals.binary_search(&v).is_ok()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges.iter().filter(|e| e.u == v || e.v == v).count()
    }

    /// Sum of the stored edge costs.
    pub fn cost(&self) -> Cost {
        self.cost
    }

    pub fn cost_in(&self, metric: &MetricClosure) -> Cost {
        self.edges.iter().map(|e| metric.dist(e.u, e.v)).sum()
    }

    pub fn terminal_count(&self) -> usize {
        self.leaves.len()
    }

    /// Leaves are terminals and internal vertices are not.
    pub fn is_full<F: Fn(VertexId) -> bool>(&self, is_terminal: F) -> bool {
        self.leaves.iter().all(|&v| is_terminal(v))
            && self.internals.iter().all(|&v| !is_terminal(v))
    }
}

/// Splits an acyclic edge set into full components: maximal subtrees in
/// which every vertex marked terminal is a leaf.
pub fn split_full<F: Fn(VertexId) -> bool>(
    edges: &[MetricEdge],
    is_terminal: F,
) -> Result<Vec<FullComponent>> {
    let mut edges = edges.to_vec();
    edges.sort();
    let mut uf = UnionFind::<usize>::new(edges.len());
    let mut by_vertex: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        by_vertex.entry(e.u).or_default().push(i);
        by_vertex.entry(e.v).or_default().push(i);
    }
    for (v, incident) in &by_vertex {
        if !is_terminal(*v) {
            for w in incident.windows(2) {
                uf.union(w[0], w[1]);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<MetricEdge>> = BTreeMap::new();
    for (i, e) in edges.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(*e);
    }
    let mut out: Vec<FullComponent> = groups
        .into_values()
        .map(FullComponent::new)
        .collect::<Result<_>>()?;
    out.sort_by(|a, b| a.edges.cmp(&b.edges));
    Ok(out)
}

/// Decomposes a forest of `G` into full components, with edge costs `c`.
pub fn full_components(forest: &SteinerForest, inst: &StpInstance) -> Result<Vec<FullComponent>> {
    let edges: Vec<MetricEdge> = forest
        .edges()
        .iter()
        .map(|&(a, b)| {
            MetricEdge::new(
                a,
                b,
                inst.cost(a, b).expect("forest edge missing from instance"),
            )
        })
        .collect();
    split_full(&edges, |v| inst.is_terminal(v))
}

/// A forest of the copy graph: full components plus vertices that carry no
/// edge.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RestrictedForest {
    pub components: Vec<FullComponent>,
    pub isolated: BTreeSet<VertexId>,
}

impl RestrictedForest {
    pub fn new(components: Vec<FullComponent>, isolated: BTreeSet<VertexId>) -> Self {
        let mut f = RestrictedForest {
            components,
            isolated,
        };
        f.normalise();
        f
    }

    fn normalise(&mut self) {
        let covered: BTreeSet<VertexId> =
            self.components.iter().flat_map(|c| c.vertices()).collect();
        self.isolated.retain(|v| !covered.contains(v));
    }

    pub fn vertices(&self) -> BTreeSet<VertexId> {
        self.components
            .iter()
            .flat_map(|c| c.vertices())
            .chain(self.isolated.iter().copied())
            .collect()
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.isolated.contains(&v) || self.components.iter().any(|c| c.contains(v))
    }

    /// Adds `v` as an isolated vertex unless it is already spanned.
    pub fn with_vertex(&self, v: VertexId) -> Self {
        let mut out = self.clone();
        if !out.contains_vertex(v) {
            out.isolated.insert(v);
        }
        out
    }

    /// Drops the components at the given indices.
    pub fn without(&self, removed: &[usize]) -> Self {
        let drop: BTreeSet<usize> = removed.iter().copied().collect();
        let components = self
            .components
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, c)| c.clone())
            .collect();
        RestrictedForest::new(components, self.isolated.clone())
    }

    /// Disjoint union (component lists are concatenated).
    pub fn join(&self, other: &RestrictedForest) -> Self {
        let mut components = self.components.clone();
        components.extend(other.components.iter().cloned());
        let isolated = self.isolated.union(&other.isolated).copied().collect();
        RestrictedForest::new(components, isolated)
    }

    /// Trees with shared vertex ids identified, each sorted, ordered by
    /// smallest vertex.
    pub fn trees(&self) -> Vec<Vec<VertexId>> {
        let ids: Vec<VertexId> = self.vertices().into_iter().collect();
        let pos = |v: VertexId| ids.binary_search(&v).unwrap();
        let mut uf = UnionFind::<usize>::new(ids.len());
        for c in &self.components {
            for e in c.edges() {
                uf.union(pos(e.u), pos(e.v));
            }
        }
        let mut groups: BTreeMap<usize, Vec<VertexId>> = BTreeMap::new();
        for &v in &ids {
            groups.entry(uf.find(pos(v))).or_default().push(v);
        }
        let mut out: Vec<Vec<VertexId>> = groups.into_values().collect();
        out.sort();
        out
    }

    /// Trees that contain a terminal of `inst`, with uncovered terminals
    /// added as singleton trees.
    pub fn trees_spanning(&self, inst: &StpInstance) -> Vec<Vec<VertexId>> {
        let mut out: Vec<Vec<VertexId>> = self
            .trees()
            .into_iter()
            .filter(|t| t.iter().any(|&v| inst.is_terminal(v)))
            .collect();
        let covered: BTreeSet<VertexId> = out.iter().flatten().copied().collect();
        out.extend(
            inst.terminals()
                .iter()
                .filter(|t| !covered.contains(t))
                .map(|&t| vec![t]),
        );
        out.sort();
        out
    }

    pub fn cost(&self) -> Cost {
        self.components.iter().map(|c| c.cost()).sum()
    }

    pub fn cost_in(&self, metric: &MetricClosure) -> Cost {
        self.components.iter().map(|c| c.cost_in(metric)).sum()
    }

    /// Largest terminal (leaf) count over the components.
    pub fn max_terminals(&self) -> usize {
        self.components
            .iter()
            .map(|c| c.terminal_count())
            .max()
            .unwrap_or(0)
    }

    pub fn metric_edges(&self) -> impl Iterator<Item = &MetricEdge> {
        self.components.iter().flat_map(|c| c.edges().iter())
    }
}

/// Replaces every metric edge by its shortest path in `G` and merges the
/// result, skipping edges that would close a cycle. Copies of a vertex
/// collapse into that vertex.
pub fn embed_to_graph(forest: &RestrictedForest, metric: &MetricClosure) -> Result<SteinerForest> {
    embed_edges(forest.vertices(), forest.metric_edges().copied(), metric)
}

/// Embeds an arbitrary collection of metric edges, as [`embed_to_graph`].
pub fn embed_edges<V, E>(vertices: V, edges: E, metric: &MetricClosure) -> Result<SteinerForest>
where
    V: IntoIterator<Item = VertexId>,
    E: IntoIterator<Item = MetricEdge>,
{
    let mut path_edges = Vec::new();
    for e in edges {
        if metric.dist(e.u, e.v) >= INFINITE_COST {
            return Err(Error::Internal(format!(
                "metric edge ({}, {}) has no path in the graph",
                e.u + 1,
                e.v + 1
            )));
        }
        path_edges.extend(metric.path_edges(e.u, e.v).unwrap());
    }
    Ok(SteinerForest::from_parts(vertices, []).add_edges(path_edges))
}
