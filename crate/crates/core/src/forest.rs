//! Forests of the input graph and the edge addition / removal algebra.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::graph::{edge_key, Cost, EdgeKey, StpInstance, VertexId};

/// A forest of `G`, stored as a vertex set plus an edge set.
///
/// Isolated vertices are kept explicitly, so `(R, ∅)` is representable.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SteinerForest {
    vertices: BTreeSet<VertexId>,
    edges: BTreeSet<EdgeKey>,
}

impl SteinerForest {
    pub fn empty() -> Self {
        Self::default()
    }

    /// The forest `(R, ∅)`.
    pub fn terminals_only(inst: &StpInstance) -> Self {
        SteinerForest {
            vertices: inst.terminals().iter().copied().collect(),
            edges: BTreeSet::new(),
        }
    }

    /// Builds a forest from explicit vertices and edges without any checks
    /// beyond collecting edge endpoints into the vertex set.
    pub fn from_parts<V, E>(vertices: V, edges: E) -> Self
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = EdgeKey>,
    {
        let mut forest = SteinerForest {
            vertices: vertices.into_iter().collect(),
            edges: BTreeSet::new(),
        };
        for (a, b) in edges {
            forest.vertices.insert(a);
            forest.vertices.insert(b);
            forest.edges.insert(edge_key(a, b));
        }
        forest
    }

    /// Validates that `edges` form a Steiner tree of `inst`: a tree of `G`
    /// spanning every terminal whose leaves are all terminals.
    pub fn steiner_tree<E>(inst: &StpInstance, edges: E) -> Result<Self>
    where
        E: IntoIterator<Item = EdgeKey>,
    {
        let tree = Self::from_parts(inst.terminals().iter().copied(), edges);
        tree.check_steiner_tree(inst)?;
        Ok(tree)
    }

    pub fn check_steiner_tree(&self, inst: &StpInstance) -> Result<()> {
        if let Some(&(a, b)) = self.edges.iter().find(|&&(a, b)| !inst.has_edge(a, b)) {
            return Err(Error::Validation(format!(
                "solution edge ({}, {}) is not in the graph",
                a + 1,
                b + 1
            )));
        }
        if let Some(&t) = inst
            .terminals()
            .iter()
            .find(|&&t| !self.vertices.contains(&t))
        {
            return Err(Error::Validation(format!(
                "solution does not span terminal {}",
                t + 1
            )));
        }
        if !self.is_tree() {
            return Err(Error::Validation("solution is not a tree".into()));
        }
        if let Some(v) = self.leaves().into_iter().find(|&v| !inst.is_terminal(v)) {
            return Err(Error::Validation(format!(
                "solution has a non-terminal leaf {}",
                v + 1
            )));
        }
        Ok(())
    }

    pub fn is_steiner_tree_of(&self, inst: &StpInstance) -> bool {
        self.check_steiner_tree(inst).is_ok()
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn edges(&self) -> &BTreeSet<EdgeKey> {
        &self.edges
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn contains_edge(&self, a: VertexId, b: VertexId) -> bool {
        self.edges.contains(&edge_key(a, b))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn cost(&self, inst: &StpInstance) -> Cost {
        self.edges
            .iter()
            .map(|&(a, b)| inst.cost(a, b).expect("forest edge missing from instance"))
            .sum()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    pub fn adjacency(&self) -> BTreeMap<VertexId, Vec<VertexId>> {
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> =
            self.vertices.iter().map(|&v| (v, Vec::new())).collect();
        for &(a, b) in &self.edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        adj
    }

    /// Vertices of degree exactly one.
    pub fn leaves(&self) -> Vec<VertexId> {
        self.adjacency()
            .into_iter()
            .filter(|(_, n)| n.len() == 1)
            .map(|(v, _)| v)
            .collect()
    }

    /// `F + E'`: scans `E' \ E(F)` in ascending `(min, max)` order and adds each
    /// edge that keeps the forest acyclic.
    pub fn add_edges<E>(&self, edges: E) -> Self
    where
        E: IntoIterator<Item = EdgeKey>,
    {
        let extra: BTreeSet<EdgeKey> = edges
            .into_iter()
            .filter(|&(a, b)| a != b)
            .map(|(a, b)| edge_key(a, b))
            .filter(|k| !self.edges.contains(k))
            .collect();
        let mut out = self.clone();
        if extra.is_empty() {
            return out;
        }
        for &(a, b) in &extra {
            out.vertices.insert(a);
            out.vertices.insert(b);
        }
        let ids: Vec<VertexId> = out.vertices.iter().copied().collect();
        let pos = |v: VertexId| ids.binary_search(&v).unwrap();
        let mut uf = UnionFind::<usize>::new(ids.len());
        for &(a, b) in &self.edges {
            uf.union(pos(a), pos(b));
        }
        for (a, b) in extra {
            if uf.union(pos(a), pos(b)) {
                out.edges.insert((a, b));
            }
        }
        out
    }

    /// `F - E'`: removes the edges, prunes non-terminal leaves and drops
    /// terminal-free trees.
    pub fn remove_edges<E>(&self, edges: E, inst: &StpInstance) -> Self
    where
        E: IntoIterator<Item = EdgeKey>,
    {
        self.split_off(edges).pruned(inst)
    }

    /// Removes the edges but keeps every vertex, including the ones that
    /// become isolated or non-terminal leaves.
    pub fn split_off<E>(&self, edges: E) -> Self
    where
        E: IntoIterator<Item = EdgeKey>,
    {
        let mut out = self.clone();
        for (a, b) in edges {
            out.edges.remove(&edge_key(a, b));
        }
        out
    }

    /// Repeatedly deletes non-terminal vertices of degree at most one.
    pub fn pruned(&self, inst: &StpInstance) -> Self {
        self.pruned_by(|v| inst.is_terminal(v))
    }

    pub fn pruned_by<F: Fn(VertexId) -> bool>(&self, keep: F) -> Self {
        let mut adj = self.adjacency();
        let mut queue: VecDeque<VertexId> = adj
            .iter()
            .filter(|(v, n)| n.len() <= 1 && !keep(**v))
            .map(|(v, _)| *v)
            .collect();
        while let Some(v) = queue.pop_front() {
            let Some(nbrs) = adj.remove(&v) else { continue };
            for w in nbrs {
                if let Some(list) = adj.get_mut(&w) {
                    list.retain(|&x| x != v);
                    if list.len() <= 1 && !keep(w) {
                        queue.push_back(w);
                    }
                }
            }
        }
        let vertices: BTreeSet<VertexId> = adj.keys().copied().collect();
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|(a, b)| vertices.contains(a) && vertices.contains(b))
            .collect();
        SteinerForest { vertices, edges }
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn trees(&self) -> Vec<Vec<VertexId>> {
        let adj = self.adjacency();
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in adj.keys() {
            if !seen.insert(start) {
                continue;
            }
            let mut comp = vec![start];
            let mut stack = vec![start];
            while let Some(v) = stack.pop() {
                for &w in &adj[&v] {
                    if seen.insert(w) {
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// The sub-forest induced by one connected component.
    pub fn tree_containing(&self, v: VertexId) -> Option<SteinerForest> {
        let comp: BTreeSet<VertexId> = self
            .trees()
            .into_iter()
            .find(|c| c.contains(&v))?
            .into_iter()
            .collect();
        let edges: Vec<EdgeKey> = self
            .edges
            .iter()
            .copied()
            .filter(|(a, _)| comp.contains(a))
            .collect();
        Some(SteinerForest::from_parts(comp, edges))
    }

    pub fn is_tree(&self) -> bool {
        !self.vertices.is_empty()
            && self.edges.len() + 1 == self.vertices.len()
            && self.trees().len() == 1
    }

    /// The unique path between `a` and `b`, as a vertex sequence.
    pub fn tree_path(&self, a: VertexId, b: VertexId) -> Option<Vec<VertexId>> {
        if !self.vertices.contains(&a) || !self.vertices.contains(&b) {
            return None;
        }
        let adj = self.adjacency();
        let mut parent = BTreeMap::new();
        parent.insert(a, a);
        let mut queue = VecDeque::from([a]);
        while let Some(v) = queue.pop_front() {
            if v == b {
                break;
            }
            for &w in &adj[&v] {
                if let std::collections::btree_map::Entry::Vacant(e) = parent.entry(w) {
                    e.insert(v);
                    queue.push_back(w);
                }
            }
        }
        parent.get(&b)?;
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = parent[&cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }
}
