//! All-pairs shortest paths with exact costs and canonical path recovery.

use crate::error::{Error, Result};
use crate::graph::{edge_key, Cost, EdgeKey, StpInstance, VertexId, INFINITE_COST};

/// Shortest-path distances `d` over a graph, with one fixed shortest path
/// per pair.
///
/// Among equal-cost paths the one with fewest hops wins; the predecessor of
/// `j` on the path from `i` is the smallest vertex id consistent with that.
#[derive(Clone, Debug)]
pub struct MetricClosure {
    n: usize,
    dist: Vec<Cost>,
    hops: Vec<u32>,
    pred: Vec<u32>,
    excluded: Option<EdgeKey>,
}

const NO_PRED: u32 = u32::MAX;

impl MetricClosure {
    pub fn new(inst: &StpInstance) -> Self {
        Self::build(inst, None)
    }

    /// The closure of `G - (u, v)`. Fails when some pair of terminals is no
    /// longer connected.
    pub fn excluding(inst: &StpInstance, u: VertexId, v: VertexId) -> Result<Self> {
        let key = edge_key(u, v);
        if !inst.has_edge(u, v) {
            return Err(Error::Validation(format!(
                "edge ({}, {}) does not exist",
                u + 1,
                v + 1
            )));
        }
        let m = Self::build(inst, Some(key));
        let t0 = inst.terminals()[0];
        if inst
            .terminals()
            .iter()
            .any(|&t| m.dist(t0, t) >= INFINITE_COST)
        {
            return Err(Error::DisconnectedAfterExclusion { u, v });
        }
        Ok(m)
    }

    fn build(inst: &StpInstance, excluded: Option<EdgeKey>) -> Self {
        let n = inst.vertex_count();
        let mut weights = vec![INFINITE_COST; n * n];
        for e in inst.edges() {
            if Some(e.key()) == excluded {
                continue;
            }
            weights[e.u * n + e.v] = e.cost;
            weights[e.v * n + e.u] = e.cost;
        }
        let mut m = Self::from_matrix(n, weights);
        m.excluded = excluded;
        m
    }

    /// Closure of an arbitrary undirected weighted graph given as a dense
    /// symmetric matrix (`INFINITE_COST` marks a missing edge).
    pub fn from_matrix(n: usize, weights: Vec<Cost>) -> Self {
        assert_eq!(weights.len(), n * n);
        let mut dist = weights.clone();
        let mut hops = vec![u32::MAX; n * n];
        for i in 0..n {
            for j in 0..n {
                if weights[i * n + j] < INFINITE_COST {
                    hops[i * n + j] = 1;
                }
            }
            dist[i * n + i] = 0;
            hops[i * n + i] = 0;
        }
        for k in 0..n {
            for i in 0..n {
                let dik = dist[i * n + k];
                if dik >= INFINITE_COST {
                    continue;
                }
                let hik = hops[i * n + k];
                for j in 0..n {
                    let dkj = dist[k * n + j];
                    if dkj >= INFINITE_COST {
                        continue;
                    }
                    let cand = (dik + dkj, hik + hops[k * n + j]);
                    if cand < (dist[i * n + j], hops[i * n + j]) {
                        dist[i * n + j] = cand.0;
                        hops[i * n + j] = cand.1;
                    }
                }
            }
        }
        let mut pred = vec![NO_PRED; n * n];
        for i in 0..n {
            for j in 0..n {
                if i == j || dist[i * n + j] >= INFINITE_COST {
                    continue;
                }
                let target = (dist[i * n + j], hops[i * n + j]);
                pred[i * n + j] = (0..n)
                    .find(|&w| {
                        w != j
                            && weights[w * n + j] < INFINITE_COST
                            && dist[i * n + w] < INFINITE_COST
                            && (dist[i * n + w] + weights[w * n + j], hops[i * n + w] + 1) == target
                    })
                    .expect("shortest path has a predecessor")
                    as u32;
            }
        }
        MetricClosure {
            n,
            dist,
            hops,
            pred,
            excluded: None,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Shortest-path distance; `INFINITE_COST` when unreachable.
    #[inline]
    pub fn dist(&self, a: VertexId, b: VertexId) -> Cost {
        self.dist[a * self.n + b]
    }

    pub fn hops(&self, a: VertexId, b: VertexId) -> u32 {
        self.hops[a * self.n + b]
    }

    pub fn excluded(&self) -> Option<EdgeKey> {
        self.excluded
    }

    /// The canonical shortest path from `a` to `b` as a vertex sequence.
    ///
    /// The path is fixed per unordered pair: `path(b, a)` is `path(a, b)`
    /// reversed.
    pub fn path(&self, a: VertexId, b: VertexId) -> Option<Vec<VertexId>> {
        if self.dist(a, b) >= INFINITE_COST {
            return None;
        }
        let (s, t) = edge_key(a, b);
        let mut out = vec![t];
        let mut cur = t;
        while cur != s {
            cur = self.pred[s * self.n + cur] as usize;
            out.push(cur);
        }
        if a == s {
            out.reverse();
        }
        Some(out)
    }

    /// Graph edges along [`MetricClosure::path`].
    pub fn path_edges(&self, a: VertexId, b: VertexId) -> Option<Vec<EdgeKey>> {
        let p = self.path(a, b)?;
        Some(p.windows(2).map(|w| edge_key(w[0], w[1])).collect())
    }
}
