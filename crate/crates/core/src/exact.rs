//! Exact Steiner trees by the Dreyfus–Wagner subset recurrence, and optimal
//! reconnection of a forest into a single tree.

use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::components::{embed_edges, MetricEdge};
use crate::error::{Error, Result};
use crate::forest::SteinerForest;
use crate::graph::{edge_key, Cost, EdgeKey, StpInstance, VertexId, INFINITE_COST};
use crate::metric::MetricClosure;

/// Size limits for the exponential solvers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExactLimits {
    /// Largest terminal set handed to Dreyfus–Wagner.
    pub terminal_cap: usize,
    /// Largest number of trees `connect` will join.
    pub tree_cap: usize,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits {
            terminal_cap: 16,
            tree_cap: 16,
        }
    }
}

/// An optimal Steiner tree together with the metric tree it came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SteinerSolution {
    /// Tree of `G`, pruned to terminal leaves.
    pub tree: SteinerForest,
    /// `c(tree)`, equal to the optimum.
    pub cost: Cost,
    /// Distinct edges of the optimal metric tree.
    pub metric_edges: Vec<MetricEdge>,
}

/// A minimal set of metric edges joining a forest into one tree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Reconnection {
    pub edges: Vec<MetricEdge>,
    /// `d(H)`; equal to the optimum reconnection cost.
    pub cost: Cost,
}

/// Solves the Steiner problem on `terminals` in a metric given by `dist`.
///
/// Returns the optimum and a multiset of metric edges realising it. The
/// recurrence is `f(D, u) = min_v d(u, v) + min_{E ⊊ D} f(E, v) + f(D \ E, v)`,
/// with ties resolved towards the first candidate found.
pub fn dreyfus_wagner_metric<D>(n: usize, dist: D, terminals: &[VertexId]) -> (Cost, Vec<EdgeKey>)
where
    D: Fn(VertexId, VertexId) -> Cost,
{
    let k = terminals.len();
    if k <= 1 {
        return (0, Vec::new());
    }
    let full = (1usize << k) - 1;
    let mut f = vec![INFINITE_COST; (full + 1) * n];
    let mut from = vec![0u32; (full + 1) * n];
    let mut split = vec![0u32; (full + 1) * n];
    let mut g = vec![INFINITE_COST; n];

    for (i, &t) in terminals.iter().enumerate() {
        let row = (1 << i) * n;
        for u in 0..n {
            f[row + u] = dist(t, u).min(INFINITE_COST);
            from[row + u] = t as u32;
        }
    }

    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        let row = mask * n;
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        g.fill(INFINITE_COST);
        // Submasks of `rest` in ascending order, excluding `rest` itself.
        let mut s = 0usize;
        loop {
            if s == rest {
                break;
            }
            let a = low | s;
            let b = mask ^ a;
            for v in 0..n {
                let c = f[a * n + v].saturating_add(f[b * n + v]);
                if c < g[v] {
                    g[v] = c;
                    split[row + v] = a as u32;
                }
            }
            s = (s.wrapping_sub(rest)) & rest;
        }
        for u in 0..n {
            let mut best = INFINITE_COST;
            let mut arg = u;
            for (v, &gv) in g.iter().enumerate() {
                if gv >= INFINITE_COST {
                    continue;
                }
                let c = gv.saturating_add(dist(v, u));
                if c < best {
                    best = c;
                    arg = v;
                }
            }
            f[row + u] = best;
            from[row + u] = arg as u32;
        }
    }

    let root = terminals[0];
    let cost = f[full * n + root];
    if cost >= INFINITE_COST {
        return (INFINITE_COST, Vec::new());
    }
    let mut edges = Vec::new();
    let mut stack = vec![(full, root)];
    while let Some((mask, u)) = stack.pop() {
        let v = from[mask * n + u] as usize;
        if v != u {
            edges.push(edge_key(u, v));
        }
        if mask.count_ones() >= 2 {
            let a = split[mask * n + v] as usize;
            stack.push((a, v));
            stack.push((mask ^ a, v));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    (cost, edges)
}

/// Minimum Steiner tree of `inst` over the metric closure.
pub fn dreyfus_wagner(
    inst: &StpInstance,
    metric: &MetricClosure,
    limits: &ExactLimits,
) -> Result<SteinerSolution> {
    let terminals = inst.terminals();
    if terminals.len() > limits.terminal_cap {
        return Err(Error::TerminalCapExceeded {
            terminals: terminals.len(),
            cap: limits.terminal_cap,
        });
    }
    let (opt, edges) =
        dreyfus_wagner_metric(inst.vertex_count(), |a, b| metric.dist(a, b), terminals);
    if opt >= INFINITE_COST {
        return Err(Error::Internal(
            "terminals are not connected in the metric".into(),
        ));
    }
    let metric_edges: Vec<MetricEdge> = edges
        .iter()
        .map(|&(a, b)| MetricEdge::in_metric(a, b, metric))
        .collect();
    let tree = embed_edges(
        terminals.iter().copied(),
        metric_edges.iter().copied(),
        metric,
    )?
    .pruned(inst);
    let cost = tree.cost(inst);
    if cost != opt || !tree.is_steiner_tree_of(inst) {
        return Err(Error::Internal(format!(
            "embedded optimum costs {cost}, expected {opt}"
        )));
    }
    Ok(SteinerSolution {
        tree,
        cost,
        metric_edges,
    })
}

/// Cheapest set of metric edges that joins the given vertex-disjoint trees.
///
/// Each tree is contracted to a virtual terminal linked to its vertices by
/// zero-cost edges; Dreyfus–Wagner runs on the virtual terminals and the
/// real hops of the solution form the reconnection.
pub fn connect_trees(
    metric: &MetricClosure,
    trees: &[Vec<VertexId>],
    tree_cap: usize,
) -> Result<Reconnection> {
    let q = trees.len();
    if q <= 1 {
        return Ok(Reconnection::default());
    }
    if q > tree_cap {
        return Err(Error::TreeCapExceeded {
            trees: q,
            cap: tree_cap,
        });
    }
    let n = metric.vertex_count();
    let big = n + q;
    let mut weights = vec![INFINITE_COST; big * big];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                weights[a * big + b] = metric.dist(a, b);
            }
        }
    }
    for (i, tree) in trees.iter().enumerate() {
        for &v in tree {
            weights[(n + i) * big + v] = 0;
            weights[v * big + n + i] = 0;
        }
    }
    let aug = MetricClosure::from_matrix(big, weights);
    let virtuals: Vec<VertexId> = (n..big).collect();
    let (opt, dw_edges) = dreyfus_wagner_metric(big, |a, b| aug.dist(a, b), &virtuals);
    if opt >= INFINITE_COST {
        return Err(Error::Internal(
            "forest trees cannot be connected in the metric".into(),
        ));
    }

    let mut hops = BTreeSet::new();
    for (a, b) in dw_edges {
        for (x, y) in aug.path_edges(a, b).expect("finite augmented distance") {
            if x < n && y < n && x != y {
                hops.insert(edge_key(x, y));
            }
        }
    }

    let mut label: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (i, tree) in trees.iter().enumerate() {
        for &v in tree {
            label.insert(v, i);
        }
    }
    let edges = minimal_reconnection(
        &label,
        q,
        hops.into_iter()
            .map(|(a, b)| MetricEdge::in_metric(a, b, metric)),
    );
    let cost: Cost = edges.iter().map(|e| e.cost).sum();
    if cost != opt {
        return Err(Error::Internal(format!(
            "reconnection costs {cost}, expected {opt}"
        )));
    }
    Ok(Reconnection { edges, cost })
}

/// Reduces a connecting edge set to an inclusion-minimal one: cycle edges
/// are skipped in canonical order, then edges are deleted from the most
/// expensive down while the trees stay connected.
fn minimal_reconnection<I>(label: &BTreeMap<VertexId, usize>, q: usize, edges: I) -> Vec<MetricEdge>
where
    I: IntoIterator<Item = MetricEdge>,
{
    let mut ids: BTreeMap<VertexId, usize> = BTreeMap::new();
    let node = |v: VertexId, ids: &mut BTreeMap<VertexId, usize>| -> usize {
        if let Some(&t) = label.get(&v) {
            return t;
        }
        let next = q + ids.len();
        *ids.entry(v).or_insert(next)
    };
    let mut candidates: Vec<(usize, usize, MetricEdge)> = Vec::new();
    for e in edges {
        let a = node(e.u, &mut ids);
        let b = node(e.v, &mut ids);
        candidates.push((a, b, e));
    }
    candidates.sort_by_key(|c| c.2.key());
    let size = q + ids.len();

    let mut uf = UnionFind::<usize>::new(size);
    let mut kept: Vec<(usize, usize, MetricEdge)> = candidates
        .into_iter()
        .filter(|&(a, b, _)| uf.union(a, b))
        .collect();

    kept.sort_by(|x, y| y.2.cost.cmp(&x.2.cost).then(y.2.key().cmp(&x.2.key())));
    let mut i = 0;
    while i < kept.len() {
        let mut uf = UnionFind::<usize>::new(size);
        for (j, &(a, b, _)) in kept.iter().enumerate() {
            if j != i {
                uf.union(a, b);
            }
        }
        if (1..q).all(|t| uf.equiv(0, t)) {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    let mut out: Vec<MetricEdge> = kept.into_iter().map(|(_, _, e)| e).collect();
    out.sort();
    out
}

/// `Connect(I, F)` for a forest of `G`: the cheapest augmentation into a
/// Steiner tree of `inst`, embedded back into `G`.
///
/// Terminal-free trees of `forest` are ignored and uncovered terminals are
/// treated as singleton trees.
pub fn connect(
    inst: &StpInstance,
    forest: &SteinerForest,
    metric: &MetricClosure,
    limits: &ExactLimits,
) -> Result<(SteinerForest, Reconnection)> {
    let mut trees: Vec<Vec<VertexId>> = forest
        .trees()
        .into_iter()
        .filter(|t| t.iter().any(|&v| inst.is_terminal(v)))
        .collect();
    let kept: BTreeSet<VertexId> = trees.iter().flatten().copied().collect();
    trees.extend(
        inst.terminals()
            .iter()
            .filter(|t| !kept.contains(t))
            .map(|&t| vec![t]),
    );
    trees.sort();
    let reconnection = connect_trees(metric, &trees, limits.tree_cap)?;
    let base = SteinerForest::from_parts(
        kept.iter().copied().chain(inst.terminals().iter().copied()),
        forest
            .edges()
            .iter()
            .copied()
            .filter(|(a, _)| kept.contains(a)),
    );
    let mut path_edges = Vec::new();
    for e in &reconnection.edges {
        path_edges.extend(metric.path_edges(e.u, e.v).expect("finite metric edge"));
    }
    let tree = base.add_edges(path_edges).pruned(inst);
    Ok((tree, reconnection))
}
