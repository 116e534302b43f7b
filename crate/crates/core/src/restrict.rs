//! k-restriction of Steiner trees.
//!
//! A tree is cut into full components, each full component is rooted at a
//! terminal leaf and made binary with zero-cost copy nodes, and then cut at
//! every `r`-th level. For an internal node `w` let `P(w)` be the path that
//! leaves `w` through one child and keeps following the "continue" child of
//! each node below it down to a leaf; these paths are pairwise
//! edge-disjoint. A cut at `w` keeps `w` in the upper piece, hangs the
//! shortcut `(w, leaf(P(w)))` off it, and starts a new piece at `w`. Every
//! piece spans at most `2^r` terminals, and over the `r` possible cut
//! offsets the shortcut costs add up to at most the tree cost, so the
//! cheapest offset costs at most `(1 + 1/r)` times the component.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::components::{split_full, FullComponent, MetricEdge, RestrictedForest};
use crate::error::{Error, Result};
use crate::forest::SteinerForest;
use crate::graph::{edge_key, Cost, StpInstance, VertexId};
use crate::metric::MetricClosure;
use crate::{format_rational, Rational};

/// Output of a restriction together with the quantities it is checked
/// against.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RestrictionResult {
    pub forest: RestrictedForest,
    /// `r = ⌈1/ξ⌉`.
    pub levels: u32,
    /// `log2 k`: `r` for the plain variant, `r + 2` when pinned.
    pub k_exponent: u32,
    /// `c(S)` of the input tree.
    pub original_cost: Cost,
    /// `d(S_ξ)`.
    pub restricted_cost: Cost,
    pub pinned: Option<VertexId>,
}

impl RestrictionResult {
    /// The terminal bound `k` per component.
    pub fn k(&self) -> u128 {
        1u128 << self.k_exponent
    }
}

/// `⌈1/ξ⌉` for a positive rational `ξ`.
pub fn levels_for(xi: &Rational) -> Result<u32> {
    if xi.is_zero() {
        return Err(Error::InvalidInput("xi must be positive".into()));
    }
    let r = xi.denom().div_ceil(xi.numer());
    u32::try_from(r)
        .ok()
        .filter(|&r| r <= 120)
        .ok_or_else(|| Error::InvalidInput(format!("xi = {} is too small", format_rational(xi))))
}

/// Restricts the Steiner tree `tree` of `inst` to full components of at
/// most `2^⌈1/ξ⌉` terminals, with `d(S_ξ) ≤ (1 + ξ) c(S)`.
pub fn restricted_st(
    inst: &StpInstance,
    tree: &SteinerForest,
    xi: &Rational,
    metric: &MetricClosure,
) -> Result<RestrictionResult> {
    restrict(inst, tree, xi, metric, None)
}

/// As [`restricted_st`] with `k = 2^(2 + ⌈1/ξ⌉)`, and `v` guaranteed to be a
/// vertex of the output.
///
/// A Steiner vertex `v` of degree at most two is handled as a terminal
/// during the construction; afterwards the (at most two) components that
/// end in `v` are merged into one component with `v` inside it.
pub fn restricted_st_pinned(
    inst: &StpInstance,
    tree: &SteinerForest,
    xi: &Rational,
    v: VertexId,
    metric: &MetricClosure,
) -> Result<RestrictionResult> {
    if !tree.contains_vertex(v) {
        return Err(Error::VertexNotInSolution(v));
    }
    restrict(inst, tree, xi, metric, Some(v))
}

fn restrict(
    inst: &StpInstance,
    tree: &SteinerForest,
    xi: &Rational,
    metric: &MetricClosure,
    pinned: Option<VertexId>,
) -> Result<RestrictionResult> {
    let r = levels_for(xi)?;
    if !tree.vertices().is_empty() && !tree.is_tree() {
        return Err(Error::InvalidInput(
            "restriction input is not a tree".into(),
        ));
    }
    let original_cost = tree.cost(inst);
    let pin_as_terminal = pinned.filter(|&v| !inst.is_terminal(v) && tree.degree(v) <= 2);
    let is_term = |v: VertexId| inst.is_terminal(v) || Some(v) == pin_as_terminal;

    let trimmed = tree.pruned_by(is_term);
    let edges: Vec<MetricEdge> = trimmed
        .edges()
        .iter()
        .map(|&(a, b)| {
            MetricEdge::new(
                a,
                b,
                inst.cost(a, b).expect("tree edge missing from instance"),
            )
        })
        .collect();

    let mut components = Vec::new();
    for fc in split_full(&edges, is_term)? {
        components.extend(restrict_component(
            &fc,
            r,
            metric,
            pin_as_terminal,
            &is_term,
        )?);
    }

    if let Some(v) = pin_as_terminal {
        let (with_v, mut rest): (Vec<FullComponent>, Vec<FullComponent>) =
            components.into_iter().partition(|c| c.contains(v));
        if !with_v.is_empty() {
            let merged: Vec<MetricEdge> = with_v
                .iter()
                .flat_map(|c| c.edges().iter().copied())
                .collect();
            rest.push(FullComponent::new(merged)?);
        }
        components = rest;
    }

    let isolated: BTreeSet<VertexId> = if components.is_empty() {
        trimmed.vertices().iter().copied().collect()
    } else {
        BTreeSet::new()
    };
    let forest = RestrictedForest::new(components, isolated);
    let restricted_cost = forest.cost();
    let result = RestrictionResult {
        forest,
        levels: r,
        k_exponent: if pinned.is_some() { r + 2 } else { r },
        original_cost,
        restricted_cost,
        pinned,
    };
    check_postconditions(inst, tree, xi, &result)?;
    Ok(result)
}

/// Node of the rooted binary tree built from one full component.
struct Node {
    id: VertexId,
    weight: Cost,
    depth: u32,
    children: Vec<usize>,
}

struct Binary {
    nodes: Vec<Node>,
    /// Leaf reached by `P(w)`, for internal nodes.
    path_leaf: Vec<VertexId>,
}

fn restrict_component<F: Fn(VertexId) -> bool>(
    fc: &FullComponent,
    r: u32,
    metric: &MetricClosure,
    pin_as_terminal: Option<VertexId>,
    is_term: &F,
) -> Result<Vec<FullComponent>> {
    let compressed = compress_chains(fc, is_term);
    let in_metric = |edges: &BTreeSet<(VertexId, VertexId)>| -> Vec<MetricEdge> {
        edges
            .iter()
            .map(|&(a, b)| MetricEdge::in_metric(a, b, metric))
            .collect()
    };

    let mut best: Option<(Cost, Vec<FullComponent>)> = None;
    if fc.terminal_count() as u128 <= 1u128 << r {
        let keys: BTreeSet<_> = compressed.iter().map(|&(a, b, _)| edge_key(a, b)).collect();
        let comp = FullComponent::new(in_metric(&keys))?;
        best = Some((comp.cost(), vec![comp]));
    }

    let root = match pin_as_terminal {
        Some(v) if fc.contains(v) => v,
        _ => fc.leaves()[0],
    };
    let bin = binarize(&compressed, root);

    for offset in 0..r {
        let is_cut = |x: usize| {
            x != 0 && !bin.nodes[x].children.is_empty() && bin.nodes[x].depth % r == offset
        };
        let mut pieces = Vec::new();
        let mut total: Cost = 0;
        for start in (0..bin.nodes.len()).filter(|&x| x == 0 || is_cut(x)) {
            let mut keys = BTreeSet::new();
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &y in &bin.nodes[x].children {
                    let (a, b) = (bin.nodes[x].id, bin.nodes[y].id);
                    if a != b {
                        keys.insert(edge_key(a, b));
                    }
                    if is_cut(y) {
                        keys.insert(edge_key(b, bin.path_leaf[y]));
                    } else {
                        stack.push(y);
                    }
                }
            }
            let comp = FullComponent::new(in_metric(&keys))?;
            total += comp.cost();
            pieces.push(comp);
        }
        if best.as_ref().is_none_or(|(c, _)| total < *c) {
            best = Some((total, pieces));
        }
    }
    Ok(best.expect("at least one offset").1)
}

/// Replaces maximal chains through degree-two non-terminals by single edges
/// weighted with the chain cost.
fn compress_chains<F: Fn(VertexId) -> bool>(
    fc: &FullComponent,
    is_term: &F,
) -> Vec<(VertexId, VertexId, Cost)> {
    let mut adj: BTreeMap<VertexId, Vec<(VertexId, Cost)>> = BTreeMap::new();
    for e in fc.edges() {
        adj.entry(e.u).or_default().push((e.v, e.cost));
        adj.entry(e.v).or_default().push((e.u, e.cost));
    }
    let interior = |v: VertexId| !is_term(v) && adj[&v].len() == 2;
    let mut out = BTreeMap::new();
    for (&start, nbrs) in &adj {
        if interior(start) {
            continue;
        }
        for &(first, c0) in nbrs {
            let (mut prev, mut cur, mut cost) = (start, first, c0);
            while interior(cur) {
                let &(next, c) = adj[&cur].iter().find(|&&(w, _)| w != prev).unwrap();
                prev = cur;
                cur = next;
                cost += c;
            }
            out.insert(edge_key(start, cur), cost);
        }
    }
    out.into_iter().map(|((a, b), c)| (a, b, c)).collect()
}

fn binarize(edges: &[(VertexId, VertexId, Cost)], root: VertexId) -> Binary {
    let mut adj: BTreeMap<VertexId, Vec<(VertexId, Cost)>> = BTreeMap::new();
    for &(a, b, c) in edges {
        adj.entry(a).or_default().push((b, c));
        adj.entry(b).or_default().push((a, c));
    }
    let mut nodes = vec![Node {
        id: root,
        weight: 0,
        depth: 0,
        children: Vec::new(),
    }];
    let mut pending = vec![(0usize, root, usize::MAX)];
    while let Some((idx, x, parent)) = pending.pop() {
        let children: Vec<(VertexId, Cost)> = adj[&x]
            .iter()
            .copied()
            .filter(|&(y, _)| y != parent)
            .collect();
        attach(&mut nodes, idx, x, &children, &mut pending);
    }

    // Continue chains, bottom-up (children always follow their parent).
    let len = nodes.len();
    let mut chain_cost = vec![0 as Cost; len];
    let mut chain_leaf: Vec<VertexId> = nodes.iter().map(|n| n.id).collect();
    let mut path_leaf: Vec<VertexId> = nodes.iter().map(|n| n.id).collect();
    for x in (0..len).rev() {
        let ch = &nodes[x].children;
        match ch.len() {
            0 => {}
            1 => {
                let y = ch[0];
                chain_cost[x] = nodes[y].weight + chain_cost[y];
                chain_leaf[x] = chain_leaf[y];
                path_leaf[x] = chain_leaf[y];
            }
            _ => {
                let (a, b) = (ch[0], ch[1]);
                let va = nodes[a].weight + chain_cost[a];
                let vb = nodes[b].weight + chain_cost[b];
                let (side, cont) = if va <= vb { (a, b) } else { (b, a) };
                path_leaf[x] = chain_leaf[side];
                chain_cost[x] = va.max(vb);
                chain_leaf[x] = chain_leaf[cont];
            }
        }
    }
    Binary { nodes, path_leaf }
}

fn attach(
    nodes: &mut Vec<Node>,
    parent: usize,
    x: VertexId,
    children: &[(VertexId, Cost)],
    pending: &mut Vec<(usize, VertexId, VertexId)>,
) {
    let depth = nodes[parent].depth + 1;
    if children.len() <= 2 {
        for &(y, w) in children {
            let idx = push_node(nodes, parent, y, w, depth);
            pending.push((idx, y, x));
        }
        return;
    }
    let (left, right) = children.split_at(children.len() / 2);
    for half in [left, right] {
        if let [(y, w)] = half {
            let idx = push_node(nodes, parent, *y, *w, depth);
            pending.push((idx, *y, x));
        } else {
            let copy = push_node(nodes, parent, x, 0, depth);
            attach(nodes, copy, x, half, pending);
        }
    }
}

fn push_node(
    nodes: &mut Vec<Node>,
    parent: usize,
    id: VertexId,
    weight: Cost,
    depth: u32,
) -> usize {
    nodes.push(Node {
        id,
        weight,
        depth,
        children: Vec::new(),
    });
    let idx = nodes.len() - 1;
    nodes[parent].children.push(idx);
    idx
}

fn check_postconditions(
    inst: &StpInstance,
    tree: &SteinerForest,
    xi: &Rational,
    result: &RestrictionResult,
) -> Result<()> {
    let forest = &result.forest;
    let (p, q) = (*xi.numer() as u128, *xi.denom() as u128);
    if q * result.restricted_cost as u128 > (q + p) * result.original_cost as u128 {
        return Err(Error::CostBoundViolated {
            restricted: result.restricted_cost,
            original: result.original_cost,
            xi: format_rational(xi),
        });
    }
    let fail = |msg: String| Err(Error::RestrictionInvariant(msg));

    let k = 1u128 << result.levels;
    let k_pinned = result.k();
    for c in &forest.components {
        let bound = if result.pinned.is_some_and(|v| c.contains(v)) {
            k_pinned
        } else {
            k
        };
        if c.terminal_count() as u128 > bound {
            return fail(format!(
                "component with {} terminals exceeds k = {bound}",
                c.terminal_count()
            ));
        }
        let pin_leaf_ok = |v: VertexId| inst.is_terminal(v) || Some(v) == result.pinned;
        if !c.leaves().iter().all(|&v| pin_leaf_ok(v))
            || c.internals().iter().any(|&v| inst.is_terminal(v))
        {
            return fail("component is not full".into());
        }
    }

    let spanned = forest.vertices();
    for &v in tree.vertices() {
        if inst.is_terminal(v) && !spanned.contains(&v) {
            return fail(format!("terminal {} is not spanned", v + 1));
        }
        let deg = tree.degree(v);
        if !inst.is_terminal(v) && deg >= 3 && !spanned.contains(&v) {
            return fail(format!(
                "Steiner vertex {} of degree {deg} was dropped",
                v + 1
            ));
        }
        if inst.is_terminal(v) && deg == 2 {
            let count = forest.components.iter().filter(|c| c.contains(v)).count();
            if count > 4 {
                return fail(format!("terminal {} lies in {count} components", v + 1));
            }
        }
    }
    if let Some(v) = result.pinned {
        if !spanned.contains(&v) {
            return fail(format!("pinned vertex {} is missing", v + 1));
        }
    }
    if forest.trees().len() > 1 {
        return fail("restricted forest is disconnected".into());
    }
    Ok(())
}
