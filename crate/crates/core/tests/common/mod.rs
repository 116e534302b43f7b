//! Independent brute-force references shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use petgraph::unionfind::UnionFind;
use steiner_core::harness::{generate_instance, InstanceSpec, Topology};
use steiner_core::{Cost, EdgeKey, FullComponent, StpInstance, VertexId, INFINITE_COST};

/// Plain Floyd–Warshall over the input graph.
pub fn floyd(inst: &StpInstance) -> Vec<Vec<Cost>> {
    let n = inst.vertex_count();
    let mut d = vec![vec![INFINITE_COST; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for e in inst.edges() {
        d[e.u][e.v] = d[e.u][e.v].min(e.cost);
        d[e.v][e.u] = d[e.v][e.u].min(e.cost);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k].saturating_add(d[k][j]);
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Minimum spanning tree cost of the complete graph on `nodes`.
pub fn mst_cost(nodes: &[usize], d: &[Vec<Cost>]) -> Cost {
    if nodes.is_empty() {
        return 0;
    }
    let mut in_tree = vec![false; nodes.len()];
    let mut key = vec![INFINITE_COST; nodes.len()];
    key[0] = 0;
    let mut total = 0;
    for _ in 0..nodes.len() {
        let i = (0..nodes.len())
            .filter(|&i| !in_tree[i])
            .min_by_key(|&i| key[i])
            .unwrap();
        in_tree[i] = true;
        total += key[i];
        for j in 0..nodes.len() {
            if !in_tree[j] {
                key[j] = key[j].min(d[nodes[i]][nodes[j]]);
            }
        }
    }
    total
}

/// Steiner optimum over a distance matrix: min over every optional node
/// set of the MST on `required ∪ set`.
pub fn subset_mst(d: &[Vec<Cost>], required: &[usize], optional: &[usize]) -> Cost {
    (0u32..1 << optional.len())
        .map(|mask| {
            let mut nodes = required.to_vec();
            nodes.extend(
                (0..optional.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| optional[i]),
            );
            mst_cost(&nodes, d)
        })
        .min()
        .unwrap()
}

/// Cheapest edge set `X ⊆ E(G) ∖ base` such that `base ∪ X` joins all of
/// `groups`, found by enumerating every subset of the candidate edges.
pub fn literal_reconnection(
    inst: &StpInstance,
    base: &BTreeSet<EdgeKey>,
    groups: &[Vec<VertexId>],
) -> Cost {
    let candidates: Vec<(EdgeKey, Cost)> = inst
        .edges()
        .iter()
        .filter(|e| !base.contains(&e.key()))
        .map(|e| (e.key(), e.cost))
        .collect();
    assert!(
        candidates.len() <= 20,
        "too many candidate edges for enumeration"
    );
    let anchors: Vec<VertexId> = groups.iter().map(|g| g[0]).collect();
    let mut best = INFINITE_COST;
    for mask in 0u32..1 << candidates.len() {
        let cost: Cost = (0..candidates.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| candidates[i].1)
            .sum();
        if cost >= best {
            continue;
        }
        let mut uf = UnionFind::<usize>::new(inst.vertex_count());
        for &(a, b) in base {
            uf.union(a, b);
        }
        for (i, &((a, b), _)) in candidates.iter().enumerate() {
            if mask >> i & 1 == 1 {
                uf.union(a, b);
            }
        }
        if anchors.iter().all(|&a| uf.equiv(a, anchors[0])) {
            best = cost;
        }
    }
    best
}

/// The same minimum computed on the graph with every group contracted to
/// one node: a Steiner problem whose required nodes are the groups.
pub fn contracted_reconnection(inst: &StpInstance, groups: &[Vec<VertexId>]) -> Cost {
    let n = inst.vertex_count();
    let mut node_of: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (i, g) in groups.iter().enumerate() {
        for &v in g {
            node_of.insert(v, i);
        }
    }
    let mut next = groups.len();
    for v in 0..n {
        node_of.entry(v).or_insert_with(|| {
            next += 1;
            next - 1
        });
    }
    let size = next;
    let mut d = vec![vec![INFINITE_COST; size]; size];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for e in inst.edges() {
        let (a, b) = (node_of[&e.u], node_of[&e.v]);
        if a != b {
            d[a][b] = d[a][b].min(e.cost);
            d[b][a] = d[b][a].min(e.cost);
        }
    }
    for k in 0..size {
        for i in 0..size {
            for j in 0..size {
                let via = d[i][k].saturating_add(d[k][j]);
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    let required: Vec<usize> = (0..groups.len()).collect();
    let optional: Vec<usize> = (groups.len()..size).collect();
    subset_mst(&d, &required, &optional)
}

/// A connected instance with exactly `k` terminals.
pub fn desk_instance(seed: u64, n: usize, k: usize, shape: u64) -> StpInstance {
    let topology = match shape % 3 {
        0 => Topology::RandomConnected { density: 0.35 },
        1 => Topology::Grid,
        _ => Topology::TreePlusChords { chords: n / 2 },
    };
    let spec = InstanceSpec {
        n,
        terminal_fraction: k as f64 / n as f64,
        weight_min: 1,
        weight_max: 9,
        topology,
    };
    let inst = generate_instance(seed, &spec).unwrap();
    assert_eq!(inst.terminals().len(), k);
    inst
}

/// Leaves of a component, recomputed from its edge list.
pub fn leaves_of(c: &FullComponent) -> Vec<VertexId> {
    let mut degree: BTreeMap<VertexId, usize> = BTreeMap::new();
    for e in c.edges() {
        *degree.entry(e.u).or_default() += 1;
        *degree.entry(e.v).or_default() += 1;
    }
    degree
        .into_iter()
        .filter(|&(_, d)| d == 1)
        .map(|(v, _)| v)
        .collect()
}
