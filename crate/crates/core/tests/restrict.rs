mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use steiner_core::harness::{generate_instance, InstanceSpec, Topology};
use steiner_core::{
    restricted_st, restricted_st_pinned, two_approx, Cost, MetricClosure, Rational, SteinerForest,
    StpInstance, VertexId,
};

use common::floyd;

fn random_tree(seed: u64, n: usize) -> (StpInstance, SteinerForest) {
    let spec = InstanceSpec {
        n,
        terminal_fraction: 0.35,
        weight_min: 1,
        weight_max: 12,
        topology: Topology::RandomConnected { density: 0.15 },
    };
    let inst = generate_instance(seed, &spec).unwrap();
    let tree = two_approx(&inst, &MetricClosure::new(&inst)).unwrap();
    (inst, tree)
}

fn degree_in(result: &steiner_core::RestrictionResult, v: VertexId) -> usize {
    result
        .forest
        .components
        .iter()
        .map(|c| c.edges().iter().filter(|e| e.u == v || e.v == v).count())
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn branching_vertices_kept_and_path_terminals_bounded(seed in any::<u64>(), n in 6usize..=30, den in 1i64..=3) {
        let (inst, tree) = random_tree(seed, n);
        let xi = Rational::new(1, den as u64);
        let metric = MetricClosure::new(&inst);
        let res = restricted_st(&inst, &tree, &xi, &metric).unwrap();
        let spanned = res.forest.vertices();
        for &v in tree.vertices() {
            let deg = tree.degree(v);
            if !inst.is_terminal(v) && deg >= 3 {
                prop_assert!(spanned.contains(&v), "branching Steiner vertex {} dropped", v);
            }
            if inst.is_terminal(v) && deg == 2 {
                prop_assert!(degree_in(&res, v) <= 4, "terminal {} has degree {}", v, degree_in(&res, v));
            }
        }
        let d = floyd(&inst);
        let restricted: Cost = res.forest.components.iter().flat_map(|c| c.edges()).map(|e| d[e.u][e.v]).sum();
        prop_assert_eq!(restricted, res.restricted_cost);
        prop_assert!(restricted as u128 * den as u128 <= (den as u128 + 1) * tree.cost(&inst) as u128);
    }
}

#[test]
fn four_leaf_star_with_pairs_only() {
    let inst = StpInstance::new(5, (1..5).map(|t| (0, t, 1)), 1..5, 0).unwrap();
    let tree = SteinerForest::steiner_tree(&inst, (1..5).map(|t| (0, t))).unwrap();
    let metric = MetricClosure::new(&inst);
    let res = restricted_st(&inst, &tree, &Rational::from_integer(1), &metric).unwrap();
    assert_eq!(res.k(), 2);

    // Every 2-restricted tree on four terminals is a spanning tree of them
    // in the closure; enumerate all triples of terminal pairs.
    let d = floyd(&inst);
    let pairs: Vec<(usize, usize)> = (1..5)
        .flat_map(|a| (a + 1..5).map(move |b| (a, b)))
        .collect();
    let mut best = Cost::MAX;
    for mask in 0u32..1 << pairs.len() {
        if mask.count_ones() != 3 {
            continue;
        }
        let chosen: Vec<_> = (0..pairs.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| pairs[i])
            .collect();
        let mut uf = petgraph::unionfind::UnionFind::<usize>::new(5);
        if chosen.iter().all(|&(a, b)| uf.union(a, b)) {
            best = best.min(chosen.iter().map(|&(a, b)| d[a][b]).sum());
        }
    }
    assert_eq!(best, 6);
    assert!(res.restricted_cost >= best && res.restricted_cost <= 8);
    for c in &res.forest.components {
        assert!(c.leaves().len() <= 2);
    }
}

#[test]
fn pinned_middle_of_generated_paths() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(3..=12usize);
        let edges: Vec<_> = (0..n - 1)
            .map(|i| (i, i + 1, rng.random_range(1..=9)))
            .collect();
        // Endpoints plus a few interior terminals.
        let mut terminals = vec![0, n - 1];
        terminals.extend((1..n - 1).filter(|_| rng.random_bool(0.3)));
        let inst = StpInstance::new(n, edges, terminals, 0).unwrap();
        let tree = SteinerForest::steiner_tree(&inst, (0..n - 1).map(|i| (i, i + 1))).unwrap();
        let metric = MetricClosure::new(&inst);
        for v in (1..n - 1).filter(|&v| !inst.is_terminal(v)) {
            for den in 1..=3u64 {
                let xi = Rational::new(1, den);
                let res = restricted_st_pinned(&inst, &tree, &xi, v, &metric).unwrap();
                assert!(res.forest.contains_vertex(v), "seed {seed}, v {v}");
                assert!(
                    res.restricted_cost * den <= (den + 1) * tree.cost(&inst),
                    "seed {seed}, v {v}"
                );
                assert_eq!(res.k(), 1 << (den + 2));
            }
        }
    }
}
