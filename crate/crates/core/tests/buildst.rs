mod common;

use std::collections::BTreeSet;

use num_bigint::BigUint;
use steiner_core::{
    build_st, dreyfus_wagner, restricted_st, two_approx, BuildSt, Cost, ExactLimits, FullComponent,
    HBound, MetricClosure, MetricEdge, Rational, RestrictedForest, StpInstance, VertexId,
};

use common::{contracted_reconnection, desk_instance, floyd};

fn huge() -> BigUint {
    BigUint::from(1u32) << 40u32
}

#[test]
fn one_swap_recovers_the_optimum() {
    // Terminals 0, 1, 2. Hubs 3 and 4 give the optimum 0-3-1-4-2 of cost 4;
    // the detour 1-5-6-2 costs 9.
    let inst = StpInstance::new(
        7,
        [
            (0, 3, 1),
            (3, 1, 1),
            (1, 4, 1),
            (4, 2, 1),
            (1, 5, 3),
            (5, 6, 3),
            (6, 2, 3),
            (0, 2, 7),
        ],
        [0, 1, 2],
        0,
    )
    .unwrap();
    let metric = MetricClosure::new(&inst);
    let comp = |path: &[VertexId]| {
        FullComponent::new(
            path.windows(2)
                .map(|w| MetricEdge::in_metric(w[0], w[1], &metric))
                .collect(),
        )
        .unwrap()
    };
    let forest =
        RestrictedForest::new(vec![comp(&[0, 3, 1]), comp(&[1, 5, 6, 2])], BTreeSet::new());
    assert_eq!(forest.cost_in(&metric), 11);

    let limits = ExactLimits::default();
    let out = build_st(
        &inst,
        &forest,
        &HBound::new(huge(), Some(1)),
        &metric,
        &limits,
    )
    .unwrap();
    let opt = dreyfus_wagner(&inst, &metric, &limits).unwrap().cost;
    assert_eq!(opt, 4);
    assert!(!out.fallback);
    assert_eq!(out.cost, opt);
    let removed = &out.chosen.unwrap();
    assert_eq!(removed.len(), 1);
    assert!(forest.components[removed[0]].contains(5));
    assert!(out.tree.is_steiner_tree_of(&inst));

    // Two components and h = 5 take the from-scratch branch.
    let fallback = build_st(
        &inst,
        &forest,
        &HBound::uncapped(BigUint::from(5u32)),
        &metric,
        &limits,
    )
    .unwrap();
    assert!(fallback.fallback);
    assert_eq!(fallback.cost, opt);
}

/// Groups joined by the kept components, plus uncovered terminals.
fn groups(inst: &StpInstance, forest: &RestrictedForest) -> Vec<Vec<VertexId>> {
    let n = inst.vertex_count();
    let mut uf = petgraph::unionfind::UnionFind::<usize>::new(n);
    let mut present = BTreeSet::new();
    for e in forest.components.iter().flat_map(|c| c.edges()) {
        uf.union(e.u, e.v);
        present.insert(e.u);
        present.insert(e.v);
    }
    present.extend(inst.terminals().iter().copied());
    let mut by_root: std::collections::BTreeMap<usize, Vec<VertexId>> = Default::default();
    for v in present {
        by_root.entry(uf.find(v)).or_default().push(v);
    }
    by_root
        .into_values()
        .filter(|g| g.iter().any(|&v| inst.is_terminal(v)))
        .collect()
}

#[test]
fn swap_output_beats_every_explicit_witness() {
    let limits = ExactLimits::default();
    let mut witnesses = 0;
    for seed in 0..60u64 {
        let n = 6 + (seed % 4) as usize;
        let inst = desk_instance(seed, n, 3 + (seed % 3) as usize, seed);
        let metric = MetricClosure::new(&inst);
        let d = floyd(&inst);
        let start = two_approx(&inst, &metric).unwrap();
        let forest = restricted_st(&inst, &start, &Rational::from_integer(1), &metric)
            .unwrap()
            .forest;
        let m = forest.components.len();
        let engine = BuildSt::new(&inst, &metric, limits);
        let mut last: Option<Cost> = None;
        for h in 1..=3u64 {
            let out = engine.run(&forest, &HBound::new(huge(), Some(h))).unwrap();
            if let Some(prev) = last {
                assert!(out.cost <= prev, "seed {seed}: h = {h} is worse");
            }
            last = Some(out.cost);
            for rec in &out.candidates {
                // At most q - 1 full components in a minimal reconnection.
                assert!(
                    rec.reconnection_components < rec.trees.max(1),
                    "seed {seed}: {rec:?}"
                );
            }
            if out.fallback {
                continue;
            }
            for mask in 0u32..1 << m {
                if mask.count_ones() as u64 > h {
                    continue;
                }
                let removed: Vec<usize> = (0..m).filter(|&i| mask >> i & 1 == 1).collect();
                let kept = forest.without(&removed);
                let kept_cost: Cost = kept
                    .components
                    .iter()
                    .flat_map(|c| c.edges())
                    .map(|e| d[e.u][e.v])
                    .sum();
                let witness = kept_cost + contracted_reconnection(&inst, &groups(&inst, &kept));
                assert!(
                    out.cost <= witness,
                    "seed {seed}, removed {removed:?}: {} > {witness}",
                    out.cost
                );
                witnesses += 1;
            }
        }
    }
    assert!(witnesses > 500);
}
