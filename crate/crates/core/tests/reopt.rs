mod common;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use steiner_core::harness::{generate_scenario, oracle_solve, SolutionSource};
use steiner_core::reopt::find_pstar;
use steiner_core::{
    reoptimize, two_approx, Cost, MetricClosure, Mode, Modification, Rational, ReoptConfig,
    ScenarioFile, ScenarioKind, SteinerForest, StpInstance, VertexId,
};

use common::{desk_instance, floyd};

fn optimum(inst: &StpInstance) -> SteinerForest {
    oracle_solve(inst).unwrap().tree(inst)
}

fn run(
    base: &StpInstance,
    solution: SteinerForest,
    m: Modification,
) -> (StpInstance, steiner_core::ReoptOutcome) {
    let task = ScenarioFile::new(base.clone(), solution, m, Rational::from_integer(1)).unwrap();
    let out = reoptimize(&task, &ReoptConfig::default()).unwrap();
    let modified = task.modified_instance().unwrap();
    assert!(out.tree.is_steiner_tree_of(&modified));
    assert_eq!(out.tree.cost(&modified), out.cost);
    (modified, out)
}

/// `inst` with an extra vertex hanging off `anchor` by one edge.
fn with_pendant(inst: &StpInstance, anchor: VertexId, cost: Cost, terminal: bool) -> StpInstance {
    let n = inst.vertex_count();
    let mut edges: Vec<_> = inst.edges().iter().map(|e| (e.u, e.v, e.cost)).collect();
    edges.push((anchor, n, cost));
    let mut terminals = inst.terminals().to_vec();
    if terminal {
        terminals.push(n);
    }
    StpInstance::new(n + 1, edges, terminals, 0).unwrap()
}

#[test]
fn terminal_add_far_vertex() {
    for seed in 0..40u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let core = desk_instance(seed, 6, 3, seed);
        let anchor = rng.random_range(0..6);
        let base = with_pendant(&core, anchor, 50, false);
        let s = optimum(&base);
        let (modified, out) = run(&base, s.clone(), Modification::TerminalAdd { t: 6 });
        let d = floyd(&modified);
        let nearest = base.terminals().iter().map(|&r| d[6][r]).min().unwrap();
        assert!(out.cost <= s.cost(&base) + nearest, "seed {seed}");
        assert_eq!(
            out.cost,
            oracle_solve(&modified).unwrap().cost,
            "seed {seed}"
        );
    }
}

#[test]
fn terminal_add_on_six_vertices_is_exact() {
    for seed in 0..40u64 {
        let base = desk_instance(seed, 6, 3, seed);
        let task = generate_scenario(
            seed,
            &base,
            ScenarioKind::TerminalAdd,
            SolutionSource::Optimal,
        )
        .unwrap();
        let out = reoptimize(&task, &ReoptConfig::default()).unwrap();
        assert_eq!(
            out.cost,
            oracle_solve(&out.instance).unwrap().cost,
            "seed {seed}"
        );
        assert_eq!(out.mode(), Mode::Guaranteed);
        assert!(out.audit.iter().all(|s| s.build.fallback));
    }
}

#[test]
fn edge_increase_huge_and_tiny() {
    let mut huge_checked = 0;
    let mut tiny_checked = 0;
    for seed in 0..60u64 {
        let base = desk_instance(seed, 7, 3, seed);
        let s = optimum(&base);
        let total: Cost = base.edges().iter().map(|e| e.cost).sum();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tree_edges: Vec<_> = s.edges().iter().copied().collect();
        let Some(&(u, v)) = tree_edges.choose(&mut rng) else {
            continue;
        };

        let (modified, out) = run(
            &base,
            s.clone(),
            Modification::EdgeInc {
                u,
                v,
                delta: total * 10,
            },
        );
        let opt = oracle_solve(&modified).unwrap().cost;
        assert_eq!(out.cost, opt, "seed {seed}");
        if MetricClosure::excluding(&base, u, v).is_ok() {
            assert!(
                !out.tree.contains_edge(u, v),
                "seed {seed}: deleted edge still used"
            );
            huge_checked += 1;
        }

        let (modified, out) = run(&base, s.clone(), Modification::EdgeInc { u, v, delta: 1 });
        let input = s.cost(&modified);
        let opt = oracle_solve(&modified).unwrap().cost;
        assert!(out.cost <= input);
        if opt == input {
            assert_eq!(out.cost, input, "seed {seed}");
            tiny_checked += 1;
        }
    }
    assert!(
        huge_checked > 10 && tiny_checked > 10,
        "{huge_checked} {tiny_checked}"
    );
}

#[test]
fn terminal_remove_leaf_spur_and_pair() {
    for seed in 0..40u64 {
        let base = desk_instance(seed, 7, 4, seed);
        let s = optimum(&base);
        let leaf = *s.leaves().first().unwrap();
        let (modified, out) = run(&base, s.clone(), Modification::TerminalRemove { t: leaf });
        assert_eq!(
            out.cost,
            oracle_solve(&modified).unwrap().cost,
            "seed {seed}"
        );

        // A spur of three Steiner vertices ending in the removed terminal.
        let core = desk_instance(seed, 6, 3, seed + 1);
        let mut edges: Vec<_> = core.edges().iter().map(|e| (e.u, e.v, e.cost)).collect();
        edges.extend([(core.terminals()[0], 6, 2), (6, 7, 2), (7, 8, 2), (8, 9, 2)]);
        let mut terminals = core.terminals().to_vec();
        terminals.push(9);
        let spurred = StpInstance::new(10, edges, terminals, 0).unwrap();
        let s = optimum(&spurred);
        let (modified, out) = run(&spurred, s.clone(), Modification::TerminalRemove { t: 9 });
        let opt = oracle_solve(&modified).unwrap().cost;
        assert_eq!(out.cost, opt, "seed {seed}");
        assert!(
            (6..10).all(|v| !out.tree.contains_vertex(v)),
            "seed {seed}: spur kept"
        );
    }
    let pair = StpInstance::new(3, [(0, 1, 4), (1, 2, 5)], [0, 2], 0).unwrap();
    let (_, out) = run(&pair, optimum(&pair), Modification::TerminalRemove { t: 2 });
    assert_eq!(out.cost, 0);
    assert_eq!(out.tree.vertices().len(), 1);
}

#[test]
fn edge_decrease_free_edge_and_no_gain() {
    let (mut used, mut unchanged) = (0, 0);
    for seed in 0..60u64 {
        let base = desk_instance(seed, 7, 3, seed);
        let s = optimum(&base);
        let input = s.cost(&base);
        for e in base
            .edges()
            .iter()
            .filter(|e| !s.contains_edge(e.u, e.v))
            .take(3)
        {
            let m = Modification::EdgeDec {
                u: e.u,
                v: e.v,
                delta: e.cost,
            };
            let (modified, out) = run(&base, s.clone(), m);
            let opt = oracle_solve(&modified).unwrap().cost;
            assert_eq!(out.cost, opt, "seed {seed}");
            assert!(out.cost <= input);
            if opt < input {
                assert!(
                    out.tree.contains_edge(e.u, e.v),
                    "seed {seed}: gain without the edge"
                );
                used += 1;
            } else {
                assert_eq!(out.cost, input);
                unchanged += 1;
            }
        }
        // On-tree decreases keep S optimal.
        if let Some(&(u, v)) = s.edges().iter().next() {
            let delta = base.cost(u, v).unwrap();
            let (modified, out) = run(&base, s.clone(), Modification::EdgeDec { u, v, delta });
            assert_eq!(out.cost, s.cost(&modified));
            assert_eq!(out.cost, oracle_solve(&modified).unwrap().cost);
        }
    }
    assert!(used > 5 && unchanged > 5, "{used} {unchanged}");
}

#[test]
fn pstar_satisfies_the_removal_inequality() {
    let mut premises = 0;
    for seed in 0..300u64 {
        let n = 6 + (seed % 5) as usize;
        let base = desk_instance(seed, n, 3 + (seed % 3) as usize, seed);
        let s = optimum(&base);
        let c_opt = s.cost(&base);
        for &t in base.terminals() {
            let modified = base.with_terminal(t, false).unwrap();
            let c_new = oracle_solve(&modified).unwrap().cost;
            for den in [10u64, 2, 1] {
                // 1 + ξ = (den + 1) / den.
                if den * c_opt <= (den + 1) * c_new {
                    continue;
                }
                premises += 1;
                let r = den as usize;
                let p = find_pstar(&s, t, 1 + r, &base).unwrap();
                let c_p: Cost = p.edges().map(|(a, b)| base.cost(a, b).unwrap()).sum();
                assert!(
                    den * c_p + (den + 1) * c_new >= den * c_opt,
                    "seed {seed}, t {t}, xi 1/{den}: c(P*) = {c_p}, c(OPT) = {c_opt}, c(OPT') = {c_new}"
                );
            }
        }
    }
    assert!(premises > 50, "only {premises} premises held");
}

#[test]
fn never_worse_with_approximate_inputs() {
    for seed in 0..40u64 {
        let base = desk_instance(seed, 9, 4, seed);
        let s = two_approx(&base, &MetricClosure::new(&base)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e = *base.edges().choose(&mut rng).unwrap();
        let m = Modification::EdgeInc {
            u: e.u,
            v: e.v,
            delta: rng.random_range(1..=20),
        };
        let task =
            ScenarioFile::new(base.clone(), s.clone(), m, Rational::from_integer(2)).unwrap();
        for cap in [None, Some(1), Some(2)] {
            let cfg = ReoptConfig {
                epsilon: Rational::new(1, 2),
                h_cap: cap,
                ..ReoptConfig::default()
            };
            let out = reoptimize(&task, &cfg).unwrap();
            let modified = task.modified_instance().unwrap();
            assert!(out.tree.is_steiner_tree_of(&modified));
            assert!(out.cost <= s.cost(&modified), "seed {seed}, cap {cap:?}");
            assert_eq!(out.mode() == Mode::Heuristic, cap.is_some());
        }
    }
}
