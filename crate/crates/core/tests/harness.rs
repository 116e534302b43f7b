mod common;

use steiner_core::harness::{load_config, oracle_solve, run_suite, to_jsonl, ORACLE_MAX_TERMINALS};
use steiner_core::{dreyfus_wagner, Error, ExactLimits, MetricClosure, StpInstance};

use common::{desk_instance, floyd, subset_mst};

#[test]
fn oracle_agrees_with_dreyfus_wagner() {
    for seed in 0..500u64 {
        let n = 3 + (seed % 10) as usize;
        let k = (2 + (seed % 6) as usize).min(n).min(ORACLE_MAX_TERMINALS);
        let inst = desk_instance(seed, n, k, seed);
        let oracle = oracle_solve(&inst).unwrap();
        let dw =
            dreyfus_wagner(&inst, &MetricClosure::new(&inst), &ExactLimits::default()).unwrap();
        assert_eq!(oracle.cost, dw.cost, "seed {seed}");
        let tree = oracle.tree(&inst);
        assert!(tree.is_steiner_tree_of(&inst));
        assert_eq!(tree.cost(&inst), oracle.cost);
    }
}

#[test]
fn oracle_on_the_four_vertex_star() {
    let inst = StpInstance::new(
        4,
        [
            (0, 1, 19),
            (0, 2, 19),
            (1, 2, 19),
            (3, 0, 10),
            (3, 1, 10),
            (3, 2, 10),
        ],
        [0, 1, 2],
        1,
    )
    .unwrap();
    assert_eq!(oracle_solve(&inst).unwrap().cost, 30);
    assert_eq!(subset_mst(&floyd(&inst), &[0, 1, 2], &[3]), 30);
}

#[test]
fn oracle_refuses_large_inputs() {
    let inst = desk_instance(1, 20, 4, 0);
    assert!(matches!(
        oracle_solve(&inst),
        Err(Error::OracleCapExceeded { .. })
    ));
}

const SUITE: &str = r#"
seed = 11
workers = 0

[[batch]]
name = "mixed"
count = 4
n = 8

[[batch]]
name = "approx-input"
count = 3
n = 9
topology = "tree-plus-chords"
chords = 4
kinds = ["terminal-add", "edge-inc"]
solution = "two-approx"

[[batch]]
name = "capped"
count = 3
n = 8
h_cap = 1
"#;

#[test]
fn suite_reports_are_reproducible() {
    let cfg = load_config(SUITE).unwrap();
    let first = run_suite(&cfg).unwrap();
    let again =
        run_suite(&load_config(&SUITE.replace("workers = 0", "workers = 3")).unwrap()).unwrap();
    assert_eq!(to_jsonl(&first.reports), to_jsonl(&again.reports));
    assert_eq!(first.reports.len(), 4 * 4 + 3 * 2 + 3 * 4);
    for line in to_jsonl(&first.reports).lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("wall_ms").is_none());
        if v["status"] == "ok" {
            let ratio = v["ratio_value"].as_f64().unwrap();
            assert!(ratio >= 1.0);
            if v["batch"] == "capped" {
                assert_eq!(v["mode"], "heuristic");
            } else {
                assert_eq!(v["within_bound"], true, "{line}");
            }
        }
    }
}
