//! Component swapping: remove up to `h` full components of a restricted
//! forest, reconnect optimally, keep the cheapest tree.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;

use crate::components::{embed_edges, split_full, MetricEdge, RestrictedForest};
use crate::error::{Error, Result};
use crate::exact::{connect_trees, dreyfus_wagner, ExactLimits, SteinerSolution};
use crate::forest::SteinerForest;
use crate::graph::{Cost, StpInstance, VertexId};
use crate::metric::MetricClosure;

/// The swap budget: the value the analysis asks for and an optional
/// practical cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HBound {
    pub theoretical: BigUint,
    pub cap: Option<u64>,
}

impl HBound {
    pub fn new(theoretical: BigUint, cap: Option<u64>) -> Self {
        HBound { theoretical, cap }
    }

    pub fn uncapped(theoretical: BigUint) -> Self {
        Self::new(theoretical, None)
    }

    /// `min(theoretical, cap)`.
    pub fn effective(&self) -> BigUint {
        match self.cap {
            Some(c) if BigUint::from(c) < self.theoretical => BigUint::from(c),
            _ => self.theoretical.clone(),
        }
    }

    /// Whether the cap is below the theoretical value.
    pub fn is_capped(&self) -> bool {
        self.effective() < self.theoretical
    }
}

/// Audit entry for one removal set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CandidateRecord {
    /// Indices of the removed components, ascending.
    pub removed: Vec<usize>,
    /// Trees left after the removal.
    pub trees: usize,
    /// `d` of the kept components plus `d` of the reconnection.
    pub metric_cost: Cost,
    pub reconnection_cost: Cost,
    pub reconnection_components: usize,
    /// `c` of the embedded, pruned tree.
    pub total_cost: Cost,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BuildStOutcome {
    #[serde(skip)]
    pub tree: SteinerForest,
    pub cost: Cost,
    /// Number of full components of the input forest.
    pub components: usize,
    /// True when the component count was below `h` and the instance was
    /// solved from scratch.
    pub fallback: bool,
    pub h_theoretical: String,
    pub h_effective: String,
    /// Removal set of the winning candidate.
    pub chosen: Option<Vec<usize>>,
    pub candidates: Vec<CandidateRecord>,
}

/// Swap engine bound to one instance and metric. The from-scratch optimum
/// is computed at most once and reused across runs.
pub struct BuildSt<'a> {
    inst: &'a StpInstance,
    metric: &'a MetricClosure,
    limits: ExactLimits,
    exact: OnceLock<Result<SteinerSolution>>,
}

impl<'a> BuildSt<'a> {
    pub fn new(inst: &'a StpInstance, metric: &'a MetricClosure, limits: ExactLimits) -> Self {
        BuildSt {
            inst,
            metric,
            limits,
            exact: OnceLock::new(),
        }
    }

    /// `Connect(I, (R, ∅))`.
    pub fn exact_solution(&self) -> Result<SteinerSolution> {
        self.exact
            .get_or_init(|| dreyfus_wagner(self.inst, self.metric, &self.limits))
            .clone()
    }

    pub fn run(&self, forest: &RestrictedForest, h: &HBound) -> Result<BuildStOutcome> {
        let m = forest.components.len();
        let effective = h.effective();
        let mut outcome = BuildStOutcome {
            tree: SteinerForest::empty(),
            cost: 0,
            components: m,
            fallback: false,
            h_theoretical: h.theoretical.to_string(),
            h_effective: effective.to_string(),
            chosen: None,
            candidates: Vec::new(),
        };
        if BigUint::from(m) < effective {
            let sol = self.exact_solution()?;
            outcome.tree = sol.tree;
            outcome.cost = sol.cost;
            outcome.fallback = true;
            return Ok(outcome);
        }
        let h = effective
            .to_usize()
            .expect("h is at most the component count");
        let sets = removal_sets(m, h);
        log::debug!(
            "swap enumeration over {} removal sets ({m} components, h = {h})",
            sets.len()
        );

        let results: Vec<Result<(CandidateRecord, SteinerForest)>> = sets
            .par_iter()
            .map(|set| self.evaluate(forest, set))
            .collect();
        let mut best: Option<(Cost, usize, SteinerForest)> = None;
        for (idx, res) in results.into_iter().enumerate() {
            let (record, tree) = res?;
            if best.as_ref().is_none_or(|(c, _, _)| record.total_cost < *c) {
                best = Some((record.total_cost, idx, tree));
            }
            outcome.candidates.push(record);
        }
        let (cost, idx, tree) = best.expect("the empty removal set is always evaluated");
        outcome.cost = cost;
        outcome.tree = tree;
        outcome.chosen = Some(sets[idx].clone());
        Ok(outcome)
    }

    fn evaluate(
        &self,
        forest: &RestrictedForest,
        removed: &[usize],
    ) -> Result<(CandidateRecord, SteinerForest)> {
        let remaining = forest.without(removed);
        let trees = remaining.trees_spanning(self.inst);
        if trees.len() > self.limits.tree_cap {
            return Err(Error::CandidateCapExceeded {
                candidate: removed.to_vec(),
                trees: trees.len(),
                cap: self.limits.tree_cap,
            });
        }
        let reconnection = connect_trees(self.metric, &trees, self.limits.tree_cap)?;
        let in_trees: BTreeSet<VertexId> = trees.iter().flatten().copied().collect();

        let pieces = split_full(&reconnection.edges, |v| in_trees.contains(&v))?;
        if trees.len() > 1 && pieces.len() > trees.len() - 1 {
            return Err(Error::Internal(format!(
                "reconnection of {} trees has {} full components",
                trees.len(),
                pieces.len()
            )));
        }

        let kept: Vec<MetricEdge> = remaining
            .components
            .iter()
            .filter(|c| c.vertices().all(|v| in_trees.contains(&v)))
            .flat_map(|c| c.edges().iter().copied())
            .collect();
        let kept_cost: Cost = remaining
            .components
            .iter()
            .filter(|c| c.vertices().all(|v| in_trees.contains(&v)))
            .map(|c| c.cost_in(self.metric))
            .sum();
        let tree = embed_edges(
            in_trees.iter().copied(),
            kept.into_iter().chain(reconnection.edges.iter().copied()),
            self.metric,
        )?
        .pruned(self.inst);
        if !tree.is_steiner_tree_of(self.inst) {
            return Err(Error::Internal(format!(
                "candidate {removed:?} is not a Steiner tree"
            )));
        }
        let record = CandidateRecord {
            removed: removed.to_vec(),
            trees: trees.len(),
            metric_cost: kept_cost + reconnection.cost,
            reconnection_cost: reconnection.cost,
            reconnection_components: pieces.len(),
            total_cost: tree.cost(self.inst),
        };
        Ok((record, tree))
    }
}

/// One-shot form of [`BuildSt::run`].
pub fn build_st(
    inst: &StpInstance,
    forest: &RestrictedForest,
    h: &HBound,
    metric: &MetricClosure,
    limits: &ExactLimits,
) -> Result<BuildStOutcome> {
    BuildSt::new(inst, metric, *limits).run(forest, h)
}

/// All subsets of `0..m` with at most `h` elements, in colexicographic
/// order (the empty set first).
pub fn removal_sets(m: usize, h: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..h.min(m) {
        let mut next = Vec::new();
        for set in &frontier {
            let start = set.last().map_or(0, |&x| x + 1);
            for x in start..m {
                let mut s = set.clone();
                s.push(x);
                next.push(s);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::components::FullComponent;

    #[test]
    fn colex_order() {
        let sets = removal_sets(3, 2);
        assert_eq!(
            sets,
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![0, 1],
                vec![2],
                vec![0, 2],
                vec![1, 2]
            ]
        );
        assert_eq!(removal_sets(4, 1).len(), 5);
        assert_eq!(removal_sets(2, 5).len(), 4);
    }

    #[test]
    fn effective_h() {
        let h = HBound::new(BigUint::from(1u64) << 40, Some(2));
        assert_eq!(h.effective(), BigUint::from(2u32));
        assert!(h.is_capped());
        let h = HBound::new(BigUint::from(3u32), Some(10));
        assert_eq!(h.effective(), BigUint::from(3u32));
        assert!(!h.is_capped());
    }

    fn square() -> (StpInstance, MetricClosure) {
        // Terminals 0..4 on a 4-cycle of cost 2 with a hub 4 at cost 1.4.
        let inst = StpInstance::new(
            5,
            [
                (0, 1, 20),
                (1, 2, 20),
                (2, 3, 20),
                (3, 0, 20),
                (0, 4, 14),
                (1, 4, 14),
                (2, 4, 14),
                (3, 4, 14),
            ],
            [0, 1, 2, 3],
            1,
        )
        .unwrap();
        let m = MetricClosure::new(&inst);
        (inst, m)
    }

    #[test]
    fn fallback_when_few_components() {
        let (inst, m) = square();
        let comps = vec![
            FullComponent::new(vec![MetricEdge::in_metric(0, 1, &m)]).unwrap(),
            FullComponent::new(vec![MetricEdge::in_metric(1, 2, &m)]).unwrap(),
            FullComponent::new(vec![MetricEdge::in_metric(2, 3, &m)]).unwrap(),
        ];
        let f = RestrictedForest::new(comps, BTreeSet::new());
        let out = build_st(
            &inst,
            &f,
            &HBound::uncapped(5u32.into()),
            &m,
            &ExactLimits::default(),
        )
        .unwrap();
        assert!(out.fallback);
        assert_eq!(out.cost, 56);
    }

    #[test]
    fn larger_budgets_never_hurt() {
        let (inst, m) = square();
        let comps = vec![
            FullComponent::new(vec![MetricEdge::in_metric(0, 1, &m)]).unwrap(),
            FullComponent::new(vec![MetricEdge::in_metric(1, 2, &m)]).unwrap(),
            FullComponent::new(vec![MetricEdge::in_metric(2, 3, &m)]).unwrap(),
        ];
        let f = RestrictedForest::new(comps, BTreeSet::new());
        let optimum = dreyfus_wagner(&inst, &m, &ExactLimits::default())
            .unwrap()
            .cost;
        let h0 = build_st(
            &inst,
            &f,
            &HBound::uncapped(0u32.into()),
            &m,
            &ExactLimits::default(),
        )
        .unwrap();
        assert_eq!(h0.cost, 60);
        assert_eq!(h0.candidates.len(), 1);
        let h1 = build_st(
            &inst,
            &f,
            &HBound::uncapped(1u32.into()),
            &m,
            &ExactLimits::default(),
        )
        .unwrap();
        assert!(!h1.fallback);
        assert_eq!(h1.candidates.len(), 4);
        assert!(h1.cost <= h0.cost);
        let h3 = build_st(
            &inst,
            &f,
            &HBound::uncapped(3u32.into()),
            &m,
            &ExactLimits::default(),
        )
        .unwrap();
        assert_eq!(h3.cost, optimum);
        assert_eq!(optimum, 56);
    }

    #[test]
    fn candidate_cap_reports_offender() {
        let (inst, m) = square();
        let comps = vec![FullComponent::new(vec![
            MetricEdge::in_metric(0, 4, &m),
            MetricEdge::in_metric(1, 4, &m),
            MetricEdge::in_metric(2, 4, &m),
            MetricEdge::in_metric(3, 4, &m),
        ])
        .unwrap()];
        let f = RestrictedForest::new(comps, BTreeSet::new());
        let limits = ExactLimits {
            terminal_cap: 16,
            tree_cap: 3,
        };
        let err = build_st(&inst, &f, &HBound::uncapped(1u32.into()), &m, &limits).unwrap_err();
        assert_eq!(
            err,
            Error::CandidateCapExceeded {
                candidate: vec![0],
                trees: 4,
                cap: 3
            }
        );
    }
}
