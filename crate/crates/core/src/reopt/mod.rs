//! Reoptimization under a single local modification.
//!
//! Each algorithm restricts (parts of) the input solution to a forest of
//! bounded full components and hands it to [`BuildSt`] on the modified
//! instance. Inputs with `ε > 1` or `ρ > 2` fall back to the classical
//! 2-approximation.

mod approx;
mod params;
mod paths;

use rayon::prelude::*;
use serde::Serialize;

pub use approx::two_approx;
pub use params::{theoretical_h, ApproxParams, Mode, ScenarioKind};
pub use paths::{enumerate_path_set, find_pstar, PathCandidate};

use crate::buildst::{BuildSt, BuildStOutcome};
use crate::components::RestrictedForest;
use crate::error::{Error, Result};
use crate::exact::ExactLimits;
use crate::forest::SteinerForest;
use crate::graph::{Cost, StpInstance, VertexId};
use crate::io::{Modification, ScenarioFile};
use crate::metric::MetricClosure;
use crate::restrict::{restricted_st, restricted_st_pinned};
use crate::{format_rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReoptConfig {
    pub epsilon: Rational,
    /// Upper bound on the number of swapped components; `None` keeps the
    /// theoretical value.
    pub h_cap: Option<u64>,
    pub limits: ExactLimits,
}

impl Default for ReoptConfig {
    fn default() -> Self {
        ReoptConfig {
            epsilon: Rational::from_integer(1),
            h_cap: None,
            limits: ExactLimits::default(),
        }
    }
}

/// One call of the swap engine.
#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub label: String,
    /// `d(S_ξ)` of the forest handed to the swap engine.
    pub restricted_cost: Cost,
    pub components: usize,
    pub build: BuildStOutcome,
}

#[derive(Clone, Debug)]
pub struct ReoptOutcome {
    /// The modified instance `I'`.
    pub instance: StpInstance,
    pub tree: SteinerForest,
    pub cost: Cost,
    /// `c'(S)`, the input solution priced in `I'`.
    pub input_cost: Cost,
    /// Whether `S` (pruned to the new terminal set) is feasible for `I'`.
    pub input_feasible: bool,
    /// The input solution was returned because nothing cheaper was found.
    pub kept_input: bool,
    pub params: ApproxParams,
    pub notes: Vec<String>,
    pub audit: Vec<Stage>,
}

impl ReoptOutcome {
    pub fn kind(&self) -> ScenarioKind {
        self.params.kind
    }

    pub fn mode(&self) -> Mode {
        self.params.mode
    }
}

/// Runs the algorithm matching the scenario's modification.
pub fn reoptimize(task: &ScenarioFile, cfg: &ReoptConfig) -> Result<ReoptOutcome> {
    let kind = task.kind();
    let params = ApproxParams::new(kind, cfg.epsilon, task.rho, cfg.h_cap)?;
    if kind.needs_optimal_input() && task.rho != Rational::from_integer(1) {
        return Err(Error::RhoNotOne(format_rational(&task.rho)));
    }
    let modified = task.modified_instance()?;
    let metric = MetricClosure::new(&modified);
    let input = task.solution.pruned(&modified);
    let input_feasible = input.is_steiner_tree_of(&modified);
    let mut run = Run {
        task,
        cfg,
        modified: &modified,
        metric: &metric,
        params: &params,
        notes: Vec::new(),
        audit: Vec::new(),
    };
    log::debug!(
        "{kind}: epsilon = {}, levels = {}, h = {} (effective {}), mode {:?}",
        format_rational(&params.epsilon),
        params.levels,
        params.h.theoretical,
        params.h.effective(),
        params.mode
    );

    let candidate = if params.mode == Mode::TwoApproxGuard {
        run.notes
            .push("epsilon > 1 or rho > 2: returning the 2-approximation".into());
        Some(two_approx(&modified, &metric)?)
    } else {
        match task.modification {
            Modification::TerminalAdd { t } => Some(run.terminal_added(t)?),
            Modification::EdgeInc { u, v, .. } => run.edge_increased(u, v)?,
            Modification::TerminalRemove { t } => Some(run.terminal_removed(t)?),
            Modification::EdgeDec { u, v, .. } => run.edge_decreased(u, v)?,
        }
    };

    let input_cost = input.cost(&modified);
    let (tree, kept_input) = match candidate {
        Some(tree) if !input_feasible || tree.cost(&modified) < input_cost => (tree, false),
        _ => (input, true),
    };
    tree.check_steiner_tree(&modified)
        .map_err(|e| Error::Internal(format!("reoptimized solution is infeasible: {e}")))?;
    let Run { notes, audit, .. } = run;
    Ok(ReoptOutcome {
        cost: tree.cost(&modified),
        tree,
        input_cost,
        input_feasible,
        kept_input,
        params,
        notes,
        audit,
        instance: modified,
    })
}

struct Run<'a> {
    task: &'a ScenarioFile,
    cfg: &'a ReoptConfig,
    modified: &'a StpInstance,
    metric: &'a MetricClosure,
    params: &'a ApproxParams,
    notes: Vec<String>,
    audit: Vec<Stage>,
}

/// Trees of `S − E(P)` hanging off the vertices of `P`, keyed by their
/// attachment vertex, plus the terminals of `P` with nothing attached.
fn attachment_trees(
    tree: &SteinerForest,
    path: &[VertexId],
    inst: &StpInstance,
) -> (Vec<(VertexId, SteinerForest)>, Vec<VertexId>) {
    let path_edges: Vec<_> = path
        .windows(2)
        .map(|w| crate::graph::edge_key(w[0], w[1]))
        .collect();
    let rest = tree.split_off(path_edges);
    let mut hanging = Vec::new();
    let mut lone = Vec::new();
    for &v in path {
        if rest.degree(v) > 0 {
            let sub = rest
                .tree_containing(v)
                .expect("attachment vertex lies in the forest");
            if sub.vertices().iter().any(|&x| inst.is_terminal(x)) {
                hanging.push((v, sub));
            }
        } else if inst.is_terminal(v) {
            lone.push(v);
        }
    }
    (hanging, lone)
}

impl<'a> Run<'a> {
    fn engine(&self) -> BuildSt<'a> {
        BuildSt::new(self.modified, self.metric, self.cfg.limits)
    }

    fn swap(
        &mut self,
        engine: &BuildSt<'a>,
        label: &str,
        forest: &RestrictedForest,
    ) -> Result<SteinerForest> {
        let build = engine.run(forest, &self.params.h)?;
        let tree = build.tree.clone();
        self.audit.push(Stage {
            label: label.to_string(),
            restricted_cost: forest.cost(),
            components: forest.components.len(),
            build,
        });
        Ok(tree)
    }

    fn terminal_added(&mut self, t: VertexId) -> Result<SteinerForest> {
        let task = self.task;
        let restricted = restricted_st(&task.base, &task.solution, &self.params.xi, self.metric)?;
        let mut forest = restricted.forest;
        if !forest.contains_vertex(t) {
            forest = forest.with_vertex(t);
        }
        let engine = self.engine();
        self.swap(&engine, "terminal-add", &forest)
    }

    fn edge_increased(&mut self, u: VertexId, v: VertexId) -> Result<Option<SteinerForest>> {
        let task = self.task;
        let solution = &task.solution;
        if !solution.contains_edge(u, v) {
            self.notes
                .push("modified edge is not in the solution; input returned".into());
            return Ok(None);
        }
        let base = &task.base;
        let excluded = self.excluding(u, v)?;
        let metric = excluded.as_ref().unwrap_or(self.metric);
        let rest = solution.split_off([(u, v)]);
        let mut forest = RestrictedForest::default();
        for side in [u, v] {
            let part = rest
                .tree_containing(side)
                .expect("endpoint of a solution edge");
            let r = restricted_st_pinned(base, &part, &self.params.xi, side, metric)?;
            forest = forest.join(&r.forest);
        }
        let engine = self.engine();
        self.swap(&engine, "edge-inc", &forest).map(Some)
    }

    fn terminal_removed(&mut self, t: VertexId) -> Result<SteinerForest> {
        let task = self.task;
        let (base, solution) = (&task.base, &task.solution);
        let bound = 1 + self.params.levels as usize;
        let pstar = find_pstar(solution, t, bound, base).ok_or(Error::VertexNotInSolution(t))?;
        self.notes.push(format!(
            "P* = {:?} ({} branching Steiner vertices)",
            pstar.vertices.iter().map(|x| x + 1).collect::<Vec<_>>(),
            pstar.branching_steiner
        ));
        let (hanging, lone) = attachment_trees(solution, &pstar.vertices, self.modified);
        let mut forest = RestrictedForest::default();
        for (v, sub) in hanging {
            let r = restricted_st_pinned(base, &sub, &self.params.xi, v, self.metric)?;
            forest = forest.join(&r.forest);
        }
        for v in lone {
            forest = forest.with_vertex(v);
        }
        let engine = self.engine();
        self.swap(&engine, "terminal-remove", &forest)
    }

    fn edge_decreased(&mut self, u: VertexId, v: VertexId) -> Result<Option<SteinerForest>> {
        let task = self.task;
        let (base, solution) = (&task.base, &task.solution);
        let excluded = self.excluding(u, v)?;
        let bound = 2 * (1 + self.params.levels as usize);
        let paths = enumerate_path_set(solution, bound, base);
        self.notes
            .push("attachment trees are taken from S - P (the tree of F spanning v is read as the tree of S - P)".into());
        self.notes.push(format!("{} candidate paths", paths.len()));

        let engine = self.engine();
        let params = self.params;
        let (xi, h, modified, fallback_metric) =
            (&params.xi, &params.h, self.modified, self.metric);
        let results: Vec<Result<(SteinerForest, Stage)>> = paths
            .par_iter()
            .map(|p| {
                let (hanging, lone) = attachment_trees(solution, &p.vertices, modified);
                let mut forest = RestrictedForest::default();
                for (x, sub) in hanging {
                    let r = match &excluded {
                        Some(m) if !sub.contains_edge(u, v) => {
                            restricted_st_pinned(base, &sub, xi, x, m)?
                        }
                        _ => restricted_st_pinned(modified, &sub, xi, x, fallback_metric)?,
                    };
                    forest = forest.join(&r.forest);
                }
                for x in lone {
                    forest = forest.with_vertex(x);
                }
                let build = engine.run(&forest, h)?;
                let stage = Stage {
                    label: format!(
                        "edge-dec path {}-{}",
                        p.vertices[0] + 1,
                        p.vertices[p.hops()] + 1
                    ),
                    restricted_cost: forest.cost(),
                    components: forest.components.len(),
                    build,
                };
                Ok((stage.build.tree.clone(), stage))
            })
            .collect();

        let mut best: Option<(Cost, SteinerForest)> = None;
        for res in results {
            let (tree, stage) = res?;
            if best.as_ref().is_none_or(|(c, _)| stage.build.cost < *c) {
                best = Some((stage.build.cost, tree));
            }
            self.audit.push(stage);
        }
        Ok(best.map(|(_, tree)| tree))
    }

    /// Metric of `G − e` with the base costs, or `None` (with a note) when
    /// removing `e` separates the terminals.
    fn excluding(&mut self, u: VertexId, v: VertexId) -> Result<Option<MetricClosure>> {
        match MetricClosure::excluding(&self.task.base, u, v) {
            Ok(m) => Ok(Some(m)),
            Err(Error::DisconnectedAfterExclusion { .. }) => {
                self.notes.push(format!(
                    "removing ({}, {}) disconnects the terminals; restricting over the modified instance",
                    u + 1,
                    v + 1
                ));
                Ok(None)
            }
            Err(e) => Err(e),
        }
    }
}
