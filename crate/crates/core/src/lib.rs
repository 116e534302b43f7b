//! Steiner tree reoptimization.
//!
//! The crate is organised bottom-up:
//!
//! - [`graph`], [`forest`], [`metric`] and [`components`] hold the instance,
//!   forest and metric-closure types together with the forest algebra
//!   (edge addition and removal, full-component decomposition, embedding of
//!   metric forests back into the input graph).
//! - [`io`] reads and writes SteinLib-style `.stp` files and the line-oriented
//!   scenario format used for reoptimization tasks.
//! - [`exact`] contains the Dreyfus–Wagner solver and `connect`, the optimal
//!   augmentation of a forest into a Steiner tree.
//! - [`restrict`] turns a Steiner tree into a k-restricted one whose full
//!   components have bounded terminal counts.
//! - [`buildst`] swaps up to `h` full components of a restricted forest and
//!   reconnects optimally, keeping the cheapest tree.
//! - [`reopt`] implements the four local-modification algorithms on top of
//!   the pieces above, plus the classical 2-approximation.
//! - [`harness`] has the brute-force oracle, generators, the reference ratio
//!   constants and the suite runner used by the CLI and the acceptance tests.
//!
//! Costs are exact integers. Decimal inputs are scaled by a power of ten per
//! instance (see [`StpInstance::scale`]).

pub mod buildst;
pub mod components;
pub mod error;
pub mod exact;
pub mod forest;
pub mod graph;
pub mod harness;
pub mod io;
pub mod metric;
pub mod reopt;
pub mod restrict;

pub use buildst::{build_st, BuildSt, BuildStOutcome, CandidateRecord, HBound};
pub use components::{
    embed_to_graph, full_components, FullComponent, MetricEdge, RestrictedForest,
};
pub use error::{Error, Result};
pub use exact::{connect, dreyfus_wagner, ExactLimits, Reconnection, SteinerSolution};
pub use forest::SteinerForest;
pub use graph::{edge_key, format_cost, Cost, Edge, EdgeKey, StpInstance, VertexId, INFINITE_COST};
pub use io::{parse_scenario, parse_stp, write_scenario, write_stp, Modification, ScenarioFile};
pub use metric::MetricClosure;
pub use reopt::{
    reoptimize, two_approx, ApproxParams, Mode, ReoptConfig, ReoptOutcome, ScenarioKind,
};
pub use restrict::{restricted_st, restricted_st_pinned, RestrictionResult};

/// Exact non-negative rational, used for ε, ξ and the declared ratio ρ.
pub type Rational = num_rational::Ratio<u64>;

/// Parses `p/q` or a bare integer into a [`Rational`].
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let parse = |s: &str| {
        s.trim()
            .parse::<u64>()
            .map_err(|_| Error::InvalidInput(format!("not a rational number: {text:?}")))
    };
    let (num, den) = match text.split_once('/') {
        Some((p, q)) => (parse(p)?, parse(q)?),
        None => (parse(text)?, 1),
    };
    if den == 0 {
        return Err(Error::InvalidInput(format!("zero denominator in {text:?}")));
    }
    Ok(Rational::new(num, den))
}

/// Formats a rational as `p/q` (always with an explicit denominator).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
