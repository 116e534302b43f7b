use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::buildst::HBound;
use crate::error::{Error, Result};
use crate::restrict::levels_for;
use crate::{format_rational, Rational};

/// The four local modifications.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    /// A Steiner vertex becomes a terminal.
    TerminalAdd,
    /// The cost of an edge grows.
    EdgeInc,
    /// A terminal becomes a Steiner vertex.
    TerminalRemove,
    /// The cost of an edge shrinks.
    EdgeDec,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::TerminalAdd,
        ScenarioKind::EdgeInc,
        ScenarioKind::TerminalRemove,
        ScenarioKind::EdgeDec,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::TerminalAdd => "terminal-add",
            ScenarioKind::EdgeInc => "edge-inc",
            ScenarioKind::TerminalRemove => "terminal-remove",
            ScenarioKind::EdgeDec => "edge-dec",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Whether the algorithm assumes the input solution is optimal.
    pub fn needs_optimal_input(self) -> bool {
        matches!(self, ScenarioKind::TerminalRemove | ScenarioKind::EdgeDec)
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Whether the run carries the `(ρ + ε)` guarantee.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Full parameters; the approximation bound applies.
    Guaranteed,
    /// `h` was capped below its theoretical value; only feasibility and
    /// never-worse-than-input are promised.
    Heuristic,
    /// `ε > 1` or `ρ > 2`: a plain 2-approximation is returned.
    TwoApproxGuard,
}

/// `ε` together with every parameter derived from it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxParams {
    pub kind: ScenarioKind,
    pub epsilon: Rational,
    /// `ξ = ε / 10`.
    pub xi: Rational,
    /// `⌈1/ξ⌉`.
    pub levels: u32,
    /// `⌈2/ε⌉`; appears only in the analysis.
    pub ell: u64,
    /// `k = 2^⌈1/ξ⌉`.
    pub k_plain: BigUint,
    /// `k = 2^(2 + ⌈1/ξ⌉)`.
    pub k_pinned: BigUint,
    pub h: HBound,
    pub rho: Rational,
    pub mode: Mode,
}

impl ApproxParams {
    pub fn new(
        kind: ScenarioKind,
        epsilon: Rational,
        rho: Rational,
        h_cap: Option<u64>,
    ) -> Result<Self> {
        if epsilon.is_zero() {
            return Err(Error::EpsilonOutOfRange(format_rational(&epsilon)));
        }
        if rho < Rational::one() {
            return Err(Error::InvalidInput(format!(
                "rho must be at least 1, got {}",
                format_rational(&rho)
            )));
        }
        let xi = epsilon / Rational::from_integer(10);
        let levels = levels_for(&xi)?;
        let ell = (Rational::from_integer(2) / epsilon).ceil().to_integer();
        let h = HBound::new(theoretical_h(kind, levels as u64, ell), h_cap);
        let mode = if epsilon > Rational::one() || rho > Rational::from_integer(2) {
            Mode::TwoApproxGuard
        } else if h.is_capped() {
            Mode::Heuristic
        } else {
            Mode::Guaranteed
        };
        Ok(ApproxParams {
            kind,
            epsilon,
            xi,
            levels,
            ell,
            k_plain: BigUint::one() << levels,
            k_pinned: BigUint::one() << (levels + 2),
            h,
            rho,
            mode,
        })
    }

    /// The declared bound `ρ + ε`.
    pub fn bound(&self) -> Rational {
        self.rho + self.epsilon
    }
}

/// The swap budget for each modification, with `r = ⌈1/ξ⌉` and
/// `ℓ = ⌈2/ε⌉`.
pub fn theoretical_h(kind: ScenarioKind, r: u64, ell: u64) -> BigUint {
    let pow2 = |e: u64| BigUint::one() << e;
    match kind {
        ScenarioKind::TerminalAdd => pow2(2 * ell * r),
        ScenarioKind::EdgeInc => pow2(2 * (1 + r) * ell),
        ScenarioKind::TerminalRemove => BigUint::from(1 + r) * pow2(2 * (1 + r) * ell),
        ScenarioKind::EdgeDec => BigUint::from(2 * (1 + r)) * pow2(2 * (2 + r) * ell),
    }
}
