//! Approximation ratios known before the PTAS results, as closed forms in
//! the Steiner approximation ratio `σ`.

use serde::Serialize;

use crate::reopt::ScenarioKind;

/// `σ = ln 4`, the limit of the best known STP ratio.
pub const SIGMA: f64 = std::f64::consts::LN_2 * 2.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioRow {
    pub scenario: ScenarioKind,
    pub formula: &'static str,
    pub value: f64,
    /// The rounded value quoted in the literature.
    pub quoted: f64,
}

/// The prior ratio of every scenario evaluated at `σ = ln 4`.
pub fn table1_constants() -> Vec<RatioRow> {
    table1_at(SIGMA)
}

pub fn table1_at(sigma: f64) -> Vec<RatioRow> {
    let terminal = (10.0 * sigma - 7.0) / (7.0 * sigma - 4.0);
    let inc = (7.0 * sigma - 4.0) / (4.0 * sigma - 1.0);
    let dec = (5.0 * sigma - 3.0) / (3.0 * sigma - 1.0);
    let row = |scenario, formula, value, quoted| RatioRow {
        scenario,
        formula,
        value,
        quoted,
    };
    vec![
        row(ScenarioKind::TerminalAdd, "(10s-7)/(7s-4)", terminal, 1.204),
        row(ScenarioKind::EdgeInc, "(7s-4)/(4s-1)", inc, 1.256),
        row(
            ScenarioKind::TerminalRemove,
            "(10s-7)/(7s-4)",
            terminal,
            1.204,
        ),
        row(ScenarioKind::EdgeDec, "(5s-3)/(3s-1)", dec, 1.246),
    ]
}
