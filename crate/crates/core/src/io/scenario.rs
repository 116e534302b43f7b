//! Reoptimization scenarios: a base instance, a solution of it, one local
//! modification and the declared quality of the solution.
//!
//! ```text
//! BASE inline
//! SECTION Graph
//! ...
//! END
//! SECTION Terminals
//! ...
//! END
//! SOLUTION 2
//! SE 1 2
//! SE 2 3
//! RHO 1/1
//! MOD edge-inc 1 2 0.5
//! EOF
//! ```
//!
//! `BASE <path>` refers to a separate `.stp` file instead of an inline
//! block. `RHO` is optional and defaults to 1.

use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;

use super::decimal::Decimal;
use super::stp::{parse_lines, parse_stp, write_body};
use crate::error::{Error, Result};
use crate::forest::SteinerForest;
use crate::graph::{edge_key, Cost, StpInstance, VertexId, INFINITE_COST};
use crate::reopt::ScenarioKind;
use crate::{format_rational, parse_rational, Rational};

/// One local modification. Costs are in units of the base instance scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Modification {
    EdgeInc {
        u: VertexId,
        v: VertexId,
        delta: Cost,
    },
    EdgeDec {
        u: VertexId,
        v: VertexId,
        delta: Cost,
    },
    TerminalAdd {
        t: VertexId,
    },
    TerminalRemove {
        t: VertexId,
    },
}

impl Modification {
    pub fn kind(&self) -> ScenarioKind {
        match self {
            Modification::EdgeInc { .. } => ScenarioKind::EdgeInc,
            Modification::EdgeDec { .. } => ScenarioKind::EdgeDec,
            Modification::TerminalAdd { .. } => ScenarioKind::TerminalAdd,
            Modification::TerminalRemove { .. } => ScenarioKind::TerminalRemove,
        }
    }

    /// The modified edge, for the two cost modifications.
    pub fn edge(&self) -> Option<(VertexId, VertexId)> {
        match *self {
            Modification::EdgeInc { u, v, .. } | Modification::EdgeDec { u, v, .. } => {
                Some(edge_key(u, v))
            }
            _ => None,
        }
    }

    fn check(&self, inst: &StpInstance) -> Result<()> {
        let vertex = |t: VertexId| {
            if t < inst.vertex_count() {
                Ok(())
            } else {
                Err(Error::Validation(format!(
                    "vertex {} does not exist",
                    t + 1
                )))
            }
        };
        let edge_cost = |u: VertexId, v: VertexId| {
            inst.cost(u, v).ok_or_else(|| {
                Error::Validation(format!("edge ({}, {}) does not exist", u + 1, v + 1))
            })
        };
        match *self {
            Modification::EdgeInc { u, v, delta } => {
                let c = edge_cost(u, v)?;
                if delta == 0 {
                    return Err(Error::Validation("edge-inc needs a positive delta".into()));
                }
                if c.checked_add(delta).is_none_or(|c| c >= INFINITE_COST) {
                    return Err(Error::Validation("increased edge cost overflows".into()));
                }
            }
            Modification::EdgeDec { u, v, delta } => {
                let c = edge_cost(u, v)?;
                if delta == 0 || delta > c {
                    return Err(Error::Validation(format!(
                        "edge-dec needs 0 < delta <= {}, got {}",
                        inst.format_cost(c),
                        inst.format_cost(delta)
                    )));
                }
            }
            Modification::TerminalAdd { t } => {
                vertex(t)?;
                if inst.is_terminal(t) {
                    return Err(Error::Validation(format!(
                        "vertex {} is already a terminal",
                        t + 1
                    )));
                }
            }
            Modification::TerminalRemove { t } => {
                vertex(t)?;
                if !inst.is_terminal(t) {
                    return Err(Error::Validation(format!(
                        "vertex {} is not a terminal",
                        t + 1
                    )));
                }
                if inst.terminals().len() == 1 {
                    return Err(Error::Validation("cannot remove the only terminal".into()));
                }
            }
        }
        Ok(())
    }

    /// Applies the modification to `inst`.
    pub fn apply(&self, inst: &StpInstance) -> Result<StpInstance> {
        self.check(inst)?;
        match *self {
            Modification::EdgeInc { u, v, delta } => {
                inst.with_edge_cost(u, v, inst.cost(u, v).unwrap() + delta)
            }
            Modification::EdgeDec { u, v, delta } => {
                inst.with_edge_cost(u, v, inst.cost(u, v).unwrap() - delta)
            }
            Modification::TerminalAdd { t } => inst.with_terminal(t, true),
            Modification::TerminalRemove { t } => inst.with_terminal(t, false),
        }
    }
}

/// A validated reoptimization task.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioFile {
    pub base: StpInstance,
    pub solution: SteinerForest,
    pub modification: Modification,
    pub rho: Rational,
}

impl ScenarioFile {
    pub fn new(
        base: StpInstance,
        solution: SteinerForest,
        modification: Modification,
        rho: Rational,
    ) -> Result<Self> {
        solution.check_steiner_tree(&base)?;
        modification.check(&base)?;
        if rho < Rational::from_integer(1) {
            return Err(Error::Validation(format!(
                "rho must be at least 1, got {}",
                format_rational(&rho)
            )));
        }
        Ok(ScenarioFile {
            base,
            solution,
            modification,
            rho,
        })
    }

    pub fn kind(&self) -> ScenarioKind {
        self.modification.kind()
    }

    /// The instance `I'` after the modification.
    pub fn modified_instance(&self) -> Result<StpInstance> {
        self.modification.apply(&self.base)
    }
}

/// Parses a scenario; `BASE <path>` is resolved against the working
/// directory.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile> {
    parse_scenario_with(text, |path| {
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))
    })
}

/// Reads a scenario file; `BASE <path>` is resolved relative to its
/// directory.
pub fn parse_scenario_file(path: impl AsRef<Path>) -> Result<ScenarioFile> {
    let path = path.as_ref();
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_scenario_with(&text, |base| {
        let full = dir.join(base);
        std::fs::read_to_string(&full).map_err(|e| Error::Io(format!("{}: {e}", full.display())))
    })
}

/// Parses a scenario, loading `BASE <path>` through `resolve`.
pub fn parse_scenario_with<F>(text: &str, resolve: F) -> Result<ScenarioFile>
where
    F: Fn(&str) -> Result<String>,
{
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty())
        .collect();
    let last = text.lines().count() + 1;
    let keyword = |l: &str| {
        l.split_whitespace()
            .next()
            .unwrap_or("")
            .to_ascii_lowercase()
    };

    let Some(&(base_line, base_text)) = lines.first() else {
        return Err(Error::parse(last, "empty scenario"));
    };
    let mut tokens = base_text.split_whitespace();
    if keyword(base_text) != "base" {
        return Err(Error::parse(base_line, "scenario must start with BASE"));
    }
    let target = tokens
        .next()
        .and_then(|_| tokens.next())
        .ok_or_else(|| Error::parse(base_line, "BASE needs a path or `inline`"))?;

    let solution_at = lines
        .iter()
        .position(|&(_, l)| keyword(l) == "solution")
        .ok_or_else(|| Error::parse(last, "missing SOLUTION"))?;
    let block = &lines[1..solution_at];
    let mut base = if target.eq_ignore_ascii_case("inline") {
        parse_lines(block, false)?
    } else {
        if let Some(&(line, _)) = block.first() {
            return Err(Error::parse(line, "inline instance after BASE <path>"));
        }
        let text = resolve(target)?;
        parse_stp(&text).map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse {
                line,
                message: format!("{target}: {message}"),
            },
            other => other,
        })?
    };
    let n = base.vertex_count();
    let vertex = |token: Option<&str>, line: usize| -> Result<VertexId> {
        let id: usize = token
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::parse(line, "expected a vertex id"))?;
        if id == 0 || id > n {
            return Err(Error::parse(line, format!("vertex {id} outside 1..={n}")));
        }
        Ok(id - 1)
    };

    let (sol_line, sol_text) = lines[solution_at];
    let declared: usize = sol_text
        .split_whitespace()
        .nth(1)
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(sol_line, "malformed SOLUTION count"))?;
    let mut edges = Vec::new();
    let mut rho: Option<Rational> = None;
    let mut modification: Option<(Modification, u32)> = None;
    let mut saw_eof = false;
    let mut rest = lines[solution_at + 1..].iter();
    for &(line, text) in rest.by_ref() {
        let mut tokens = text.split_whitespace();
        let kw = tokens.next().unwrap_or("").to_ascii_lowercase();
        if kw != "se" && edges.len() != declared {
            return Err(Error::parse(
                line,
                format!(
                    "SOLUTION declares {declared} edges but {} were given",
                    edges.len()
                ),
            ));
        }
        match kw.as_str() {
            "se" => {
                if edges.len() == declared {
                    return Err(Error::parse(line, format!("more than {declared} SE lines")));
                }
                let u = vertex(tokens.next(), line)?;
                let v = vertex(tokens.next(), line)?;
                edges.push(edge_key(u, v));
            }
            "rho" => {
                if rho.is_some() {
                    return Err(Error::parse(line, "duplicate RHO"));
                }
                let value = tokens
                    .next()
                    .ok_or_else(|| Error::parse(line, "RHO needs a value"))?;
                let value = parse_rational(value).map_err(|e| Error::parse(line, e.to_string()))?;
                if value < Rational::from_integer(1) {
                    return Err(Error::parse(line, "RHO must be at least 1"));
                }
                rho = Some(value);
            }
            "mod" => {
                if modification.is_some() {
                    return Err(Error::parse(line, "duplicate MOD"));
                }
                let name = tokens.next().unwrap_or("");
                let kind = ScenarioKind::from_name(&name.to_ascii_lowercase())
                    .ok_or_else(|| Error::parse(line, format!("unknown modification {name:?}")))?;
                modification = Some(match kind {
                    ScenarioKind::TerminalAdd => (
                        Modification::TerminalAdd {
                            t: vertex(tokens.next(), line)?,
                        },
                        0,
                    ),
                    ScenarioKind::TerminalRemove => (
                        Modification::TerminalRemove {
                            t: vertex(tokens.next(), line)?,
                        },
                        0,
                    ),
                    ScenarioKind::EdgeInc | ScenarioKind::EdgeDec => {
                        let u = vertex(tokens.next(), line)?;
                        let v = vertex(tokens.next(), line)?;
                        let delta = tokens
                            .next()
                            .ok_or_else(|| Error::parse(line, "missing delta"))?;
                        let delta = Decimal::parse(delta).map_err(|m| Error::parse(line, m))?;
                        let extra = delta.digits.saturating_sub(base.scale());
                        let scaled = delta
                            .scaled(base.scale() + extra)
                            .ok_or_else(|| Error::parse(line, "delta overflows"))?;
                        let m = if kind == ScenarioKind::EdgeInc {
                            Modification::EdgeInc {
                                u,
                                v,
                                delta: scaled,
                            }
                        } else {
                            Modification::EdgeDec {
                                u,
                                v,
                                delta: scaled,
                            }
                        };
                        (m, extra)
                    }
                });
            }
            "eof" => {
                saw_eof = true;
                break;
            }
            _ => return Err(Error::parse(line, format!("unexpected {text:?}"))),
        }
    }
    if !saw_eof {
        return Err(Error::parse(last, "missing EOF"));
    }
    let (modification, extra) = modification.ok_or_else(|| Error::parse(last, "missing MOD"))?;
    let solution = SteinerForest::steiner_tree(&base, edges)?;
    if extra > 0 {
        base = base.rescaled(extra)?;
    }
    ScenarioFile::new(
        base,
        solution,
        modification,
        rho.unwrap_or_else(|| Rational::from_integer(1)),
    )
}

/// Writes a scenario with the instance inline.
pub fn write_scenario(s: &ScenarioFile) -> String {
    let mut out = String::from("BASE inline\n");
    write_body(&mut out, &s.base);
    writeln!(out, "SOLUTION {}", s.solution.edge_count()).unwrap();
    for &(a, b) in s.solution.edges() {
        writeln!(out, "SE {} {}", a + 1, b + 1).unwrap();
    }
    writeln!(out, "RHO {}", format_rational(&s.rho)).unwrap();
    let line = match s.modification {
        Modification::EdgeInc { u, v, delta } | Modification::EdgeDec { u, v, delta } => format!(
            "MOD {} {} {} {}",
            s.kind().name(),
            u + 1,
            v + 1,
            s.base.format_cost(delta)
        ),
        Modification::TerminalAdd { t } | Modification::TerminalRemove { t } => {
            format!("MOD {} {}", s.kind().name(), t + 1)
        }
    };
    writeln!(out, "{line}\nEOF").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "BASE inline\nSECTION Graph\nNodes 4\nEdges 4\nE 1 2 5\nE 2 3 1\nE 1 3 7\nE 3 4 2\nEND\n\
                        SECTION Terminals\nTerminals 2\nT 1\nT 3\nEND\nSOLUTION 2\nSE 1 2\nSE 2 3\n";

    fn scenario(tail: &str) -> Result<ScenarioFile> {
        parse_scenario(&format!("{BASE}{tail}"))
    }

    #[test]
    fn edge_dec_bounds() {
        let s = scenario("MOD edge-dec 1 2 3\nEOF\n").unwrap();
        assert_eq!(
            s.modification,
            Modification::EdgeDec {
                u: 0,
                v: 1,
                delta: 3
            }
        );
        assert_eq!(s.modified_instance().unwrap().cost(0, 1), Some(2));
        assert_eq!(s.rho, Rational::from_integer(1));
        assert!(matches!(
            scenario("MOD edge-dec 1 2 6\nEOF\n"),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            scenario("MOD edge-dec 1 2 0\nEOF\n"),
            Err(Error::Validation(_))
        ));
        assert!(scenario("MOD edge-dec 1 2 5\nEOF\n").is_ok());
    }

    #[test]
    fn terminal_preconditions() {
        assert!(matches!(
            scenario("MOD terminal-add 3\nEOF\n"),
            Err(Error::Validation(_))
        ));
        assert!(scenario("MOD terminal-add 4\nEOF\n").is_ok());
        assert!(matches!(
            scenario("MOD terminal-remove 4\nEOF\n"),
            Err(Error::Validation(_))
        ));
        let s = scenario("MOD terminal-remove 3\nEOF\n").unwrap();
        assert_eq!(s.modified_instance().unwrap().terminals(), &[0]);
    }

    #[test]
    fn solution_must_be_a_steiner_tree() {
        let text = BASE.replace(
            "SOLUTION 2\nSE 1 2\nSE 2 3\n",
            "SOLUTION 3\nSE 1 2\nSE 2 3\nSE 3 4\n",
        );
        let err = parse_scenario(&format!("{text}MOD edge-inc 1 2 1\nEOF\n")).unwrap_err();
        assert!(matches!(err, Error::Validation(_)), "{err}");
        let text = BASE.replace("SOLUTION 2\n", "SOLUTION 3\n");
        let err = parse_scenario(&format!("{text}MOD edge-inc 1 2 1\nEOF\n")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 18, .. }), "{err}");
    }

    #[test]
    fn rho_and_decimal_delta() {
        let s = scenario("RHO 3/2\nMOD edge-inc 2 3 0.25\nEOF\n").unwrap();
        assert_eq!(s.rho, Rational::new(3, 2));
        assert_eq!(s.base.scale(), 2);
        assert_eq!(s.base.cost(0, 1), Some(500));
        assert_eq!(
            s.modification,
            Modification::EdgeInc {
                u: 1,
                v: 2,
                delta: 25
            }
        );
        assert!(matches!(
            scenario("RHO 1/2\nMOD edge-inc 2 3 1\nEOF\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            scenario("MOD edge-inc 2 3 1\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn external_base() {
        let stp = "SECTION Graph\nNodes 2\nEdges 1\nE 1 2 4\nEND\nSECTION Terminals\nT 1\nT 2\nEND\nEOF\n";
        let text = "BASE pair.stp\nSOLUTION 1\nSE 1 2\nMOD edge-inc 1 2 1\nEOF\n";
        let s = parse_scenario_with(text, |p| {
            assert_eq!(p, "pair.stp");
            Ok(stp.to_string())
        })
        .unwrap();
        assert_eq!(s.base.cost(0, 1), Some(4));
    }

    #[test]
    fn round_trip() {
        for tail in [
            "RHO 3/2\nMOD edge-inc 2 3 0.25\nEOF\n",
            "MOD terminal-add 4\nEOF\n",
            "MOD edge-dec 1 2 5\nEOF\n",
        ] {
            let s = scenario(tail).unwrap();
            let text = write_scenario(&s);
            assert_eq!(parse_scenario(&text).unwrap(), s, "{text}");
        }
    }
}
