//! SteinLib `.stp` subset: the Comment, Graph and Terminals sections.
//!
//! ```text
//! 33D32945 STP File, STP Format Version 1.0
//! SECTION Graph
//! Nodes 3
//! Edges 2
//! E 1 2 1.5
//! E 2 3 2
//! END
//! SECTION Terminals
//! Terminals 2
//! T 1
//! T 3
//! END
//! EOF
//! ```
//!
//! Keywords are case-insensitive. Other sections are skipped with a
//! warning. Decimal weights are scaled by `10^s`, where `s` is the largest
//! number of fractional digits in the file.

use std::fmt::Write as _;
use std::path::Path;

use super::decimal::Decimal;
use crate::error::{Error, Result};
use crate::graph::{StpInstance, VertexId};

const MAGIC: &str = "33D32945";

pub fn parse_stp(text: &str) -> Result<StpInstance> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    parse_lines(&lines, true)
}

pub fn read_stp_file(path: impl AsRef<Path>) -> Result<StpInstance> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    parse_stp(&text)
}

#[derive(PartialEq)]
enum Section {
    None,
    Comment,
    Graph,
    Terminals,
    Skipped,
}

fn vertex(token: Option<&str>, nodes: Option<usize>, line: usize, what: &str) -> Result<VertexId> {
    let token = token.ok_or_else(|| Error::parse(line, format!("missing {what}")))?;
    let id: usize = token
        .parse()
        .map_err(|_| Error::parse(line, format!("malformed {what} {token:?}")))?;
    let n = nodes.ok_or_else(|| Error::parse(line, "Nodes must be declared first"))?;
    if id == 0 || id > n {
        return Err(Error::parse(line, format!("{what} {id} outside 1..={n}")));
    }
    Ok(id - 1)
}

fn count(token: Option<&str>, line: usize, what: &str) -> Result<usize> {
    token
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::parse(line, format!("malformed {what} count")))
}

/// Parses numbered lines. With `require_eof` unset the block may end
/// without an `EOF` line (used for instances embedded in scenarios).
pub(crate) fn parse_lines(lines: &[(usize, &str)], require_eof: bool) -> Result<StpInstance> {
    let mut section = Section::None;
    let mut nodes: Option<usize> = None;
    let mut declared_edges: Option<usize> = None;
    let mut declared_terminals: Option<usize> = None;
    let mut edges: Vec<(VertexId, VertexId, Decimal)> = Vec::new();
    let mut terminals: Vec<VertexId> = Vec::new();
    let mut saw_eof = false;
    let mut first = true;

    for &(line, raw) in lines {
        let text = raw.trim();
        if text.is_empty() {
            continue;
        }
        if first {
            first = false;
            if text.starts_with(MAGIC) {
                continue;
            }
        }
        let mut tokens = text.split_whitespace();
        let keyword = tokens.next().unwrap().to_ascii_lowercase();

        if section == Section::None {
            match keyword.as_str() {
                "section" => {
                    let name = tokens.next().unwrap_or("").to_ascii_lowercase();
                    section = match name.as_str() {
                        "comment" => Section::Comment,
                        "graph" => Section::Graph,
                        "terminals" => Section::Terminals,
                        _ => {
                            log::warn!("line {line}: skipping unsupported section {name:?}");
                            Section::Skipped
                        }
                    };
                }
                "eof" => {
                    saw_eof = true;
                    break;
                }
                _ => {
                    return Err(Error::parse(
                        line,
                        format!("unexpected {text:?} outside a section"),
                    ))
                }
            }
            continue;
        }
        if keyword == "end" {
            match section {
                Section::Graph => {
                    if let Some(m) = declared_edges.filter(|&m| m != edges.len()) {
                        return Err(Error::parse(
                            line,
                            format!("Edges declares {m} but {} were given", edges.len()),
                        ));
                    }
                }
                Section::Terminals => {
                    if let Some(k) = declared_terminals.filter(|&k| k != terminals.len()) {
                        return Err(Error::parse(
                            line,
                            format!("Terminals declares {k} but {} were given", terminals.len()),
                        ));
                    }
                }
                _ => {}
            }
            section = Section::None;
            continue;
        }
        match section {
            Section::Comment | Section::Skipped | Section::None => {}
            Section::Graph => match keyword.as_str() {
                "nodes" => nodes = Some(count(tokens.next(), line, "Nodes")?),
                "edges" => declared_edges = Some(count(tokens.next(), line, "Edges")?),
                "e" => {
                    let u = vertex(tokens.next(), nodes, line, "edge endpoint")?;
                    let v = vertex(tokens.next(), nodes, line, "edge endpoint")?;
                    let w = tokens
                        .next()
                        .ok_or_else(|| Error::parse(line, "missing edge weight"))?;
                    let w = Decimal::parse(w).map_err(|m| Error::parse(line, m))?;
                    edges.push((u, v, w));
                }
                _ => {
                    return Err(Error::parse(
                        line,
                        format!("unexpected {text:?} in Graph section"),
                    ))
                }
            },
            Section::Terminals => match keyword.as_str() {
                "terminals" => declared_terminals = Some(count(tokens.next(), line, "Terminals")?),
                "t" => terminals.push(vertex(tokens.next(), nodes, line, "terminal")?),
                _ => {
                    return Err(Error::parse(
                        line,
                        format!("unexpected {text:?} in Terminals section"),
                    ))
                }
            },
        }
    }

    let last = lines.last().map_or(1, |&(l, _)| l + 1);
    if section != Section::None {
        return Err(Error::parse(last, "section is not closed with END"));
    }
    if require_eof && !saw_eof {
        return Err(Error::parse(last, "missing EOF"));
    }
    let n = nodes.ok_or_else(|| Error::parse(last, "no Nodes declaration"))?;
    let scale = edges.iter().map(|e| e.2.digits).max().unwrap_or(0);
    let mut scaled = Vec::with_capacity(edges.len());
    for (u, v, w) in edges {
        let c = w.scaled(scale).ok_or_else(|| {
            Error::Validation(format!("weight of edge ({}, {}) overflows", u + 1, v + 1))
        })?;
        scaled.push((u, v, c));
    }
    StpInstance::new(n, scaled, terminals, scale)
}

/// Writes the graph and terminal sections; every weight carries exactly
/// `scale` fractional digits.
pub fn write_stp(inst: &StpInstance) -> String {
    let mut out = String::new();
    writeln!(out, "{MAGIC} STP File, STP Format Version 1.0").unwrap();
    out.push('\n');
    write_body(&mut out, inst);
    out.push_str("EOF\n");
    out
}

pub(crate) fn write_body(out: &mut String, inst: &StpInstance) {
    writeln!(out, "SECTION Graph").unwrap();
    writeln!(out, "Nodes {}", inst.vertex_count()).unwrap();
    writeln!(out, "Edges {}", inst.edges().len()).unwrap();
    for e in inst.edges() {
        writeln!(
            out,
            "E {} {} {}",
            e.u + 1,
            e.v + 1,
            inst.format_cost(e.cost)
        )
        .unwrap();
    }
    writeln!(out, "END\n").unwrap();
    writeln!(out, "SECTION Terminals").unwrap();
    writeln!(out, "Terminals {}", inst.terminals().len()).unwrap();
    for t in inst.terminals() {
        writeln!(out, "T {}", t + 1).unwrap();
    }
    writeln!(out, "END\n").unwrap();
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "SECTION Graph\nNodes 2\nEdges 1\nE 1 2 5\nEND\nSECTION Terminals\nTerminals 2\nT 1\nT 2\nEND\nEOF\n";

    fn line_of(err: Error) -> usize {
        match err {
            Error::Parse { line, .. } => line,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_file() {
        let inst = parse_stp(MINIMAL).unwrap();
        assert_eq!(inst.vertex_count(), 2);
        assert_eq!(inst.cost(0, 1), Some(5));
        assert_eq!(inst.terminals(), &[0, 1]);
    }

    #[test]
    fn header_comment_and_unknown_sections() {
        let text =
            "33D32945 STP File, STP Format Version 1.0\n\nSECTION Comment\nName \"x\"\nEND\n\
                    section graph\nnodes 3\nedges 2\ne 1 2 1.5\nE 2 3 2\nend\n\
                    SECTION Coordinates\nDD 1 0 0\nEND\n\
                    SECTION Terminals\nT 1\nT 3\nEND\nEOF\nanything after";
        let inst = parse_stp(text).unwrap();
        assert_eq!(inst.scale(), 1);
        assert_eq!(inst.cost(0, 1), Some(15));
        assert_eq!(inst.cost(1, 2), Some(20));
    }

    #[test]
    fn rejects_duplicates() {
        let text = MINIMAL.replace("Edges 1\nE 1 2 5\n", "Edges 2\nE 1 2 5\nE 2 1 4\n");
        assert!(matches!(parse_stp(&text), Err(Error::Validation(_))));
        let text = MINIMAL.replace("T 2\n", "T 1\n");
        assert!(matches!(parse_stp(&text), Err(Error::Validation(_))));
    }

    #[test]
    fn line_numbered_errors() {
        assert_eq!(
            line_of(parse_stp(&MINIMAL.replace("EOF\n", "")).unwrap_err()),
            11
        );
        assert_eq!(
            line_of(parse_stp(&MINIMAL.replace("E 1 2 5", "E 1 2 -5")).unwrap_err()),
            4
        );
        assert_eq!(
            line_of(parse_stp(&MINIMAL.replace("T 2", "T 0")).unwrap_err()),
            9
        );
        assert_eq!(
            line_of(parse_stp(&MINIMAL.replace("Edges 1", "Edges 3")).unwrap_err()),
            5
        );
        assert_eq!(
            line_of(parse_stp(&MINIMAL.replace("Terminals 2", "Terminals 1")).unwrap_err()),
            10
        );
        let text = "SECTION Graph\nE 1 2 5\nNodes 2\nEND\nEOF\n";
        assert_eq!(line_of(parse_stp(text).unwrap_err()), 2);
    }

    #[test]
    fn round_trip() {
        let text = MINIMAL.replace("E 1 2 5", "E 1 2 5.250");
        let inst = parse_stp(&text).unwrap();
        assert_eq!(inst.scale(), 3);
        let written = write_stp(&inst);
        assert!(written.contains("E 1 2 5.250"));
        assert_eq!(parse_stp(&written).unwrap(), inst);
    }
}
