//! DIMACS `.col` graphs and modulator sidecar files.
//!
//! Graph files contain `c ...` comment lines, one `p edge <n> <m>` line and
//! `e <u> <v>` lines. Sidecars list one vertex per line, sorted. Ids in
//! files are 1-based; everything in memory is 0-based.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `p edge <n> <m>` line")]
    MissingProblemLine,
    #[error("problem line declares {declared} edges, found {found}")]
    EdgeCountMismatch { declared: usize, found: usize },
    #[error("line {line}: vertex {vertex} outside 1..={n}")]
    VertexOutOfRange {
        line: usize,
        vertex: usize,
        n: usize,
    },
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn parse_id(tok: Option<&str>, line: usize) -> Result<usize, ParseError> {
    let tok = tok.ok_or_else(|| syntax(line, "missing integer"))?;
    tok.parse()
        .map_err(|_| syntax(line, format!("invalid integer `{tok}`")))
}

/// Parses a DIMACS edge file. Duplicate edges (in either orientation) are
/// merged; the declared edge count must match the number of `e` lines.
pub fn parse_graph(text: &str) -> Result<Graph, ParseError> {
    let mut graph: Option<Graph> = None;
    let mut declared = 0;
    let mut seen = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut toks = raw.split_whitespace();
        match toks.next() {
            None | Some("c") => continue,
            Some("p") => {
                if graph.is_some() {
                    return Err(syntax(line, "duplicate problem line"));
                }
                match toks.next() {
                    Some("edge") | Some("col") => {}
                    other => {
                        return Err(syntax(line, format!("unsupported format {other:?}")));
                    }
                }
                let n = parse_id(toks.next(), line)?;
                declared = parse_id(toks.next(), line)?;
                graph = Some(Graph::new(n));
            }
            Some("e") => {
                let g = graph.as_mut().ok_or(ParseError::MissingProblemLine)?;
                let u = parse_id(toks.next(), line)?;
                let v = parse_id(toks.next(), line)?;
                for w in [u, v] {
                    if w == 0 || w > g.n() {
                        return Err(ParseError::VertexOutOfRange {
                            line,
                            vertex: w,
                            n: g.n(),
                        });
                    }
                }
                if u == v {
                    return Err(syntax(line, format!("self-loop at vertex {u}")));
                }
                g.add_edge(u - 1, v - 1).expect("range checked");
                seen += 1;
            }
            Some(other) => return Err(syntax(line, format!("unknown line type `{other}`"))),
        }
        if toks.next().is_some() {
            return Err(syntax(line, "trailing tokens"));
        }
    }
    let graph = graph.ok_or(ParseError::MissingProblemLine)?;
    if seen != declared {
        return Err(ParseError::EdgeCountMismatch {
            declared,
            found: seen,
        });
    }
    Ok(graph)
}

/// Renders `graph` in DIMACS format with the given comment lines.
pub fn write_graph(graph: &Graph, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        writeln!(out, "c {c}").unwrap();
    }
    writeln!(out, "p edge {} {}", graph.n(), graph.edge_count()).unwrap();
    for (u, v) in graph.edges() {
        writeln!(out, "e {} {}", u + 1, v + 1).unwrap();
    }
    out
}

/// Parses a modulator sidecar against a graph on `n` vertices.
/// Returns sorted, distinct 0-based ids.
pub fn parse_modulator(text: &str, n: usize) -> Result<Vec<usize>, ParseError> {
    let mut ids = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        let v = parse_id(Some(t), line)?;
        if v == 0 || v > n {
            return Err(ParseError::VertexOutOfRange { line, vertex: v, n });
        }
        ids.push(v - 1);
    }
    ids.sort_unstable();
    ids.dedup();
    Ok(ids)
}

pub fn write_modulator(modulator: &[usize]) -> String {
    let mut sorted = modulator.to_vec();
    sorted.sort_unstable();
    sorted.iter().map(|v| format!("{}\n", v + 1)).collect()
}
