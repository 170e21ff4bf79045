//! Graph loading and complex serialization.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::FlagComplex;
use crate::graph::{DirectedGraph, VertexId};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: self-loop `{text}` is not allowed")]
    SelfLoop { line: usize, text: String },
    #[error("line {line}: expected two non-negative integers, found `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: vertex {vertex} is outside 0..{vertex_count}")]
    OutOfRange {
        line: usize,
        vertex: u64,
        vertex_count: usize,
    },
    #[error("line {line}: {message}")]
    Header { line: usize, message: String },
    #[error("too many distinct vertices ({0}) for 32-bit ids")]
    TooManyVertices(usize),
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    /// One `u v` pair per line.
    EdgeList,
    /// `dim 0`, a vertex count line, `dim 1`, then `u v` lines.
    Flag,
}

impl fmt::Display for InputFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::EdgeList => "edgelist",
            Self::Flag => "flag",
        })
    }
}

impl FromStr for InputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "edgelist" | "edge-list" => Ok(Self::EdgeList),
            "flag" => Ok(Self::Flag),
            other => Err(format!("unknown input format `{other}` (expected edgelist or flag)")),
        }
    }
}

/// A parsed graph together with its original vertex labels:
/// dense vertex `v` carries label `labels[v]`.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: DirectedGraph,
    pub labels: Vec<u64>,
    /// Line numbers of edges that repeated an earlier edge and were dropped.
    pub duplicate_lines: Vec<usize>,
}

pub fn load<R: BufRead>(reader: R, format: InputFormat) -> Result<LoadedGraph, ParseError> {
    match format {
        InputFormat::EdgeList => parse_edge_list(reader),
        InputFormat::Flag => parse_flag(reader),
    }
}

/// Lines that carry content, with 1-based line numbers. Comments start with
/// `#`.
fn content_lines<R: BufRead>(reader: R) -> impl Iterator<Item = Result<(usize, String), ParseError>> {
    reader
        .lines()
        .enumerate()
        .filter_map(|(k, line)| match line {
            Err(e) => Some(Err(ParseError::Io(e))),
            Ok(text) => {
                let trimmed = text.trim();
                if trimmed.is_empty() || trimmed.starts_with('#') {
                    None
                } else {
                    Some(Ok((k + 1, trimmed.to_string())))
                }
            }
        })
}

fn parse_pair(line: usize, text: &str) -> Result<(u64, u64), ParseError> {
    let malformed = || ParseError::Malformed {
        line,
        text: text.to_string(),
    };
    let mut parts = text.split_whitespace();
    let u = parts.next().and_then(|t| t.parse().ok()).ok_or_else(malformed)?;
    let v = parts.next().and_then(|t| t.parse().ok()).ok_or_else(malformed)?;
    if parts.next().is_some() {
        return Err(malformed());
    }
    if u == v {
        return Err(ParseError::SelfLoop {
            line,
            text: text.to_string(),
        });
    }
    Ok((u, v))
}

/// Parses a whitespace-separated edge list with arbitrary integer labels.
/// Labels are remapped to dense ids in ascending label order.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<LoadedGraph, ParseError> {
    let mut raw = Vec::new();
    for entry in content_lines(reader) {
        let (line, text) = entry?;
        raw.push((line, parse_pair(line, &text)?));
    }
    let labels: Vec<u64> = raw
        .iter()
        .flat_map(|&(_, (u, v))| [u, v])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    if labels.len() > VertexId::MAX as usize {
        return Err(ParseError::TooManyVertices(labels.len()));
    }
    let dense = |label: u64| labels.binary_search(&label).expect("label collected above") as VertexId;
    let mut seen = FxHashSet::default();
    let mut edges = Vec::with_capacity(raw.len());
    let mut duplicate_lines = Vec::new();
    for (line, (u, v)) in raw {
        let e = (dense(u), dense(v));
        if seen.insert(e) {
            edges.push(e);
        } else {
            duplicate_lines.push(line);
        }
    }
    let graph = DirectedGraph::from_edges(labels.len(), edges).expect("edges validated while parsing");
    Ok(LoadedGraph {
        graph,
        labels,
        duplicate_lines,
    })
}

/// Parses the minimal flag-style format. Vertices are `0..count` and keep
/// their labels.
pub fn parse_flag<R: BufRead>(reader: R) -> Result<LoadedGraph, ParseError> {
    let mut lines = content_lines(reader);
    match lines.next().transpose()? {
        Some((_, text)) if text.split_whitespace().eq(["dim", "0"]) => {}
        Some((line, text)) => {
            return Err(ParseError::Header {
                line,
                message: format!("expected `dim 0`, found `{text}`"),
            })
        }
        None => {
            return Err(ParseError::Header {
                line: 0,
                message: "missing `dim 0` header".into(),
            })
        }
    }
    let vertex_count = match lines.next().transpose()? {
        Some((line, text)) => text.parse::<usize>().map_err(|_| ParseError::Header {
            line,
            message: format!("expected a vertex count, found `{text}`"),
        })?,
        None => {
            return Err(ParseError::Header {
                line: 0,
                message: "missing vertex count".into(),
            })
        }
    };
    if vertex_count > VertexId::MAX as usize {
        return Err(ParseError::TooManyVertices(vertex_count));
    }
    let mut edges = Vec::new();
    let mut duplicate_lines = Vec::new();
    let mut seen = FxHashSet::default();
    if let Some(entry) = lines.next() {
        let (line, text) = entry?;
        if !text.split_whitespace().eq(["dim", "1"]) {
            return Err(ParseError::Header {
                line,
                message: format!("expected `dim 1`, found `{text}`"),
            });
        }
        for entry in lines {
            let (line, text) = entry?;
            let (u, v) = parse_pair(line, &text)?;
            for vertex in [u, v] {
                if vertex >= vertex_count as u64 {
                    return Err(ParseError::OutOfRange {
                        line,
                        vertex,
                        vertex_count,
                    });
                }
            }
            let e = (u as VertexId, v as VertexId);
            if seen.insert(e) {
                edges.push(e);
            } else {
                duplicate_lines.push(line);
            }
        }
    }
    let graph = DirectedGraph::from_edges(vertex_count, edges).expect("edges validated while parsing");
    Ok(LoadedGraph {
        graph,
        labels: (0..vertex_count as u64).collect(),
        duplicate_lines,
    })
}

/// Writes `id<TAB>dim<TAB>v0 v1 … vd` for every simplex of dimension `≥ from`,
/// in id order. Vertices are written as dense ids.
pub fn write_simplices<W: Write>(complex: &FlagComplex, from: usize, mut out: W) -> io::Result<()> {
    for (id, s) in complex.iter_from(from) {
        write!(out, "{id}\t{}\t", id.dim)?;
        for (k, v) in s.iter().enumerate() {
            if k > 0 {
                out.write_all(b" ")?;
            }
            write!(out, "{v}")?;
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// Writes `dense_id<TAB>label` for every vertex.
pub fn write_vertex_map<W: Write>(labels: &[u64], mut out: W) -> io::Result<()> {
    for (v, label) in labels.iter().enumerate() {
        writeln!(out, "{v}\t{label}")?;
    }
    Ok(())
}

/// Writes a graph as an edge list over its dense ids.
pub fn write_edge_list<W: Write>(graph: &DirectedGraph, mut out: W) -> io::Result<()> {
    for (u, v) in graph.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_flag_complex;
    use crate::generate::tournament;

    fn edge_list(text: &str) -> Result<LoadedGraph, ParseError> {
        parse_edge_list(text.as_bytes())
    }

    #[test]
    fn comments_blank_lines_and_remapping() {
        let g = edge_list("# header\n\n10 20\n20 30\n  \n10 30\n").unwrap();
        assert_eq!(g.labels, vec![10, 20, 30]);
        assert_eq!(g.graph.edge_count(), 3);
        assert!(g.graph.has_edge(0, 2));
    }

    #[test]
    fn self_loop_cites_line() {
        let err = edge_list("0 1\n\n3 3\n").unwrap_err();
        assert!(matches!(err, ParseError::SelfLoop { line: 3, .. }));
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(edge_list("0 x\n"), Err(ParseError::Malformed { line: 1, .. })));
        assert!(matches!(edge_list("0 1 2\n"), Err(ParseError::Malformed { .. })));
        assert!(matches!(edge_list("-1 2\n"), Err(ParseError::Malformed { .. })));
    }

    #[test]
    fn duplicates_are_collapsed() {
        let g = edge_list("0 1\n0 1\n1 0\n").unwrap();
        assert_eq!(g.graph.edge_count(), 2);
        assert_eq!(g.duplicate_lines, vec![2]);
    }

    #[test]
    fn empty_input() {
        let g = edge_list("").unwrap();
        assert_eq!(g.graph.vertex_count(), 0);
    }

    #[test]
    fn flag_format() {
        let g = parse_flag("dim 0\n4\ndim 1\n0 1\n2 3\n".as_bytes()).unwrap();
        assert_eq!(g.graph.vertex_count(), 4);
        assert_eq!(g.graph.edge_count(), 2);
        let isolated = parse_flag("dim 0\n3\n".as_bytes()).unwrap();
        assert_eq!(isolated.graph.vertex_count(), 3);
        assert!(matches!(
            parse_flag("dim 0\n2\ndim 1\n0 5\n".as_bytes()),
            Err(ParseError::OutOfRange { line: 4, .. })
        ));
        assert!(matches!(parse_flag("dim 1\n".as_bytes()), Err(ParseError::Header { .. })));
    }

    #[test]
    fn simplices_tsv() {
        let c = build_flag_complex(&tournament(3), None);
        let mut buf = Vec::new();
        write_simplices(&c, 1, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "1.0\t1\t0 1\n1.1\t1\t0 2\n1.2\t1\t1 2\n2.0\t2\t0 1 2\n");
    }

    #[test]
    fn edge_list_round_trip() {
        let g = tournament(5);
        let mut buf = Vec::new();
        write_edge_list(&g, &mut buf).unwrap();
        let back = parse_edge_list(buf.as_slice()).unwrap();
        assert_eq!(back.graph, g);
    }
}
