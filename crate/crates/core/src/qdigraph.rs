//! The (q,i,j)-digraph produced by every engine.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::complex::{FlagComplex, SimplexId};
use crate::nearness::Direction;

/// Which nearness criterion produced an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Provenance {
    /// `σ ↪ τ`
    Inclusion,
    /// Shared q-face.
    SharedFace,
    Both,
}

impl Provenance {
    pub fn merge(self, other: Provenance) -> Provenance {
        if self == other {
            self
        } else {
            Provenance::Both
        }
    }

    pub fn has_inclusion(self) -> bool {
        matches!(self, Provenance::Inclusion | Provenance::Both)
    }

    pub fn has_shared_face(self) -> bool {
        matches!(self, Provenance::SharedFace | Provenance::Both)
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Inclusion => "I",
            Provenance::SharedFace => "II",
            Provenance::Both => "both",
        })
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "I" => Ok(Provenance::Inclusion),
            "II" => Ok(Provenance::SharedFace),
            "both" => Ok(Provenance::Both),
            _ => Err(format!("unknown provenance `{s}`")),
        }
    }
}

/// Directed edge `src → dst` between two simplices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub src: SimplexId,
    pub dst: SimplexId,
}

impl Edge {
    pub fn new(src: SimplexId, dst: SimplexId) -> Self {
        Self { src, dst }
    }
}

pub type EdgeSet = FxHashSet<Edge>;

/// The (q,i,j)-digraph: vertices are `Σ_{≥q}`, edges are deduplicated near
/// pairs with their provenance. Self-loops are never stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QDigraph {
    q: usize,
    direction: Direction,
    vertex_count: usize,
    edges: FxHashMap<Edge, Provenance>,
}

impl QDigraph {
    pub fn new(complex: &FlagComplex, q: usize, direction: Direction) -> Self {
        Self {
            q,
            direction,
            vertex_count: complex.count_from(q),
            edges: FxHashMap::default(),
        }
    }

    /// Assembles a digraph from separately computed inclusion and
    /// shared-face edge sets, merging provenance where they overlap.
    pub fn from_parts(
        complex: &FlagComplex,
        q: usize,
        direction: Direction,
        inclusion: impl IntoIterator<Item = Edge>,
        shared_face: impl IntoIterator<Item = Edge>,
    ) -> Self {
        let mut graph = Self::new(complex, q, direction);
        for e in inclusion {
            graph.insert(e, Provenance::Inclusion);
        }
        for e in shared_face {
            graph.insert(e, Provenance::SharedFace);
        }
        graph
    }

    /// Inserts an edge, merging provenance on repeats. Self-loops are dropped.
    pub fn insert(&mut self, edge: Edge, provenance: Provenance) {
        if edge.src == edge.dst {
            return;
        }
        self.edges
            .entry(edge)
            .and_modify(|p| *p = p.merge(provenance))
            .or_insert(provenance);
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// `|Σ_{≥q}|`
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn provenance(&self, edge: &Edge) -> Option<Provenance> {
        self.edges.get(edge).copied()
    }

    pub fn contains(&self, edge: &Edge) -> bool {
        self.edges.contains_key(edge)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, Provenance)> + '_ {
        self.edges.iter().map(|(e, p)| (*e, *p))
    }

    /// Edges in canonical `(src, dst)` order.
    pub fn sorted_edges(&self) -> Vec<(Edge, Provenance)> {
        let mut out: Vec<_> = self.iter().collect();
        out.sort_unstable_by_key(|(e, _)| *e);
        out
    }

    pub fn edge_set(&self) -> EdgeSet {
        self.edges.keys().copied().collect()
    }

    /// Keeps only the edges carrying the given criterion.
    pub fn filter(&self, filter: CriterionFilter) -> QDigraph {
        let mut out = self.clone();
        out.edges.retain(|_, p| filter.accepts(*p));
        out
    }

    /// Writes `src<TAB>dst<TAB>{I|II|both}` lines in canonical order.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (e, p) in self.sorted_edges() {
            writeln!(out, "{}\t{}\t{}", e.src, e.dst, p)?;
        }
        Ok(())
    }

    pub fn to_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("tsv output is ASCII")
    }

    /// Up to `limit` edges present in exactly one of the two digraphs (or
    /// with different provenance), in canonical order.
    pub fn differences(&self, other: &QDigraph, limit: usize) -> Vec<EdgeDifference> {
        let mut diffs: Vec<EdgeDifference> = self
            .iter()
            .filter(|(e, p)| other.provenance(e) != Some(*p))
            .map(|(e, p)| EdgeDifference {
                edge: e,
                left: Some(p),
                right: other.provenance(&e),
            })
            .chain(
                other
                    .iter()
                    .filter(|(e, _)| !self.contains(e))
                    .map(|(e, p)| EdgeDifference {
                        edge: e,
                        left: None,
                        right: Some(p),
                    }),
            )
            .collect();
        diffs.sort_unstable_by_key(|d| d.edge);
        diffs.truncate(limit);
        diffs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeDifference {
    pub edge: Edge,
    pub left: Option<Provenance>,
    pub right: Option<Provenance>,
}

impl fmt::Display for EdgeDifference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |p: Option<Provenance>| p.map_or("-".to_string(), |p| p.to_string());
        write!(
            f,
            "{} -> {}: {} vs {}",
            self.edge.src,
            self.edge.dst,
            show(self.left),
            show(self.right)
        )
    }
}

/// Output filter on edge provenance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionFilter {
    #[default]
    Both,
    Inclusion,
    SharedFace,
}

impl CriterionFilter {
    pub fn accepts(self, p: Provenance) -> bool {
        match self {
            CriterionFilter::Both => true,
            CriterionFilter::Inclusion => p.has_inclusion(),
            CriterionFilter::SharedFace => p.has_shared_face(),
        }
    }
}

impl FromStr for CriterionFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "both" => Ok(CriterionFilter::Both),
            "I" | "i" | "inclusion" => Ok(CriterionFilter::Inclusion),
            "II" | "ii" | "shared-face" => Ok(CriterionFilter::SharedFace),
            _ => Err(format!("unknown criterion filter `{s}` (expected I, II or both)")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_flag_complex;
    use crate::generate::tournament;
    use crate::simplex::FaceIndex;

    fn id(d: usize, k: usize) -> SimplexId {
        SimplexId::new(d, k)
    }

    #[test]
    fn provenance_merges_and_drops_loops() {
        let c = build_flag_complex(&tournament(4), None);
        let dir = Direction::novel(FaceIndex::At(0), FaceIndex::At(0));
        let mut g = QDigraph::new(&c, 1, dir);
        assert_eq!(g.vertex_count(), 11);
        g.insert(Edge::new(id(1, 0), id(2, 0)), Provenance::Inclusion);
        g.insert(Edge::new(id(1, 0), id(2, 0)), Provenance::SharedFace);
        g.insert(Edge::new(id(2, 1), id(2, 0)), Provenance::SharedFace);
        g.insert(Edge::new(id(2, 1), id(2, 1)), Provenance::SharedFace);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.provenance(&Edge::new(id(1, 0), id(2, 0))), Some(Provenance::Both));
        assert_eq!(g.to_tsv(), "1.0\t2.0\tboth\n2.1\t2.0\tII\n");
        assert_eq!(g.filter(CriterionFilter::Inclusion).edge_count(), 1);
        assert_eq!(g.filter(CriterionFilter::SharedFace).edge_count(), 2);
    }

    #[test]
    fn canonical_order_is_numeric() {
        let c = build_flag_complex(&tournament(4), None);
        let dir = Direction::novel(FaceIndex::At(0), FaceIndex::At(0));
        let mut g = QDigraph::new(&c, 1, dir);
        g.insert(Edge::new(id(1, 10), id(2, 0)), Provenance::Inclusion);
        g.insert(Edge::new(id(1, 2), id(2, 0)), Provenance::Inclusion);
        assert_eq!(g.to_tsv(), "1.2\t2.0\tI\n1.10\t2.0\tI\n");
    }

    #[test]
    fn differences_report_both_sides() {
        let c = build_flag_complex(&tournament(4), None);
        let dir = Direction::novel(FaceIndex::At(0), FaceIndex::At(0));
        let a = QDigraph::from_parts(&c, 1, dir, [Edge::new(id(1, 0), id(2, 0))], []);
        let b = QDigraph::from_parts(&c, 1, dir, [], [Edge::new(id(1, 1), id(2, 0))]);
        let d = a.differences(&b, 10);
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].to_string(), "1.0 -> 2.0: I vs -");
        assert!(a.differences(&a, 10).is_empty());
    }
}
