//! Directed flag complexes: every totally ordered clique of a digraph, grouped
//! by dimension.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::graph::{intersect_sorted, DirectedGraph, VertexId};

/// Stable identifier of a simplex: its dimension and its ordinal within the
/// lexicographically sorted level. Serialized as `d.k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SimplexId {
    pub dim: u32,
    pub index: u32,
}

impl SimplexId {
    pub fn new(dim: usize, index: usize) -> Self {
        Self {
            dim: dim as u32,
            index: index as u32,
        }
    }
}

impl fmt::Display for SimplexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.dim, self.index)
    }
}

impl FromStr for SimplexId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (d, k) = s
            .split_once('.')
            .ok_or_else(|| format!("simplex id `{s}` is not of the form d.k"))?;
        let dim = d.parse().map_err(|_| format!("bad dimension in `{s}`"))?;
        let index = k.parse().map_err(|_| format!("bad ordinal in `{s}`"))?;
        Ok(Self { dim, index })
    }
}

/// All simplices of one dimension, stored as a flat vertex buffer with
/// stride `dim + 1`, in ascending lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    dim: usize,
    data: Vec<VertexId>,
}

impl Level {
    fn new(dim: usize) -> Self {
        Self {
            dim,
            data: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len() / (self.dim + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn get(&self, index: usize) -> &[VertexId] {
        let w = self.dim + 1;
        &self.data[index * w..(index + 1) * w]
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, VertexId> {
        self.data.chunks_exact(self.dim + 1)
    }

    /// Ordinal of `simplex` within this level, by binary search.
    pub fn position(&self, simplex: &[VertexId]) -> Option<usize> {
        if simplex.len() != self.dim + 1 {
            return None;
        }
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.get(mid).cmp(simplex) {
                Ordering::Less => lo = mid + 1,
                Ordering::Greater => hi = mid,
                Ordering::Equal => return Some(mid),
            }
        }
        None
    }
}

/// The directed flag complex `(Σ_0, …, Σ_D)` of a graph, optionally clipped
/// at a maximal dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlagComplex {
    levels: Vec<Level>,
    clipped_at: Option<usize>,
}

impl FlagComplex {
    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn level(&self, dim: usize) -> Option<&Level> {
        self.levels.get(dim).filter(|l| !l.is_empty())
    }

    /// Highest dimension holding at least one simplex; `None` for the empty
    /// graph.
    pub fn max_dim(&self) -> Option<usize> {
        self.levels.iter().rposition(|l| !l.is_empty())
    }

    pub fn clipped_at(&self) -> Option<usize> {
        self.clipped_at
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Level::len).collect()
    }

    pub fn len_of(&self, dim: usize) -> usize {
        self.levels.get(dim).map_or(0, Level::len)
    }

    /// `|Σ_{≥q}|`
    pub fn count_from(&self, q: usize) -> usize {
        self.levels.iter().skip(q).map(Level::len).sum()
    }

    pub fn total(&self) -> usize {
        self.count_from(0)
    }

    pub fn simplex(&self, id: SimplexId) -> &[VertexId] {
        self.levels[id.dim as usize].get(id.index as usize)
    }

    pub fn id_of(&self, simplex: &[VertexId]) -> Option<SimplexId> {
        let dim = simplex.len().checked_sub(1)?;
        let index = self.levels.get(dim)?.position(simplex)?;
        Some(SimplexId::new(dim, index))
    }

    /// Simplices of dimension `≥ q` in ascending id order.
    pub fn iter_from(&self, q: usize) -> impl Iterator<Item = (SimplexId, &[VertexId])> + '_ {
        self.levels
            .iter()
            .skip(q)
            .flat_map(|level| {
                level
                    .iter()
                    .enumerate()
                    .map(move |(k, s)| (SimplexId::new(level.dim, k), s))
            })
    }

    /// Ids of `Σ_{≥q}` in ascending order.
    pub fn ids_from(&self, q: usize) -> Vec<SimplexId> {
        self.iter_from(q).map(|(id, _)| id).collect()
    }
}

/// Enumerates the directed flag complex of `graph` up to dimension `d_max`.
///
/// Each simplex `(v0 … vk)` is extended by every `w` in
/// `succ(v0) ∩ … ∩ succ(vk)`, appended at the end. Every totally ordered
/// clique is reached exactly once (through its own prefix chain), and the
/// depth-first order with ascending candidates leaves each level sorted.
pub fn build_flag_complex(graph: &DirectedGraph, d_max: Option<usize>) -> FlagComplex {
    let n = graph.vertex_count();
    let mut levels = vec![Level::new(0)];
    for v in 0..n as VertexId {
        for_each_simplex_from(graph, v, d_max, |s| {
            let dim = s.len() - 1;
            if levels.len() <= dim {
                levels.push(Level::new(dim));
            }
            levels[dim].data.extend_from_slice(s);
        });
    }
    FlagComplex {
        levels,
        clipped_at: d_max,
    }
}

/// Visits every simplex whose first vertex is `root` (the root itself
/// included), up to dimension `d_max`, in lexicographic depth-first order.
pub fn for_each_simplex_from<F>(graph: &DirectedGraph, root: VertexId, d_max: Option<usize>, mut visit: F)
where
    F: FnMut(&[VertexId]),
{
    let limit = d_max.unwrap_or(usize::MAX);
    let mut prefix = vec![root];
    visit(&prefix);
    if limit >= 1 {
        walk(graph, &mut prefix, graph.successors(root), limit, &mut visit);
    }
}

fn walk<F>(
    graph: &DirectedGraph,
    prefix: &mut Vec<VertexId>,
    candidates: &[VertexId],
    limit: usize,
    visit: &mut F,
) where
    F: FnMut(&[VertexId]),
{
    let dim = prefix.len();
    let mut next = Vec::new();
    for &w in candidates {
        prefix.push(w);
        visit(prefix);
        if dim < limit {
            intersect_sorted(candidates, graph.successors(w), &mut next);
            if !next.is_empty() {
                let owned = std::mem::take(&mut next);
                walk(graph, prefix, &owned, limit, visit);
                next = owned;
            }
        }
        prefix.pop();
    }
}
