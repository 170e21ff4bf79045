//! Ordered simplices and the face, coface and inclusion primitives on them.

use std::fmt;
use std::ops::Deref;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{intersect_sorted, retain_sorted, DirectedGraph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimplexError {
    #[error("face index {index} is out of range for a simplex of dimension {dim}")]
    FaceOutOfRange { index: usize, dim: usize },
    #[error("a 0-simplex has no faces")]
    NoFaces,
    #[error("face dimension {n} is out of range for a simplex of dimension {dim}")]
    FaceDimOutOfRange { n: usize, dim: usize },
}

/// An ordered tuple of distinct vertices `(v0 v1 … vd)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Simplex(Vec<VertexId>);

impl Simplex {
    pub fn new(vertices: Vec<VertexId>) -> Self {
        debug_assert!(
            vertices.iter().all_unique(),
            "simplex vertices must be distinct"
        );
        Self(vertices)
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    /// `|vertices| - 1`; panics on the empty tuple.
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn into_vec(self) -> Vec<VertexId> {
        self.0
    }
}

impl Deref for Simplex {
    type Target = [VertexId];

    fn deref(&self) -> &[VertexId] {
        &self.0
    }
}

impl From<Vec<VertexId>> for Simplex {
    fn from(vertices: Vec<VertexId>) -> Self {
        Self::new(vertices)
    }
}

impl From<&[VertexId]> for Simplex {
    fn from(vertices: &[VertexId]) -> Self {
        Self::new(vertices.to_vec())
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.0.iter().join(" "))
    }
}

/// Index of a face map: a concrete position, or `Last` for "remove the final
/// vertex" (written `inf` on the command line).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FaceIndex {
    At(usize),
    Last,
}

impl FaceIndex {
    /// Position removed by the clamped face map on a simplex of dimension `dim`.
    pub fn clamp_to(self, dim: usize) -> usize {
        match self {
            FaceIndex::At(k) => k.min(dim),
            FaceIndex::Last => dim,
        }
    }
}

impl fmt::Display for FaceIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FaceIndex::At(k) => write!(f, "{k}"),
            FaceIndex::Last => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for FaceIndex {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "inf" | "last" | "LAST" => Ok(FaceIndex::Last),
            _ => s
                .parse::<usize>()
                .map(FaceIndex::At)
                .map_err(|_| format!("face index must be a non-negative integer or `inf`, got `{s}`")),
        }
    }
}

pub(crate) fn remove_at(sigma: &[VertexId], pos: usize) -> Vec<VertexId> {
    let mut out = Vec::with_capacity(sigma.len() - 1);
    out.extend_from_slice(&sigma[..pos]);
    out.extend_from_slice(&sigma[pos + 1..]);
    out
}

/// The unclamped face map `d_i`: removes the vertex at position `i`.
pub fn face(sigma: &[VertexId], i: usize) -> Result<Simplex, SimplexError> {
    if sigma.len() < 2 {
        return Err(SimplexError::NoFaces);
    }
    if i >= sigma.len() {
        return Err(SimplexError::FaceOutOfRange {
            index: i,
            dim: sigma.len() - 1,
        });
    }
    Ok(Simplex(remove_at(sigma, i)))
}

/// The clamped face map: indices past the last position remove the last vertex.
pub fn hat_face(sigma: &[VertexId], i: FaceIndex) -> Result<Simplex, SimplexError> {
    if sigma.len() < 2 {
        return Err(SimplexError::NoFaces);
    }
    Ok(Simplex(remove_at(sigma, i.clamp_to(sigma.len() - 1))))
}

/// All `n`-dimensional faces of `sigma`, in lexicographic order of the kept
/// positions.
pub fn faces_of_dim(sigma: &[VertexId], n: usize) -> Result<Vec<Simplex>, SimplexError> {
    if sigma.is_empty() || n >= sigma.len() {
        return Err(SimplexError::FaceDimOutOfRange {
            n,
            dim: sigma.len().saturating_sub(1),
        });
    }
    Ok(sigma
        .iter()
        .copied()
        .combinations(n + 1)
        .map(Simplex)
        .collect())
}

/// Calls `visit` on every `n`-dimensional face of `sigma` (lexicographic in
/// the kept positions) through one reused buffer.
pub(crate) fn for_each_face_of_dim<F>(sigma: &[VertexId], n: usize, mut visit: F)
where
    F: FnMut(&[VertexId]),
{
    let k = n + 1;
    let len = sigma.len();
    if k > len {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut buf: Vec<VertexId> = sigma[..k].to_vec();
    loop {
        visit(&buf);
        // advance to the next k-combination of 0..len
        let mut p = k;
        while p > 0 && idx[p - 1] == len - k + p - 1 {
            p -= 1;
        }
        if p == 0 {
            return;
        }
        idx[p - 1] += 1;
        for r in p..k {
            idx[r] = idx[r - 1] + 1;
        }
        for r in p - 1..k {
            buf[r] = sigma[idx[r]];
        }
    }
}

/// `true` iff `sigma` is an order-preserving sub-tuple of `tau`.
pub fn includes(sigma: &[VertexId], tau: &[VertexId]) -> bool {
    if sigma.len() > tau.len() {
        return false;
    }
    let mut rest = tau.iter();
    sigma.iter().all(|v| rest.any(|w| w == v))
}

/// Vertices `v` such that inserting `v` at position `i` of `sigma` yields a
/// simplex of `graph`: every earlier vertex must point to `v` and `v` must
/// point to every later vertex. Result is ascending.
pub(crate) fn coface_candidates(
    sigma: &[VertexId],
    i: usize,
    graph: &DirectedGraph,
    out: &mut Vec<VertexId>,
) {
    debug_assert!(i <= sigma.len());
    // Start from the shortest list to keep the merge cheap.
    let lists = sigma.iter().enumerate().map(|(pos, &v)| {
        if pos < i {
            graph.successors(v)
        } else {
            graph.predecessors(v)
        }
    });
    let mut lists: Vec<&[VertexId]> = lists.collect();
    lists.sort_by_key(|l| l.len());
    out.clear();
    match lists.as_slice() {
        [] => out.extend(0..graph.vertex_count() as VertexId),
        [only] => out.extend_from_slice(only),
        [a, b, rest @ ..] => {
            intersect_sorted(a, b, out);
            for list in rest {
                if out.is_empty() {
                    break;
                }
                retain_sorted(out, list);
            }
        }
    }
}

/// All simplices `tau` of `graph` with `face(tau, i) == sigma`, found by
/// scanning the vertices adjacent to `sigma`. Ascending by inserted vertex.
pub fn coface_scan(
    sigma: &[VertexId],
    i: usize,
    graph: &DirectedGraph,
) -> Result<Vec<Simplex>, SimplexError> {
    if i > sigma.len() {
        return Err(SimplexError::FaceOutOfRange {
            index: i,
            dim: sigma.len(),
        });
    }
    let mut candidates = Vec::new();
    coface_candidates(sigma, i, graph, &mut candidates);
    Ok(candidates
        .into_iter()
        .map(|v| {
            let mut tau = Vec::with_capacity(sigma.len() + 1);
            tau.extend_from_slice(&sigma[..i]);
            tau.push(v);
            tau.extend_from_slice(&sigma[i..]);
            Simplex(tau)
        })
        .collect())
}
