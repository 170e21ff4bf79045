//! Pairwise (q,i,j)-nearness predicates.
//!
//! Two definitions are supported. Under the *novel* definition, `σ` is near
//! `τ` by the shared-face criterion when some q-simplex `α` arises as
//! `d_i(μσ) = α = d_j(μτ)` for (q+1)-faces `μσ ↪ σ`, `μτ ↪ τ`. Under the
//! *hat* definition, `α` must embed into both clamped faces `d̂_i(σ)` and
//! `d̂_j(τ)`. Both definitions also accept inclusion `σ ↪ τ`.
//!
//! The predicates take raw vertex tuples. Any sub-tuple of a simplex is a
//! simplex, so no ambient complex is needed.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::VertexId;
use crate::simplex::{includes, FaceIndex};

/// Positions are stored as `u8`; a 64-vertex simplex would already imply
/// `2^64` faces.
const MAX_VERTICES: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NearnessError {
    #[error("face index {index} is outside 0..={max} required by the novel definition at q = {q}")]
    IndexOutOfRange { index: usize, max: usize, q: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Definition {
    Novel,
    Hat,
}

impl fmt::Display for Definition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Definition::Novel => "novel",
            Definition::Hat => "hat",
        })
    }
}

impl FromStr for Definition {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "novel" => Ok(Definition::Novel),
            "hat" => Ok(Definition::Hat),
            _ => Err(format!("unknown definition `{s}` (expected novel or hat)")),
        }
    }
}

/// An ordered pair of face maps together with the nearness definition they
/// belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Direction {
    pub i: FaceIndex,
    pub j: FaceIndex,
    pub definition: Definition,
}

impl Direction {
    pub fn novel(i: FaceIndex, j: FaceIndex) -> Self {
        Self {
            i,
            j,
            definition: Definition::Novel,
        }
    }

    pub fn hat(i: FaceIndex, j: FaceIndex) -> Self {
        Self {
            i,
            j,
            definition: Definition::Hat,
        }
    }

    pub fn with_definition(self, definition: Definition) -> Self {
        Self { definition, ..self }
    }

    /// Checks the index range for the given `q`.
    pub fn validate(&self, q: usize) -> Result<(), NearnessError> {
        if self.definition == Definition::Novel {
            resolve_novel(self.i, q)?;
            resolve_novel(self.j, q)?;
        }
        Ok(())
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}, {})", self.definition, self.i, self.j)
    }
}

/// Maps a face index onto `0..=q+1`; `Last` becomes `q+1`.
pub fn resolve_novel(index: FaceIndex, q: usize) -> Result<usize, NearnessError> {
    match index {
        FaceIndex::Last => Ok(q + 1),
        FaceIndex::At(k) if k <= q + 1 => Ok(k),
        FaceIndex::At(k) => Err(NearnessError::IndexOutOfRange {
            index: k,
            max: q + 1,
            q,
        }),
    }
}

/// `|σ ∩ τ|` as vertex sets.
pub fn shared_vertex_count(sigma: &[VertexId], tau: &[VertexId]) -> usize {
    sigma.iter().filter(|v| tau.contains(v)).count()
}

/// Calls `visit` with the positions (in `σ` and in `τ`) of every common
/// ordered sub-tuple of length `len`, until `visit` returns `true`.
///
/// Shared vertices may appear in different relative orders when the graph
/// has reciprocal edges; only order-consistent sub-tuples are visited.
fn any_common_chain<F>(sigma: &[VertexId], tau: &[VertexId], len: usize, mut visit: F) -> bool
where
    F: FnMut(&[u8], &[u8]) -> bool,
{
    debug_assert!(sigma.len() <= MAX_VERTICES && tau.len() <= MAX_VERTICES);
    let mut pairs = [(0u8, 0u8); MAX_VERTICES];
    let mut count = 0;
    for (a, v) in sigma.iter().enumerate() {
        if let Some(b) = tau.iter().position(|w| w == v) {
            pairs[count] = (a as u8, b as u8);
            count += 1;
        }
    }
    if count < len {
        return false;
    }
    let mut chain_a = [0u8; MAX_VERTICES];
    let mut chain_b = [0u8; MAX_VERTICES];
    chain_search(
        &pairs[..count],
        0,
        0,
        len,
        &mut chain_a,
        &mut chain_b,
        &mut visit,
    )
}

fn chain_search<F>(
    pairs: &[(u8, u8)],
    start: usize,
    depth: usize,
    len: usize,
    chain_a: &mut [u8; MAX_VERTICES],
    chain_b: &mut [u8; MAX_VERTICES],
    visit: &mut F,
) -> bool
where
    F: FnMut(&[u8], &[u8]) -> bool,
{
    if depth == len {
        return visit(&chain_a[..len], &chain_b[..len]);
    }
    let need = len - depth;
    for k in start..=pairs.len() - need {
        let (a, b) = pairs[k];
        if depth > 0 && b <= chain_b[depth - 1] {
            continue;
        }
        chain_a[depth] = a;
        chain_b[depth] = b;
        if chain_search(pairs, k + 1, depth + 1, len, chain_a, chain_b, visit) {
            return true;
        }
    }
    false
}

/// Whether a vertex of the host simplex (with `host_len` vertices) lies in
/// slot `slot` of the chain, i.e. before chain element `slot` and after
/// chain element `slot - 1`. Inserting that vertex at position `slot` of the
/// chain yields a (q+1)-face whose `slot`-th face is the chain.
#[inline]
fn has_gap(chain: &[u8], slot: usize, host_len: usize) -> bool {
    let lo = if slot == 0 { 0 } else { chain[slot - 1] as usize + 1 };
    let hi = if slot == chain.len() {
        host_len
    } else {
        chain[slot] as usize
    };
    hi > lo
}

/// Shared-face criterion of the novel definition with resolved indices.
pub fn novel_shared_face(
    sigma: &[VertexId],
    tau: &[VertexId],
    q: usize,
    i: usize,
    j: usize,
) -> bool {
    if sigma.len() < q + 2 || tau.len() < q + 2 || shared_vertex_count(sigma, tau) <= q {
        return false;
    }
    any_common_chain(sigma, tau, q + 1, |a, b| {
        has_gap(a, i, sigma.len()) && has_gap(b, j, tau.len())
    })
}

/// Shared-face criterion of the hat definition.
pub fn hat_shared_face(
    sigma: &[VertexId],
    tau: &[VertexId],
    q: usize,
    i: FaceIndex,
    j: FaceIndex,
) -> bool {
    if sigma.len() < q + 2 || tau.len() < q + 2 || shared_vertex_count(sigma, tau) <= q {
        return false;
    }
    let skip_a = i.clamp_to(sigma.len() - 1) as u8;
    let skip_b = j.clamp_to(tau.len() - 1) as u8;
    any_common_chain(sigma, tau, q + 1, |a, b| {
        !a.contains(&skip_a) && !b.contains(&skip_b)
    })
}

/// Full novel (q,i,j)-nearness: inclusion, or a shared face.
pub fn is_q_near_novel(
    sigma: &[VertexId],
    tau: &[VertexId],
    q: usize,
    i: FaceIndex,
    j: FaceIndex,
) -> Result<bool, NearnessError> {
    let (i, j) = (resolve_novel(i, q)?, resolve_novel(j, q)?);
    if sigma.len() <= q || tau.len() <= q || shared_vertex_count(sigma, tau) <= q {
        return Ok(false);
    }
    Ok(includes(sigma, tau) || novel_shared_face(sigma, tau, q, i, j))
}

/// Full hat (q,i,j)-nearness: inclusion, or a shared q-face of the clamped
/// faces.
pub fn is_q_near_hat(
    sigma: &[VertexId],
    tau: &[VertexId],
    q: usize,
    i: FaceIndex,
    j: FaceIndex,
) -> bool {
    if sigma.len() <= q || tau.len() <= q || shared_vertex_count(sigma, tau) <= q {
        return false;
    }
    includes(sigma, tau) || hat_shared_face(sigma, tau, q, i, j)
}

/// A validated shared-face test for one `(q, direction)`, as used by the
/// engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SharedFaceTest {
    Novel { q: usize, i: usize, j: usize },
    Hat { q: usize, i: FaceIndex, j: FaceIndex },
}

impl SharedFaceTest {
    pub fn new(q: usize, direction: Direction) -> Result<Self, NearnessError> {
        Ok(match direction.definition {
            Definition::Novel => SharedFaceTest::Novel {
                q,
                i: resolve_novel(direction.i, q)?,
                j: resolve_novel(direction.j, q)?,
            },
            Definition::Hat => SharedFaceTest::Hat {
                q,
                i: direction.i,
                j: direction.j,
            },
        })
    }

    #[inline]
    pub fn holds(&self, sigma: &[VertexId], tau: &[VertexId]) -> bool {
        match *self {
            SharedFaceTest::Novel { q, i, j } => novel_shared_face(sigma, tau, q, i, j),
            SharedFaceTest::Hat { q, i, j } => hat_shared_face(sigma, tau, q, i, j),
        }
    }
}

/// Novel shared-face criterion for every direction `(i, j) ∈ {0..=q+1}²` at
/// once. Bit `i * (q + 2) + j` is set when `σ` is near `τ` in direction
/// `(i, j)`. Requires `q ≤ 6`.
pub fn novel_direction_mask(sigma: &[VertexId], tau: &[VertexId], q: usize) -> u64 {
    assert!(q <= 6, "direction mask supports q <= 6");
    if sigma.len() < q + 2 || tau.len() < q + 2 || shared_vertex_count(sigma, tau) <= q {
        return 0;
    }
    let slots = q + 2;
    let full = if slots * slots == 64 {
        u64::MAX
    } else {
        (1u64 << (slots * slots)) - 1
    };
    let mut mask = 0u64;
    any_common_chain(sigma, tau, q + 1, |a, b| {
        let mut row = 0u64;
        for j in 0..slots {
            if has_gap(b, j, tau.len()) {
                row |= 1 << j;
            }
        }
        for i in 0..slots {
            if has_gap(a, i, sigma.len()) {
                mask |= row << (i * slots);
            }
        }
        mask == full
    });
    mask
}

/// Shared-face criterion of the novel definition, decided through the
/// prefix/split/suffix decomposition of both simplices.
///
/// `σ` is split at a position `i' ≥ i` into `(σ◁, σ_{i'}, σ▷)` and `τ` at
/// `j' ≥ j` likewise. The test succeeds when `σ◁` and `σ▷` share an
/// `i`-vertex and a `(q+1-i)`-vertex piece with `τ`, `τ◁` and `τ▷` share a
/// `j`-vertex and a `(q+1-j)`-vertex piece with `σ`, and both concatenations
/// are the same tuple. Empty pieces (`i = 0`, `i = q+1`, …) are vacuous.
///
/// This deliberately shares no code with [`novel_shared_face`] so that the
/// two can check each other.
pub fn is_q_near_decomposition(
    sigma: &[VertexId],
    tau: &[VertexId],
    q: usize,
    i: usize,
    j: usize,
) -> bool {
    let (n1, m1) = (sigma.len(), tau.len());
    if n1 < q + 2 || m1 < q + 2 || i > q + 1 || j > q + 1 {
        return false;
    }
    // the two pieces together hold q+1 vertices common to both simplices
    if sigma.iter().filter(|v| tau.contains(v)).count() <= q {
        return false;
    }
    for split_s in i..n1 {
        let (s_left, s_right) = (&sigma[..split_s], &sigma[split_s + 1..]);
        if s_left.len() < i || s_right.len() < q + 1 - i {
            continue;
        }
        let lefts: Vec<Vec<VertexId>> = s_left
            .iter()
            .copied()
            .combinations(i)
            .filter(|piece| includes(piece, tau))
            .collect();
        if lefts.is_empty() {
            continue;
        }
        let rights: Vec<Vec<VertexId>> = s_right
            .iter()
            .copied()
            .combinations(q + 1 - i)
            .filter(|piece| includes(piece, tau))
            .collect();
        for (left, right) in lefts.iter().cartesian_product(&rights) {
            let alpha: Vec<VertexId> = left.iter().chain(right).copied().collect();
            let (a_left, a_right) = alpha.split_at(j);
            for split_t in j..m1 {
                let (t_left, t_right) = (&tau[..split_t], &tau[split_t + 1..]);
                if includes(a_left, t_left)
                    && includes(a_right, t_right)
                    && includes(a_left, sigma)
                    && includes(a_right, sigma)
                {
                    return true;
                }
            }
        }
    }
    false
}
