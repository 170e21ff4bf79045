//! Quadratic all-pairs engine, used as the reference for the other
//! engines.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::complex::{FlagComplex, SimplexId};
use crate::error::Error;
use crate::nearness::{
    novel_direction_mask, shared_vertex_count, Definition, Direction, SharedFaceTest,
};
use crate::parallel::{run_sharded, RunStats, Strategy};
use crate::qdigraph::{Edge, Provenance, QDigraph};
use crate::simplex::includes;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopDownStats {
    /// Ordered pairs `(σ, τ)`, `σ ≠ τ`, that were examined.
    pub pair_checks: u64,
    pub run: RunStats,
}

/// All edges of the (q,i,j)-digraph by checking every ordered pair of
/// `Σ_{≥q}`.
pub fn get_q_topdown(
    complex: &FlagComplex,
    q: usize,
    direction: Direction,
    strategy: &Strategy,
) -> Result<(QDigraph, TopDownStats), Error> {
    let (mut graphs, stats) = get_q_topdown_sweep(complex, q, &[direction], strategy)?;
    Ok((graphs.pop().expect("one direction in, one digraph out"), stats))
}

/// Runs the all-pairs loop once and evaluates every requested direction on
/// each pair. For several novel directions the shared-face criterion is
/// decided for all of them in one pass over the common faces.
pub fn get_q_topdown_sweep(
    complex: &FlagComplex,
    q: usize,
    directions: &[Direction],
    strategy: &Strategy,
) -> Result<(Vec<QDigraph>, TopDownStats), Error> {
    let tests = directions
        .iter()
        .map(|d| SharedFaceTest::new(q, *d))
        .collect::<Result<Vec<_>, _>>()?;
    let novel_slots: Vec<Option<usize>> = tests
        .iter()
        .map(|t| match *t {
            SharedFaceTest::Novel { i, j, .. } => Some(i * (q + 2) + j),
            SharedFaceTest::Hat { .. } => None,
        })
        .collect();
    let use_mask = q <= 6 && novel_slots.iter().flatten().count() > 1;

    let members: Vec<(SimplexId, &[u32])> = complex.iter_from(q).collect();
    let sources: Vec<usize> = (0..members.len()).collect();
    let pair_checks = AtomicU64::new(0);

    let shard = |&src: &usize, out: &mut Vec<(usize, Edge, Provenance)>| {
        let (sid, sigma) = members[src];
        let mut checks = 0u64;
        for (dst, &(tid, tau)) in members.iter().enumerate() {
            if dst == src {
                continue;
            }
            checks += 1;
            if shared_vertex_count(sigma, tau) <= q {
                continue;
            }
            let inclusion = includes(sigma, tau);
            let mask = if use_mask {
                novel_direction_mask(sigma, tau, q)
            } else {
                0
            };
            for (k, test) in tests.iter().enumerate() {
                let shared = match novel_slots[k] {
                    Some(bit) if use_mask => mask >> bit & 1 == 1,
                    _ => test.holds(sigma, tau),
                };
                let provenance = match (inclusion, shared) {
                    (true, true) => Provenance::Both,
                    (true, false) => Provenance::Inclusion,
                    (false, true) => Provenance::SharedFace,
                    (false, false) => continue,
                };
                out.push((k, Edge::new(sid, tid), provenance));
            }
        }
        pair_checks.fetch_add(checks, Ordering::Relaxed);
    };
    let (found, run) = run_sharded(&sources, shard, strategy)?;

    let mut graphs: Vec<QDigraph> = directions
        .iter()
        .map(|d| QDigraph::new(complex, q, *d))
        .collect();
    for (k, edge, provenance) in found {
        graphs[k].insert(edge, provenance);
    }
    let stats = TopDownStats {
        pair_checks: pair_checks.into_inner(),
        run,
    };
    Ok((graphs, stats))
}

/// Every direction the top-down sweep would accept for `definition` at `q`:
/// all of `{0..=q+1}²` for novel; `{0..=q+1, LAST}²` for hat.
pub fn all_directions(q: usize, definition: Definition) -> Vec<Direction> {
    use crate::simplex::FaceIndex::{At, Last};
    let mut indices: Vec<_> = (0..=q + 1).map(At).collect();
    if definition == Definition::Hat {
        indices.push(Last);
    }
    let mut out = Vec::new();
    for &i in &indices {
        for &j in &indices {
            out.push(Direction { i, j, definition });
        }
    }
    out
}
