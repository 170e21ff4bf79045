//! Cache-free engine. Every shard rebuilds the cofaces and supersimplices it
//! needs straight from the adjacency lists, so shards share nothing but the
//! input graph and the output sink.
//!
//! Edges are keyed by vertex tuples while shards run; ids are assigned once
//! at the end against a complex used only for naming.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::complex::{build_flag_complex, for_each_simplex_from, FlagComplex};
use crate::error::Error;
use crate::graph::{DirectedGraph, VertexId};
use crate::nearness::{resolve_novel, Definition, Direction};
use crate::parallel::{run_sharded, RunStats, Strategy};
use crate::qdigraph::{Edge, Provenance, QDigraph};
use crate::simplex::{coface_candidates, coface_scan, for_each_face_of_dim, Simplex};

/// All strict supersimplices of `mu` up to dimension `d_max`, by breadth-
/// first insertion of adjacent vertices at every position. Sorted by
/// dimension, then lexicographically.
pub fn supersimplex_closure(
    mu: &[VertexId],
    graph: &DirectedGraph,
    d_max: Option<usize>,
) -> Vec<Simplex> {
    let limit = d_max.unwrap_or(usize::MAX);
    let mut seen: FxHashSet<Vec<VertexId>> = FxHashSet::default();
    let mut frontier: Vec<Vec<VertexId>> = vec![mu.to_vec()];
    let mut found = Vec::new();
    let mut candidates = Vec::new();
    // a frontier simplex with `len` vertices has dimension `len - 1`
    while !frontier.is_empty() && frontier[0].len() <= limit {
        let mut next = Vec::new();
        for s in &frontier {
            for pos in 0..=s.len() {
                coface_candidates(s, pos, graph, &mut candidates);
                for &v in &candidates {
                    let mut t = Vec::with_capacity(s.len() + 1);
                    t.extend_from_slice(&s[..pos]);
                    t.push(v);
                    t.extend_from_slice(&s[pos..]);
                    if seen.insert(t.clone()) {
                        next.push(t);
                    }
                }
            }
        }
        next.sort_unstable();
        found.extend(next.iter().cloned().map(Simplex::new));
        frontier = next;
    }
    found
}

/// A near pair identified by vertex tuples.
pub type TupleEdge = (Simplex, Simplex);

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BottomUpStats {
    /// q-simplices processed as shards.
    pub alpha_shards: u64,
    /// Largest number of closure simplices held by one shard at once.
    pub peak_shard_state: u64,
    /// Coface candidates tested via adjacency scans.
    pub coface_scans: u64,
    pub shared_face: RunStats,
    pub inclusion: RunStats,
}

/// Bottom-up result before ids are assigned.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BottomUpEdges {
    pub inclusion: FxHashSet<TupleEdge>,
    pub shared_face: FxHashSet<TupleEdge>,
}

impl BottomUpEdges {
    /// Assigns simplex ids using `complex`, which must contain every simplex
    /// that occurs in an edge.
    pub fn into_qdigraph(self, complex: &FlagComplex, q: usize, direction: Direction) -> QDigraph {
        let name = |(s, t): TupleEdge| {
            let src = complex.id_of(&s).expect("bottom-up simplex missing from naming complex");
            let dst = complex.id_of(&t).expect("bottom-up simplex missing from naming complex");
            Edge::new(src, dst)
        };
        QDigraph::from_parts(
            complex,
            q,
            direction,
            self.inclusion.into_iter().map(name),
            self.shared_face.into_iter().map(name),
        )
    }
}

/// Computes both criteria for the novel definition without any global
/// cache.
pub fn bottomup_edges(
    graph: &DirectedGraph,
    q: usize,
    direction: Direction,
    d_max: Option<usize>,
    strategy: &Strategy,
) -> Result<(BottomUpEdges, BottomUpStats), Error> {
    if direction.definition != Definition::Novel {
        return Err(Error::Unsupported(
            "the bottom-up engine only supports the novel definition".into(),
        ));
    }
    strategy.validate()?;
    let i = resolve_novel(direction.i, q)?;
    let j = resolve_novel(direction.j, q)?;
    let limit = d_max.unwrap_or(usize::MAX);

    // q-simplices, enumerated directly from the graph
    let mut alphas: Vec<Vec<VertexId>> = Vec::new();
    for v in 0..graph.vertex_count() as VertexId {
        for_each_simplex_from(graph, v, Some(q), |s| {
            if s.len() == q + 1 {
                alphas.push(s.to_vec());
            }
        });
    }

    let peak = AtomicUsize::new(0);
    let scans = AtomicU64::new(0);
    let shared_shard = |alpha: &Vec<VertexId>, out: &mut Vec<TupleEdge>| {
        if q + 1 > limit {
            return;
        }
        let left = coface_scan(alpha, i, graph).expect("i <= q + 1");
        let right = if i == j {
            left.clone()
        } else {
            coface_scan(alpha, j, graph).expect("j <= q + 1")
        };
        if left.is_empty() || right.is_empty() {
            return;
        }
        // shard-local closures, dropped when the shard ends
        let mut closures: FxHashMap<&Simplex, Vec<Simplex>> = FxHashMap::default();
        for mu in left.iter().chain(&right) {
            closures.entry(mu).or_insert_with(|| {
                let mut c = vec![mu.clone()];
                c.extend(supersimplex_closure(mu, graph, d_max));
                c
            });
        }
        let held: usize = closures.values().map(Vec::len).sum();
        peak.fetch_max(held, Ordering::Relaxed);
        scans.fetch_add((left.len() + right.len()) as u64, Ordering::Relaxed);
        for mu_s in &left {
            for mu_t in &right {
                for s in &closures[mu_s] {
                    for t in &closures[mu_t] {
                        if s != t {
                            out.push((s.clone(), t.clone()));
                        }
                    }
                }
            }
        }
    };
    let (shared_face, shared_run) = run_sharded(&alphas, shared_shard, strategy)?;

    // criterion [I]: every simplex above q emits its own faces
    let roots: Vec<VertexId> = (0..graph.vertex_count() as VertexId).collect();
    let inclusion_shard = |&root: &VertexId, out: &mut Vec<TupleEdge>| {
        for_each_simplex_from(graph, root, d_max, |tau| {
            let p = tau.len() - 1;
            if p <= q {
                return;
            }
            let owner = Simplex::from(tau);
            for d in q..p {
                for_each_face_of_dim(tau, d, |face| {
                    out.push((Simplex::from(face), owner.clone()));
                });
            }
        });
    };
    let (inclusion, inclusion_run) = run_sharded(&roots, inclusion_shard, strategy)?;

    let stats = BottomUpStats {
        alpha_shards: alphas.len() as u64,
        peak_shard_state: peak.into_inner() as u64,
        coface_scans: scans.into_inner(),
        shared_face: shared_run,
        inclusion: inclusion_run,
    };
    Ok((
        BottomUpEdges {
            inclusion,
            shared_face,
        },
        stats,
    ))
}

/// The novel (q,i,j)-digraph computed bottom-up. The flag complex is only
/// enumerated at the end to name the simplices.
pub fn get_q_bottomup(
    graph: &DirectedGraph,
    q: usize,
    direction: Direction,
    d_max: Option<usize>,
    strategy: &Strategy,
) -> Result<(QDigraph, BottomUpStats), Error> {
    let (edges, stats) = bottomup_edges(graph, q, direction, d_max, strategy)?;
    let complex = build_flag_complex(graph, d_max);
    Ok((edges.into_qdigraph(&complex, q, direction), stats))
}

/// Like [`get_q_bottomup`], naming simplices with an existing complex built
/// from the same graph and `d_max`.
pub fn get_q_bottomup_named(
    graph: &DirectedGraph,
    complex: &FlagComplex,
    q: usize,
    direction: Direction,
    strategy: &Strategy,
) -> Result<(QDigraph, BottomUpStats), Error> {
    let (edges, stats) = bottomup_edges(graph, q, direction, complex.clipped_at(), strategy)?;
    Ok((edges.into_qdigraph(complex, q, direction), stats))
}

/// Edge provenance is part of the contract, so callers comparing engines
/// can rely on this.
pub fn provenance_of(edges: &BottomUpEdges, edge: &TupleEdge) -> Option<Provenance> {
    match (edges.inclusion.contains(edge), edges.shared_face.contains(edge)) {
        (true, true) => Some(Provenance::Both),
        (true, false) => Some(Provenance::Inclusion),
        (false, true) => Some(Provenance::SharedFace),
        (false, false) => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{erdos_renyi, tournament};
    use crate::simplex::{includes, FaceIndex::{At, Last}};
    use crate::topdown::get_q_topdown;

    #[test]
    fn closure_on_t4() {
        let got = supersimplex_closure(&[0, 1], &tournament(4), None);
        let expected: Vec<Simplex> = vec![
            vec![0, 1, 2].into(),
            vec![0, 1, 3].into(),
            vec![0, 1, 2, 3].into(),
        ];
        assert_eq!(got, expected);
        assert!(supersimplex_closure(&[0, 1, 2, 3], &tournament(4), None).is_empty());
        assert_eq!(supersimplex_closure(&[0, 1], &tournament(4), Some(2)).len(), 2);
    }

    #[test]
    fn closure_matches_complex_filter() {
        let g = erdos_renyi(12, 0.5, 13);
        let c = build_flag_complex(&g, None);
        for (_, mu) in c.iter_from(1).filter(|(id, _)| id.dim <= 2) {
            let got = supersimplex_closure(mu, &g, None);
            let expected: Vec<Simplex> = c
                .iter_from(mu.len())
                .filter(|(_, t)| includes(mu, t))
                .map(|(_, t)| Simplex::from(t))
                .collect();
            assert_eq!(got, expected);
        }
    }

    #[test]
    fn matches_topdown() {
        let g = erdos_renyi(10, 0.6, 17);
        let c = build_flag_complex(&g, None);
        for q in 1..=2 {
            for i in [At(0), At(1), Last] {
                for j in [At(0), At(2), Last] {
                    let dir = Direction::novel(i, j);
                    let (expected, _) = get_q_topdown(&c, q, dir, &Strategy::sequential()).unwrap();
                    let (got, stats) = get_q_bottomup(&g, q, dir, None, &Strategy::sequential()).unwrap();
                    assert_eq!(got, expected, "q={q} {dir}");
                    assert!(stats.peak_shard_state as usize <= c.total());
                }
            }
        }
    }

    #[test]
    fn clipped_run_matches_clipped_topdown() {
        let g = erdos_renyi(10, 0.7, 3);
        let c = build_flag_complex(&g, Some(3));
        let dir = Direction::novel(At(1), At(0));
        let (expected, _) = get_q_topdown(&c, 1, dir, &Strategy::sequential()).unwrap();
        let (got, _) = get_q_bottomup_named(&g, &c, 1, dir, &Strategy::sequential()).unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn rejects_hat() {
        let g = tournament(4);
        let dir = Direction::hat(At(0), At(0));
        assert!(matches!(
            get_q_bottomup(&g, 1, dir, None, &Strategy::sequential()),
            Err(Error::Unsupported(_))
        ));
    }
}
