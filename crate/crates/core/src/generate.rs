//! Seeded synthetic graph generators.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{DirectedGraph, VertexId};

/// Every ordered pair `(u, v)`, `u ≠ v`, becomes an edge independently with
/// probability `p`. Pairs are drawn in row-major order from one seeded stream.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> DirectedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in 0..n as VertexId {
            if u != v && rng.gen_bool(p.clamp(0.0, 1.0)) {
                edges.push((u, v));
            }
        }
    }
    DirectedGraph::from_edges(n, edges).expect("generated edges are valid")
}

/// The transitive tournament: `u → v` for every `u < v`.
pub fn tournament(n: usize) -> DirectedGraph {
    let edges = (0..n as VertexId).flat_map(|u| (u + 1..n as VertexId).map(move |v| (u, v)));
    DirectedGraph::from_edges(n, edges).expect("generated edges are valid")
}

/// Vertices are split into consecutive layers of `width`; each pair from an
/// earlier to a later layer becomes an edge with probability `p`.
pub fn layered_dag(n: usize, width: usize, p: f64, seed: u64) -> DirectedGraph {
    let width = width.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u / width + 1) * width..n {
            if rng.gen_bool(p.clamp(0.0, 1.0)) {
                edges.push((u as VertexId, v as VertexId));
            }
        }
    }
    DirectedGraph::from_edges(n, edges).expect("generated edges are valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    ErdosRenyi { n: usize, p: f64, seed: u64 },
    Tournament { n: usize },
    LayeredDag { n: usize, width: usize, p: f64, seed: u64 },
}

impl GeneratorSpec {
    pub fn generate(&self) -> DirectedGraph {
        match *self {
            Self::ErdosRenyi { n, p, seed } => erdos_renyi(n, p, seed),
            Self::Tournament { n } => tournament(n),
            Self::LayeredDag { n, width, p, seed } => layered_dag(n, width, p, seed),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match *self {
            Self::ErdosRenyi { n, .. } | Self::Tournament { n } | Self::LayeredDag { n, .. } => n,
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::ErdosRenyi { n, p, seed } => write!(f, "er({n};{p};{seed})"),
            Self::Tournament { n } => write!(f, "tournament({n})"),
            Self::LayeredDag { n, width, p, seed } => {
                write!(f, "layered({n};{width};{p};{seed})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tournament_edge_count() {
        assert_eq!(tournament(5).edge_count(), 10);
        assert_eq!(tournament(1).edge_count(), 0);
    }

    #[test]
    fn er_extremes() {
        assert_eq!(erdos_renyi(100, 0.0, 1).edge_count(), 0);
        assert_eq!(erdos_renyi(10, 1.0, 1).edge_count(), 90);
    }

    #[test]
    fn er_is_reproducible() {
        let a = erdos_renyi(50, 0.2, 9);
        let b = erdos_renyi(50, 0.2, 9);
        assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
        let c = erdos_renyi(50, 0.2, 10);
        assert_ne!(a.edges().collect::<Vec<_>>(), c.edges().collect::<Vec<_>>());
    }

    #[test]
    fn er_thousand_matches_target_density() {
        for seed in 0..5 {
            let m = erdos_renyi(1000, 0.05, seed).edge_count() as f64;
            assert!((m - 49950.0).abs() / 49950.0 < 0.05, "seed {seed}: {m}");
        }
    }

    #[test]
    fn layered_edges_go_forward() {
        let g = layered_dag(20, 4, 0.7, 3);
        assert!(g.edge_count() > 0);
        for (u, v) in g.edges() {
            assert!(u / 4 < v / 4);
        }
        let full = layered_dag(6, 2, 1.0, 0);
        assert_eq!(full.edge_count(), 2 * 4 + 2 * 2);
    }

    #[test]
    fn generator_dispatch() {
        let g = GeneratorSpec::Tournament { n: 4 };
        assert_eq!(g.generate().edge_count(), 6);
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.to_string(), "tournament(4)");
    }
}
