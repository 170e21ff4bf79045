//! Randomized invariants over seeded random graphs.

use proptest::prelude::*;

use dirq_core::complex::build_flag_complex;
use dirq_core::engine::{run_engine, Algorithm};
use dirq_core::generate::{erdos_renyi, layered_dag};
use dirq_core::nearness::{novel_shared_face, Direction};
use dirq_core::parallel::{run_sharded, Strategy as Sharding, StrategyKind};
use dirq_core::qdigraph::Edge;
use dirq_core::simplex::FaceIndex::{At, Last};
use dirq_core::simplex::{coface_scan, face, hat_face, includes};

fn graph_params() -> impl Strategy<Value = (usize, f64, u64)> {
    (4usize..11, 0.15f64..0.55, any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cofaces_invert_faces((n, p, seed) in graph_params()) {
        let g = erdos_renyi(n, p, seed);
        let c = build_flag_complex(&g, None);
        for (_, sigma) in c.iter_from(0) {
            for i in 0..=sigma.len() {
                for co in coface_scan(sigma, i, &g).unwrap() {
                    let back = face(&co, i).unwrap();
                    prop_assert_eq!(back.vertices(), sigma);
                    prop_assert!(c.id_of(&co).is_some());
                }
            }
            if sigma.len() > 1 {
                for i in 0..sigma.len() {
                    let f = face(sigma, i).unwrap();
                    let back = coface_scan(&f, i, &g).unwrap();
                    prop_assert!(back.iter().any(|s| s.vertices() == sigma));
                }
            }
        }
    }

    #[test]
    fn every_face_is_a_simplex((n, p, seed) in graph_params()) {
        let c = build_flag_complex(&erdos_renyi(n, p, seed), None);
        for (_, sigma) in c.iter_from(1) {
            for i in 0..sigma.len() {
                prop_assert!(c.id_of(&face(sigma, i).unwrap()).is_some());
            }
            prop_assert_eq!(hat_face(sigma, At(sigma.len() + 3)).unwrap(), hat_face(sigma, Last).unwrap());
        }
    }

    #[test]
    fn clipping_truncates_levels((n, p, seed) in graph_params(), k in 0usize..5) {
        let g = erdos_renyi(n, p, seed);
        let full = build_flag_complex(&g, None);
        let clipped = build_flag_complex(&g, Some(k));
        let keep = full.levels().len().min(k + 1);
        prop_assert_eq!(clipped.levels(), &full.levels()[..keep]);
    }

    #[test]
    fn generators_are_deterministic(n in 1usize..40, p in 0.0f64..1.0, seed in any::<u64>()) {
        let a: Vec<_> = erdos_renyi(n, p, seed).edges().collect();
        let b: Vec<_> = erdos_renyi(n, p, seed).edges().collect();
        prop_assert_eq!(a, b);
        let a: Vec<_> = layered_dag(n, 3, p, seed).edges().collect();
        let b: Vec<_> = layered_dag(n, 3, p, seed).edges().collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn shared_face_is_mirror_symmetric((n, p, seed) in graph_params(), q in 0usize..3) {
        let c = build_flag_complex(&erdos_renyi(n, p, seed), None);
        let members: Vec<&[u32]> = c.iter_from(q + 1).map(|(_, s)| s).collect();
        for &s in &members {
            for &t in &members {
                for i in 0..=q + 1 {
                    for j in 0..=q + 1 {
                        prop_assert_eq!(novel_shared_face(s, t, q, i, j), novel_shared_face(t, s, q, j, i));
                    }
                }
            }
        }
    }

    #[test]
    fn shared_face_edges_close_upward((n, p, seed) in graph_params(), q in 1usize..3, i in 0usize..4, j in 0usize..4) {
        let (i, j) = (i.min(q + 1), j.min(q + 1));
        let g = erdos_renyi(n, p, seed);
        let c = build_flag_complex(&g, None);
        let (out, _) = run_engine(Algorithm::Hybrid, &g, &c, q, Direction::novel(At(i), At(j)), &Sharding::sequential(), false).unwrap();
        for (e, prov) in out.iter() {
            if !prov.has_shared_face() || e.src.dim as usize != q + 1 || e.dst.dim as usize != q + 1 {
                continue;
            }
            let (mu_s, mu_t) = (c.simplex(e.src), c.simplex(e.dst));
            for (sid, s) in c.iter_from(q + 1).filter(|(_, s)| includes(mu_s, s)) {
                for (tid, t) in c.iter_from(q + 1).filter(|(_, t)| includes(mu_t, t)) {
                    if s != t {
                        prop_assert!(out.contains(&Edge::new(sid, tid)));
                    }
                }
            }
        }
    }

    #[test]
    fn engines_and_strategies_agree((n, p, seed) in graph_params(), workers in 1usize..6, kind in 0usize..4) {
        let g = erdos_renyi(n, p, seed);
        let c = build_flag_complex(&g, None);
        let dir = Direction::novel(At(0), Last);
        let strategy = Sharding::new(StrategyKind::ALL[kind], workers);
        let (reference, _) = run_engine(Algorithm::TopDown, &g, &c, 1, dir, &Sharding::sequential(), false).unwrap();
        for algorithm in Algorithm::ALL {
            let (out, _) = run_engine(algorithm, &g, &c, 1, dir, &strategy, false).unwrap();
            prop_assert_eq!(out.to_tsv(), reference.to_tsv());
        }
    }

    #[test]
    fn sharding_is_invisible(items in proptest::collection::vec(0u32..500, 0..300), workers in 1usize..9, kind in 0usize..4, batch in 1usize..64) {
        let strategy = Sharding::new(StrategyKind::ALL[kind], workers).with_batch_size(batch);
        let shard = |x: &u32, out: &mut Vec<u32>| {
            out.push(x % 97);
            out.push(x / 7);
        };
        let (got, stats) = run_sharded(&items, shard, &strategy).unwrap();
        let (expected, _) = run_sharded(&items, shard, &Sharding::sequential()).unwrap();
        prop_assert_eq!(got, expected);
        prop_assert_eq!(stats.emitted, 2 * items.len() as u64);
    }
}
