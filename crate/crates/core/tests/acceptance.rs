//! Acceptance suite. Every criterion runs at its stated tolerance and prints
//! one PASS/FAIL line; the process exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use dirq_core::bench::time_median;
use dirq_core::bottomup::get_q_bottomup_named;
use dirq_core::complex::{build_flag_complex, FlagComplex, SimplexId};
use dirq_core::engine::{run_engine, Algorithm};
use dirq_core::generate::{erdos_renyi, tournament};
use dirq_core::graph::DirectedGraph;
use dirq_core::hybrid::{self, duplicate_bound, HybridOptions, HybridStats};
use dirq_core::nearness::{
    is_q_near_decomposition, is_q_near_hat, is_q_near_novel, novel_direction_mask, Definition,
    Direction,
};
use dirq_core::parallel::{Strategy, StrategyKind};
use dirq_core::qdigraph::{Edge, QDigraph};
use dirq_core::simplex::includes;
use dirq_core::simplex::FaceIndex::{self, At, Last};
use dirq_core::topdown::{all_directions, get_q_topdown, get_q_topdown_sweep};

/// Vertex counts and edge probabilities of the random-graph matrix.
const MATRIX_N: [usize; 3] = [8, 10, 12];
const MATRIX_P: [f64; 3] = [0.3, 0.5, 0.7];
const SEEDS_PER_CELL: u64 = 23;
/// Instances whose `Σ_{≥q}` exceeds this size are clipped at the largest
/// dimension that keeps them below it (never below `q + 1`).
const SIGMA_CAP: usize = 400;

#[derive(Default)]
struct Tally {
    checks: u64,
    failures: u64,
    first: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, context: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(context());
            }
        }
    }

    fn summary(&self, unit: &str) -> (bool, String) {
        let mut text = format!("{} {unit}, {} failures", self.checks, self.failures);
        if let Some(first) = &self.first {
            text.push_str(&format!("; first: {first}"));
        }
        (self.failures == 0 && self.checks > 0, text)
    }
}

struct Outcome {
    id: u32,
    title: &'static str,
    pass: bool,
    detail: String,
    seconds: f64,
}

struct Instance {
    label: String,
    graph: DirectedGraph,
    q: usize,
    complex: FlagComplex,
}

fn matrix_graphs() -> Vec<(String, DirectedGraph)> {
    let mut out = Vec::new();
    for (a, &n) in MATRIX_N.iter().enumerate() {
        for (b, &p) in MATRIX_P.iter().enumerate() {
            for k in 0..SEEDS_PER_CELL {
                let seed = ((a * 3 + b) as u64) * 1000 + k;
                out.push((format!("er({n},{p},{seed})"), erdos_renyi(n, p, seed)));
            }
        }
    }
    out
}

/// The complex used for `(graph, q)`: unclipped when small enough,
/// otherwise clipped by [`SIGMA_CAP`].
fn sized_complex(graph: &DirectedGraph, q: usize) -> FlagComplex {
    let full = build_flag_complex(graph, None);
    if full.count_from(q) <= SIGMA_CAP {
        return full;
    }
    let sizes = full.level_sizes();
    let mut d = q + 1;
    while d + 1 < sizes.len() && sizes[q..=d + 1].iter().sum::<usize>() <= SIGMA_CAP {
        d += 1;
    }
    build_flag_complex(graph, Some(d))
}

fn novel_indices(q: usize) -> Vec<FaceIndex> {
    (0..=q + 1).map(At).collect()
}

fn hat_directions() -> Vec<Direction> {
    let idx = [At(0), At(1), At(2), At(3), Last];
    let mut out = Vec::new();
    for &i in &idx {
        for &j in &idx {
            out.push(Direction::hat(i, j));
        }
    }
    out
}

fn same_edges(a: &QDigraph, b: &QDigraph) -> bool {
    a.edge_set() == b.edge_set()
}

#[derive(Default)]
struct MatrixTallies {
    c1: Tally,
    c2: Tally,
    c3: Tally,
    c4: Tally,
    c5: Tally,
    c6: Tally,
    c7: Tally,
    c9: Tally,
    seconds: [f64; 10],
}

fn run_matrix() -> (MatrixTallies, usize, usize) {
    let seq = Strategy::sequential();
    let graphs = matrix_graphs();
    let mut t = MatrixTallies::default();
    let mut instances = 0;
    let mut clipped = 0;
    for (label, graph) in &graphs {
        for q in 1..=2 {
            let complex = sized_complex(graph, q);
            instances += 1;
            if complex.clipped_at().is_some() {
                clipped += 1;
            }
            let inst = Instance {
                label: label.clone(),
                graph: graph.clone(),
                q,
                complex,
            };
            check_instance(&inst, &seq, &mut t);
        }
    }
    (t, graphs.len(), instances - clipped)
}

fn check_instance(inst: &Instance, seq: &Strategy, t: &mut MatrixTallies) {
    let (c, q, g) = (&inst.complex, inst.q, &inst.graph);
    let top = c.max_dim().unwrap_or(0);
    let ctx = |what: &str| format!("{} q={q} {what}", inst.label);

    // 1 and 9: novel engines agree, duplicates stay under the bound
    let clock = Instant::now();
    let novel_dirs = all_directions(q, Definition::Novel);
    let (novel_td, _) = get_q_topdown_sweep(c, q, &novel_dirs, seq).unwrap();
    let instrumented = HybridOptions {
        strategy: *seq,
        instrument: true,
    };
    let mut hybrid_stats: Vec<HybridStats> = Vec::new();
    for (dir, reference) in novel_dirs.iter().zip(&novel_td) {
        let (h, hs) = hybrid::get_q_hybrid(c, q, *dir, &instrumented).unwrap();
        let (b, _) = get_q_bottomup_named(g, c, q, *dir, seq).unwrap();
        t.c1.check(same_edges(&h, reference) && same_edges(&b, reference), || ctx(&dir.to_string()));
        let max_dup = hs.propagation.max_duplicates.unwrap_or(0) as u64;
        let bound = duplicate_bound(top, q);
        t.c9.check(max_dup <= bound, || format!("{} {dir}: {max_dup} > {bound}", ctx("")));
        hybrid_stats.push(hs);
    }
    t.seconds[1] += clock.elapsed().as_secs_f64();

    // 9, clipped part: the bound for D = 2q holds and caps total emissions
    let clock = Instant::now();
    let two_q = 2 * q;
    let bound = duplicate_bound(two_q, q);
    let reuse = top <= two_q;
    let clipped;
    let c2 = if reuse {
        c
    } else {
        clipped = build_flag_complex(g, Some(two_q));
        &clipped
    };
    for (k, dir) in novel_dirs.iter().enumerate() {
        let (edges, stats) = if reuse {
            (novel_td[k].edge_count() as u64, hybrid_stats[k])
        } else {
            let (h, hs) = hybrid::get_q_hybrid(c2, q, *dir, &instrumented).unwrap();
            (h.edge_count() as u64, hs)
        };
        let max_dup = stats.propagation.max_duplicates.unwrap_or(0) as u64;
        let emissions = stats.propagation.emissions;
        t.c9.check(max_dup <= bound && emissions <= bound * edges, || {
            format!("{} {dir} clipped: max_dup {max_dup}, emissions {emissions}, |Q| {edges}", ctx(""))
        });
    }
    t.seconds[9] += clock.elapsed().as_secs_f64();

    // 2: hat engines agree
    let clock = Instant::now();
    let hat_dirs = hat_directions();
    let (hat_td, _) = get_q_topdown_sweep(c, q, &hat_dirs, seq).unwrap();
    let plain = HybridOptions {
        strategy: *seq,
        instrument: false,
    };
    for (dir, reference) in hat_dirs.iter().zip(&hat_td) {
        let (h, _) = hybrid::get_qhat_hybrid(c, q, *dir, &plain).unwrap();
        t.c2.check(same_edges(&h, reference), || ctx(&dir.to_string()));
    }
    t.seconds[2] += clock.elapsed().as_secs_f64();

    // 4: corner directions give identical digraphs under both definitions
    let clock = Instant::now();
    for (ni, nj, hi, hj) in [(0, q + 1, At(0), Last), (0, 0, At(0), At(0)), (q + 1, 0, Last, At(0)), (q + 1, q + 1, Last, Last)] {
        let n = novel_dirs.iter().position(|d| d.i == At(ni) && d.j == At(nj)).unwrap();
        let h = hat_dirs.iter().position(|d| d.i == hi && d.j == hj).unwrap();
        t.c4.check(novel_td[n].to_tsv() == hat_td[h].to_tsv(), || ctx(&hat_dirs[h].to_string()));
    }
    t.seconds[4] += clock.elapsed().as_secs_f64();

    // 6: criterion-II edges between (q+1)-simplices propagate to all
    // supersimplex pairs
    let clock = Instant::now();
    let base: Vec<(SimplexId, &[u32])> = c.iter_from(q + 1).filter(|(id, _)| id.dim as usize == q + 1).collect();
    let above: Vec<(SimplexId, &[u32])> = c.iter_from(q + 1).collect();
    let ups: Vec<Vec<SimplexId>> = base
        .iter()
        .map(|(_, mu)| above.iter().filter(|(_, s)| includes(mu, s)).map(|(id, _)| *id).collect())
        .collect();
    for (dir, out) in novel_dirs.iter().zip(&novel_td) {
        for (e, p) in out.iter() {
            if !p.has_shared_face() || e.src.dim as usize != q + 1 || e.dst.dim as usize != q + 1 {
                continue;
            }
            for &s in &ups[e.src.index as usize] {
                for &u in &ups[e.dst.index as usize] {
                    if s != u {
                        t.c6.check(out.contains(&Edge::new(s, u)), || format!("{} {dir}: {s} -> {u} from {} -> {}", ctx(""), e.src, e.dst));
                    }
                }
            }
        }
    }
    t.seconds[6] += clock.elapsed().as_secs_f64();

    // 3: on (q+1)-simplices the definitions coincide direction by direction
    let clock = Instant::now();
    let idx = novel_indices(q);
    let members: Vec<&[u32]> = c.iter_from(q).map(|(_, s)| s).collect();
    let level: Vec<&[u32]> = members.iter().copied().filter(|s| s.len() == q + 2).collect();
    for &sigma in &level {
        for &tau in &level {
            for &i in idx.iter().chain([&Last]) {
                for &j in idx.iter().chain([&Last]) {
                    let novel = is_q_near_novel(sigma, tau, q, i, j).unwrap();
                    let hat = is_q_near_hat(sigma, tau, q, i, j);
                    t.c3.check(novel == hat, || format!("{} {sigma:?} {tau:?} ({i},{j})", ctx("")));
                }
            }
        }
    }
    t.seconds[3] += clock.elapsed().as_secs_f64();

    // 5: some novel direction iff some hat direction up to the top dimension
    let clock = Instant::now();
    for &sigma in &members {
        for &tau in &members {
            let novel_any = idx.iter().any(|&i| idx.iter().any(|&j| is_q_near_novel(sigma, tau, q, i, j).unwrap()));
            let hat_any = (0..=top).any(|k| (0..=top).any(|l| is_q_near_hat(sigma, tau, q, At(k), At(l))));
            t.c5.check(novel_any == hat_any, || format!("{} {sigma:?} {tau:?}", ctx("")));
        }
    }
    t.seconds[5] += clock.elapsed().as_secs_f64();

    // 7: the decomposition checker matches the shared-face criterion
    let clock = Instant::now();
    let slots = q + 2;
    for &sigma in &members {
        for &tau in &members {
            let mask = novel_direction_mask(sigma, tau, q);
            for i in 0..slots {
                for j in 0..slots {
                    let direct = mask >> (i * slots + j) & 1 == 1;
                    let split = is_q_near_decomposition(sigma, tau, q, i, j);
                    t.c7.check(direct == split, || format!("{} {sigma:?} {tau:?} ({i},{j})", ctx("")));
                }
            }
        }
    }
    t.seconds[7] += clock.elapsed().as_secs_f64();
}

fn criterion_8() -> (bool, String) {
    let sigma = [0, 1, 2, 3, 4];
    let tau = [0, 1, 3, 4, 5];
    let novel = is_q_near_novel(&sigma, &tau, 2, At(1), At(3)).unwrap();
    let hat = is_q_near_hat(&sigma, &tau, 2, At(1), At(3));
    (novel && !hat, format!("novel-near = {novel}, hat-near = {hat}"))
}

fn criterion_10() -> (bool, String) {
    let mut tally = Tally::default();
    let cases = [(10, 0.4), (12, 0.5), (14, 0.3), (15, 0.45), (16, 0.35), (18, 0.3), (20, 0.25), (20, 0.3), (24, 0.2), (25, 0.25)];
    for (k, &(n, p)) in cases.iter().enumerate() {
        let g = erdos_renyi(n, p, 100 + k as u64);
        let c = build_flag_complex(&g, None);
        let q = k % 3;
        let (_, stats) = get_q_topdown(&c, q, Direction::novel(At(0), Last), &Strategy::sequential()).unwrap();
        let s = c.count_from(q) as u64;
        tally.check(stats.pair_checks == s * s - s, || format!("er({n},{p}) q={q}: {} vs {}", stats.pair_checks, s * s - s));
    }
    tally.summary("instances")
}

fn criterion_11() -> (bool, String) {
    let g = erdos_renyi(300, 0.08, 11);
    let c = build_flag_complex(&g, None);
    let q = 2;
    let dir = Direction::novel(At(0), Last);
    let seq = Strategy::sequential();
    let (td_time, td) = time_median(1, 3, || Ok(get_q_topdown(&c, q, dir, &seq)?.0)).unwrap();
    let (hy_time, hy) = time_median(1, 3, || {
        let options = HybridOptions { strategy: seq, instrument: false };
        Ok(hybrid::get_q_hybrid(&c, q, dir, &options)?.0)
    })
    .unwrap();
    let agree = td == hy;
    let ratio = td_time.as_secs_f64() / hy_time.as_secs_f64().max(1e-9);
    (
        agree && hy_time < td_time,
        format!(
            "|Σ≥q| = {}, |Q| = {}, topdown {:.1} ms, hybrid {:.1} ms, speedup {ratio:.1}x, outputs equal: {agree}",
            c.count_from(q),
            hy.edge_count(),
            td_time.as_secs_f64() * 1e3,
            hy_time.as_secs_f64() * 1e3,
        ),
    )
}

fn criterion_12() -> (bool, String) {
    let g = erdos_renyi(32, 0.3, 12);
    let c = build_flag_complex(&g, None);
    let q = 1;
    let dir = Direction::novel(At(1), Last);
    let mut tally = Tally::default();
    let mut reference: Option<String> = None;
    for algorithm in Algorithm::ALL {
        for kind in StrategyKind::ALL {
            for workers in [1, 2, 4, 8] {
                let strategy = Strategy::new(kind, workers);
                let (out, stats) = run_engine(algorithm, &g, &c, q, dir, &strategy, false).unwrap();
                let tsv = out.to_tsv();
                let reference = reference.get_or_insert_with(|| tsv.clone());
                let what = || format!("{algorithm} {kind} x{workers}");
                tally.check(*reference == tsv, || format!("{} output differs", what()));
                if kind == StrategyKind::SplitAndMerge {
                    let limit = (workers as f64).log2().ceil() as u32;
                    tally.check(stats.max_merge_depth <= limit, || {
                        format!("{} merged an element {} times (limit {limit})", what(), stats.max_merge_depth)
                    });
                }
            }
        }
    }
    let (pass, detail) = tally.summary("checks");
    (pass, format!("{detail}; |Q| = {}", reference.map_or(0, |r| r.lines().count())))
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, r| acc * (n - r) / (r + 1))
}

fn criterion_13() -> (bool, String) {
    let mut tally = Tally::default();
    for n in 1..=8 {
        let sizes = build_flag_complex(&tournament(n), None).level_sizes();
        let expected: Vec<usize> = (0..n).map(|d| binomial(n, d + 1)).collect();
        tally.check(sizes == expected, || format!("tournament({n}): {sizes:?}"));
    }
    let cycle = DirectedGraph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
    let c = build_flag_complex(&cycle, None);
    tally.check(c.len_of(2) == 0, || format!("3-cycle levels {:?}", c.level_sizes()));
    tally.summary("checks")
}

fn timed(id: u32, title: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let clock = Instant::now();
    let (pass, detail) = f();
    Outcome {
        id,
        title,
        pass,
        detail,
        seconds: clock.elapsed().as_secs_f64(),
    }
}

fn main() -> ExitCode {
    let mut outcomes = Vec::new();

    let (m, graphs, unclipped) = run_matrix();
    let scope = format!("{graphs} graphs, {} of {} instances unclipped", unclipped, graphs * 2);
    let matrix = [
        (1, "novel engines agree (topdown, hybrid, bottomup)", &m.c1, "direction runs", m.seconds[1]),
        (2, "hat engines agree (topdown, hybrid)", &m.c2, "direction runs", m.seconds[2]),
        (3, "novel and hat coincide on (q+1)-simplices", &m.c3, "pair-direction checks", m.seconds[3]),
        (4, "corner directions give identical digraphs", &m.c4, "digraph comparisons", m.seconds[4]),
        (5, "some novel direction iff some hat direction", &m.c5, "pairs", m.seconds[5]),
        (6, "upward closure of shared-face edges", &m.c6, "supersimplex pairs", m.seconds[6]),
        (7, "decomposition checker matches shared-face test", &m.c7, "pair-direction checks", m.seconds[7]),
        (9, "hybrid duplicate bound", &m.c9, "bound checks", m.seconds[1] + m.seconds[9]),
    ];
    for (id, title, tally, unit, seconds) in matrix {
        let (pass, detail) = tally.summary(unit);
        outcomes.push(Outcome {
            id,
            title,
            pass,
            detail: format!("{detail} [{scope}]"),
            seconds,
        });
    }
    outcomes.push(timed(8, "overlap counterexample separates the definitions", criterion_8));
    outcomes.push(timed(10, "topdown pair-check count", criterion_10));
    outcomes.push(timed(11, "hybrid faster than topdown on er(300,0.08)", criterion_11));
    outcomes.push(timed(12, "strategy invariance", criterion_12));
    outcomes.push(timed(13, "combinatorial sanity", criterion_13));
    outcomes.sort_by_key(|o| o.id);

    println!();
    let mut failed = 0;
    for o in &outcomes {
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        failed += usize::from(!o.pass);
        println!("criterion {:>2} [{verdict}] {}: {} ({:.1}s)", o.id, o.title, o.detail, o.seconds);
    }
    println!("\n{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
