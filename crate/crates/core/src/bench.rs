//! Benchmark harness: runs a matrix of engine configurations, cross-checks
//! their edge sets and reports CSV and markdown tables.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::time::{Duration, Instant};

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::complex::{build_flag_complex, FlagComplex};
use crate::engine::{run_engine, Algorithm, EngineStats};
use crate::error::Error;
use crate::generate::GeneratorSpec;
use crate::graph::DirectedGraph;
use crate::nearness::Direction;
use crate::parallel::Strategy;
use crate::qdigraph::{EdgeSet, QDigraph};

/// Largest `|Σ_{≥q}|` the quadratic engine is run on by default.
pub const TOPDOWN_CAP: usize = 50_000;

pub const CSV_HEADER: &str = "generator,n,edges,q,i,j,definition,algorithm,strategy,workers,sigma_ge_q,q_edges,wall_ms,pair_checks,emissions,max_dup,verified";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchCase {
    pub generator: GeneratorSpec,
    pub q: usize,
    pub direction: Direction,
    pub algorithm: Algorithm,
    pub strategy: Strategy,
    pub d_max: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchOptions {
    /// Timed runs per row; the reported time is their median.
    pub repeats: usize,
    /// Untimed runs before timing starts.
    pub warmups: usize,
    pub topdown_cap: usize,
    /// Count per-edge emissions in hybrid rows.
    pub instrument: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            repeats: 3,
            warmups: 1,
            topdown_cap: TOPDOWN_CAP,
            instrument: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Edge set equals the reference engine's.
    Verified,
    /// Edge set differs from the reference engine's.
    Failed,
    /// No second engine was available to compare against.
    Unchecked,
    /// The configuration was not run (topdown above the size cap).
    Skipped,
}

impl Verdict {
    fn as_str(self) -> &'static str {
        match self {
            Verdict::Verified => "yes",
            Verdict::Failed => "FAILED",
            Verdict::Unchecked => "unchecked",
            Verdict::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub case: BenchCase,
    pub n: usize,
    pub edges: usize,
    pub sigma_ge_q: usize,
    pub q_edges: usize,
    pub wall_ms: f64,
    pub stats: EngineStats,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn failed(&self) -> bool {
        self.rows.iter().any(|r| r.verdict == Verdict::Failed)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(out, "{}", csv_line(r))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ASCII output")
    }

    pub fn to_markdown(&self) -> String {
        let columns: Vec<&str> = CSV_HEADER.split(',').collect();
        let mut s = String::new();
        let _ = writeln!(s, "| {} |", columns.join(" | "));
        let _ = writeln!(s, "|{}", "---|".repeat(columns.len()));
        for r in &self.rows {
            let line = csv_line(r);
            let cells: Vec<&str> = line.split(',').collect();
            let _ = writeln!(s, "| {} |", cells.join(" | "));
        }
        s
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn csv_line(r: &BenchRow) -> String {
    let c = &r.case;
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{:.3},{},{},{},{}",
        c.generator,
        r.n,
        r.edges,
        c.q,
        c.direction.i,
        c.direction.j,
        c.direction.definition,
        c.algorithm,
        c.strategy.kind,
        c.strategy.workers,
        r.sigma_ge_q,
        r.q_edges,
        r.wall_ms,
        opt(r.stats.pair_checks),
        opt(r.stats.emissions),
        opt(r.stats.max_duplicates),
        r.verdict.as_str(),
    )
}

/// Median wall time of `repeats` calls of `f` after `warmups` untimed calls,
/// plus the result of the last call.
pub fn time_median<T, F>(warmups: usize, repeats: usize, mut f: F) -> Result<(Duration, T), Error>
where
    F: FnMut() -> Result<T, Error>,
{
    for _ in 0..warmups {
        f()?;
    }
    let mut times = Vec::with_capacity(repeats.max(1));
    let mut last = None;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let out = f()?;
        times.push(start.elapsed());
        last = Some(out);
    }
    times.sort_unstable();
    Ok((times[times.len() / 2], last.expect("at least one timed run")))
}

type InstanceKey = (String, Option<usize>);
type ReferenceKey = (String, Option<usize>, usize, Direction);

/// Runs every case in order. Each row's edge set is compared with a
/// reference computed by a different engine: topdown where it fits under
/// the cap, hybrid otherwise.
pub fn run_benchmark(cases: &[BenchCase], options: &BenchOptions) -> Result<BenchReport, Error> {
    let mut instances: FxHashMap<InstanceKey, (DirectedGraph, FlagComplex)> = FxHashMap::default();
    let mut references: FxHashMap<ReferenceKey, (Algorithm, EdgeSet)> = FxHashMap::default();
    let mut rows = Vec::with_capacity(cases.len());
    for case in cases {
        let ikey = (case.generator.to_string(), case.d_max);
        let (graph, complex) = instances.entry(ikey.clone()).or_insert_with(|| {
            let g = case.generator.generate();
            let c = build_flag_complex(&g, case.d_max);
            (g, c)
        });
        let sigma = complex.count_from(case.q);
        let mut row = BenchRow {
            case: *case,
            n: graph.vertex_count(),
            edges: graph.edge_count(),
            sigma_ge_q: sigma,
            q_edges: 0,
            wall_ms: 0.0,
            stats: EngineStats::default(),
            verdict: Verdict::Skipped,
        };
        if case.algorithm == Algorithm::TopDown && sigma > options.topdown_cap {
            rows.push(row);
            continue;
        }
        let instrument = options.instrument && case.algorithm == Algorithm::Hybrid;
        let (elapsed, (result, stats)) = time_median(options.warmups, options.repeats, || {
            run_engine(case.algorithm, graph, complex, case.q, case.direction, &case.strategy, instrument)
        })?;
        row.q_edges = result.edge_count();
        row.wall_ms = elapsed.as_secs_f64() * 1e3;
        row.stats = stats;

        let rkey = (ikey.0.clone(), ikey.1, case.q, case.direction);
        let reference_algorithm = if sigma <= options.topdown_cap {
            Algorithm::TopDown
        } else {
            Algorithm::Hybrid
        };
        if reference_algorithm == case.algorithm {
            references
                .entry(rkey)
                .or_insert_with(|| (case.algorithm, result.edge_set()));
            row.verdict = Verdict::Unchecked;
        } else {
            if !references.contains_key(&rkey) {
                let (r, _) = run_engine(
                    reference_algorithm,
                    graph,
                    complex,
                    case.q,
                    case.direction,
                    &Strategy::sequential(),
                    false,
                )?;
                references.insert(rkey.clone(), (reference_algorithm, r.edge_set()));
            }
            let (_, reference) = &references[&rkey];
            row.verdict = if equal_sets(&result, reference) {
                Verdict::Verified
            } else {
                Verdict::Failed
            };
        }
        rows.push(row);
    }
    Ok(BenchReport { rows })
}

fn equal_sets(graph: &QDigraph, reference: &EdgeSet) -> bool {
    graph.edge_count() == reference.len() && graph.iter().all(|(e, _)| reference.contains(&e))
}
