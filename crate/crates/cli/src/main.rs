//! `dirq`: build directed flag complexes and their Q-digraphs from edge lists.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use dirq_core::bench::{run_benchmark, BenchCase, BenchOptions};
use dirq_core::generate::GeneratorSpec;
use dirq_core::io::{load, write_simplices, write_vertex_map, InputFormat, LoadedGraph};
use dirq_core::parallel::ParallelError;
use dirq_core::{
    build_flag_complex, run_engine, Algorithm, CriterionFilter, Definition, Direction, Error,
    FaceIndex, Provenance, Strategy, StrategyKind,
};

#[derive(Parser)]
#[command(name = "dirq", version, about = "Directed q-analysis of simple digraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the directed flag complex and print its level sizes.
    Complex(ComplexArgs),
    /// Compute a Q-digraph and write it to an output directory.
    Q(QArgs),
    /// Run a benchmark matrix over synthetic graphs.
    Bench(BenchArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Graph file.
    #[arg(long)]
    input: PathBuf,
    /// `edgelist` or `flag`.
    #[arg(long, default_value = "edgelist")]
    format: InputFormat,
    /// Largest simplex dimension to enumerate.
    #[arg(long = "d-max")]
    d_max: Option<usize>,
}

#[derive(Args)]
struct ComplexArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Also write simplices.tsv and vertex_map.tsv into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Dimension of the shared face.
    #[arg(long)]
    q: usize,
    /// Face index of the source simplex: an integer or `inf`.
    #[arg(long)]
    i: FaceIndex,
    /// Face index of the target simplex: an integer or `inf`.
    #[arg(long)]
    j: FaceIndex,
    /// `novel` or `hat`.
    #[arg(long, default_value = "novel")]
    definition: Definition,
    /// `topdown`, `hybrid` or `bottomup`.
    #[arg(long, default_value = "hybrid")]
    algorithm: Algorithm,
    /// `sequential`, `shared-accumulator`, `split-and-merge` or `sharded-bottom-up`.
    #[arg(long, default_value = "sequential")]
    strategy: StrategyKind,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Cross-check the result against the all-pairs engine.
    #[arg(long)]
    verify: bool,
    /// Keep only edges from `I` (inclusion), `II` (shared face) or `both`.
    #[arg(long, default_value = "both")]
    criterion: CriterionFilter,
}

#[derive(Args)]
struct BenchArgs {
    /// Generator: `er:N:P:SEED`, `tournament:N` or `layered:N:WIDTH:P:SEED`.
    /// Repeatable.
    #[arg(long = "generator", value_parser = parse_generator, required = true)]
    generators: Vec<GeneratorSpec>,
    /// Repeatable.
    #[arg(long = "q", default_values_t = [2])]
    qs: Vec<usize>,
    #[arg(long, default_value = "0")]
    i: FaceIndex,
    #[arg(long, default_value = "inf")]
    j: FaceIndex,
    #[arg(long, default_value = "novel")]
    definition: Definition,
    /// Repeatable; defaults to every engine that supports the definition.
    #[arg(long = "algorithm")]
    algorithms: Vec<Algorithm>,
    /// Repeatable.
    #[arg(long = "strategy", default_values_t = [StrategyKind::Sequential])]
    strategies: Vec<StrategyKind>,
    /// Repeatable.
    #[arg(long = "workers", default_values_t = [1])]
    workers: Vec<usize>,
    #[arg(long = "d-max")]
    d_max: Option<usize>,
    #[arg(long, default_value_t = 3)]
    repeats: usize,
    /// Count per-edge duplicate emissions in hybrid rows.
    #[arg(long)]
    instrument: bool,
    /// Directory for bench.csv and bench.md; the markdown table is also
    /// printed.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_generator(text: &str) -> Result<GeneratorSpec, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |k: usize| -> Result<usize, String> {
        parts.get(k).and_then(|s| s.parse().ok()).ok_or_else(|| format!("bad generator `{text}`"))
    };
    let prob = |k: usize| -> Result<f64, String> {
        parts
            .get(k)
            .and_then(|s| s.parse::<f64>().ok())
            .filter(|p| (0.0..=1.0).contains(p))
            .ok_or_else(|| format!("bad probability in `{text}`"))
    };
    match (parts[0], parts.len()) {
        ("er", 4) => Ok(GeneratorSpec::ErdosRenyi {
            n: num(1)?,
            p: prob(2)?,
            seed: num(3)? as u64,
        }),
        ("tournament", 2) => Ok(GeneratorSpec::Tournament { n: num(1)? }),
        ("layered", 5) => Ok(GeneratorSpec::LayeredDag {
            n: num(1)?,
            width: num(2)?,
            p: prob(3)?,
            seed: num(4)? as u64,
        }),
        _ => Err(format!(
            "unknown generator `{text}` (expected er:N:P:SEED, tournament:N or layered:N:WIDTH:P:SEED)"
        )),
    }
}

/// How a command failed, which decides the exit code.
enum Failure {
    /// Bad input file or configuration.
    Config(anyhow::Error),
    /// `--verify` found differing edges, or a benchmark row failed.
    Mismatch(String),
    Internal(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Mismatch(_) => 3,
            Failure::Internal(_) => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parallel(ParallelError::WorkerPanicked { .. }) | Error::Simplex(_) => {
                Failure::Internal(e.into())
            }
            _ => Failure::Config(e.into()),
        }
    }
}

fn internal<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Internal(e.into())
}

fn read_graph(args: &InputArgs) -> Result<LoadedGraph, Failure> {
    let file = File::open(&args.input)
        .with_context(|| format!("cannot open {}", args.input.display()))
        .map_err(Failure::Config)?;
    let loaded = load(BufReader::new(file), args.format)
        .with_context(|| format!("cannot parse {}", args.input.display()))
        .map_err(Failure::Config)?;
    if !loaded.duplicate_lines.is_empty() {
        eprintln!(
            "warning: {} duplicate edge(s) ignored (first on line {})",
            loaded.duplicate_lines.len(),
            loaded.duplicate_lines[0]
        );
    }
    Ok(loaded)
}

fn create_in(dir: &Path, name: &str) -> Result<BufWriter<File>, Failure> {
    let path = dir.join(name);
    File::create(&path)
        .map(BufWriter::new)
        .with_context(|| format!("cannot create {}", path.display()))
        .map_err(internal)
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create directory {}", dir.display()))
        .map_err(internal)
}

fn level_summary(sizes: &[usize]) -> String {
    sizes
        .iter()
        .enumerate()
        .map(|(d, n)| format!("dim {d}: {n}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn cmd_complex(args: ComplexArgs) -> Result<(), Failure> {
    let loaded = read_graph(&args.input)?;
    let complex = build_flag_complex(&loaded.graph, args.input.d_max);
    println!("{}", level_summary(&complex.level_sizes()));
    if let Some(out) = &args.out {
        ensure_dir(out)?;
        let mut w = create_in(out, "simplices.tsv")?;
        write_simplices(&complex, 0, &mut w).map_err(internal)?;
        w.flush().map_err(internal)?;
        let mut w = create_in(out, "vertex_map.tsv")?;
        write_vertex_map(&loaded.labels, &mut w).map_err(internal)?;
        w.flush().map_err(internal)?;
    }
    Ok(())
}

fn cmd_q(args: QArgs) -> Result<(), Failure> {
    let direction = Direction { i: args.i, j: args.j, definition: args.definition };
    direction.validate(args.q).map_err(|e| Failure::Config(e.into()))?;
    if !args.algorithm.supports(args.definition) {
        return Err(Failure::Config(anyhow::anyhow!(
            "the {} engine does not support the {} definition",
            args.algorithm,
            args.definition
        )));
    }
    let strategy = Strategy::new(args.strategy, args.workers);
    strategy.validate().map_err(|e| Failure::Config(e.into()))?;

    let loaded = read_graph(&args.input)?;
    let complex = build_flag_complex(&loaded.graph, args.input.d_max);
    let started = Instant::now();
    let (digraph, stats) = run_engine(
        args.algorithm,
        &loaded.graph,
        &complex,
        args.q,
        direction,
        &strategy,
        false,
    )?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;

    let mut verified = None;
    let mut mismatch = None;
    if args.verify {
        let (oracle, _) = run_engine(
            Algorithm::TopDown,
            &loaded.graph,
            &complex,
            args.q,
            direction,
            &Strategy::sequential(),
            false,
        )?;
        let diffs = digraph.differences(&oracle, 10);
        verified = Some(diffs.is_empty());
        if !diffs.is_empty() {
            let lines: Vec<String> = diffs.iter().map(ToString::to_string).collect();
            mismatch = Some(format!(
                "{} output differs from the all-pairs oracle (left: {}, right: oracle):\n{}",
                args.algorithm,
                args.algorithm,
                lines.join("\n")
            ));
        }
    }

    let written = digraph.filter(args.criterion);
    ensure_dir(&args.out)?;
    let mut w = create_in(&args.out, "simplices.tsv")?;
    write_simplices(&complex, args.q, &mut w).map_err(internal)?;
    w.flush().map_err(internal)?;
    let mut w = create_in(&args.out, "q_edges.tsv")?;
    written.write_tsv(&mut w).map_err(internal)?;
    w.flush().map_err(internal)?;
    let mut w = create_in(&args.out, "vertex_map.tsv")?;
    write_vertex_map(&loaded.labels, &mut w).map_err(internal)?;
    w.flush().map_err(internal)?;

    let count = |p: Provenance| written.iter().filter(|(_, x)| *x == p).count();
    let report = json!({
        "input": args.input.input.display().to_string(),
        "format": args.input.format.to_string(),
        "vertices": loaded.graph.vertex_count(),
        "edges": loaded.graph.edge_count(),
        "duplicate_edges_ignored": loaded.duplicate_lines.len(),
        "d_max": args.input.d_max,
        "level_sizes": complex.level_sizes(),
        "q": args.q,
        "i": args.i.to_string(),
        "j": args.j.to_string(),
        "definition": args.definition.to_string(),
        "algorithm": args.algorithm.to_string(),
        "strategy": args.strategy.to_string(),
        "workers": args.workers,
        "criterion": match args.criterion {
            CriterionFilter::Both => "both",
            CriterionFilter::Inclusion => "I",
            CriterionFilter::SharedFace => "II",
        },
        "sigma_ge_q": complex.count_from(args.q),
        "q_edges": written.edge_count(),
        "q_edges_by_provenance": {
            "I": count(Provenance::Inclusion),
            "II": count(Provenance::SharedFace),
            "both": count(Provenance::Both),
        },
        "wall_ms": wall_ms,
        "stats": serde_json::to_value(stats).map_err(internal)?,
        "verified": verified,
    });
    let mut w = create_in(&args.out, "report.json")?;
    serde_json::to_writer_pretty(&mut w, &report).map_err(internal)?;
    writeln!(w).map_err(internal)?;
    w.flush().map_err(internal)?;

    println!(
        "|Σ≥{}| = {}, {} edges written to {}",
        args.q,
        complex.count_from(args.q),
        written.edge_count(),
        args.out.join("q_edges.tsv").display()
    );
    match mismatch {
        Some(message) => Err(Failure::Mismatch(message)),
        None => Ok(()),
    }
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let algorithms = if args.algorithms.is_empty() {
        Algorithm::ALL.to_vec()
    } else {
        args.algorithms.clone()
    };
    let mut cases = Vec::new();
    for generator in &args.generators {
        for &q in &args.qs {
            let direction = Direction { i: args.i, j: args.j, definition: args.definition };
            direction.validate(q).map_err(|e| Failure::Config(e.into()))?;
            for &algorithm in &algorithms {
                if !algorithm.supports(args.definition) {
                    continue;
                }
                for &kind in &args.strategies {
                    for &workers in &args.workers {
                        let strategy = Strategy::new(kind, workers);
                        strategy.validate().map_err(|e| Failure::Config(e.into()))?;
                        cases.push(BenchCase {
                            generator: *generator,
                            q,
                            direction,
                            algorithm,
                            strategy,
                            d_max: args.d_max,
                        });
                    }
                }
            }
        }
    }
    let options = BenchOptions {
        repeats: args.repeats,
        instrument: args.instrument,
        ..BenchOptions::default()
    };
    let report = run_benchmark(&cases, &options)?;
    print!("{}", report.to_markdown());
    if let Some(out) = &args.out {
        ensure_dir(out)?;
        let mut w = create_in(out, "bench.csv")?;
        report.write_csv(&mut w).map_err(internal)?;
        w.flush().map_err(internal)?;
        fs::write(out.join("bench.md"), report.to_markdown()).map_err(internal)?;
    }
    if report.failed() {
        return Err(Failure::Mismatch(
            "at least one benchmark row disagrees with its reference engine".into(),
        ));
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Complex(args) => cmd_complex(args),
        Command::Q(args) => cmd_q(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Config(e) | Failure::Internal(e) => eprintln!("error: {e:#}"),
                Failure::Mismatch(message) => eprintln!("verification failed: {message}"),
            }
            ExitCode::from(failure.code())
        }
    }
}
