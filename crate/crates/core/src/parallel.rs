//! Execution strategies for the sharded outer loops of the engines.
//!
//! Every strategy computes the same deduplicated union of shard outputs. They
//! differ only in how worker results reach the final set:
//!
//! * `Sequential`: one thread, one set.
//! * `SharedAccumulator`: one mutex-guarded set; workers flush local buffers
//!   of `batch_size` items per lock acquisition.
//! * `SplitAndMerge`: private sets per worker, combined pairwise in a
//!   balanced reduction tree (smaller set merged into larger).
//! * `ShardedBottomUp`: workers share nothing and stream batches over a
//!   channel to a single sink.
//!
//! Work items are split into `workers` contiguous chunks of equal size.

use std::any::Any;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{mpsc, Mutex};
use std::thread;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_BATCH_SIZE: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParallelError {
    #[error("worker {worker} failed: {message}")]
    WorkerPanicked { worker: usize, message: String },
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Sequential,
    SharedAccumulator,
    SplitAndMerge,
    ShardedBottomUp,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 4] = [
        StrategyKind::Sequential,
        StrategyKind::SharedAccumulator,
        StrategyKind::SplitAndMerge,
        StrategyKind::ShardedBottomUp,
    ];
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyKind::Sequential => "sequential",
            StrategyKind::SharedAccumulator => "shared-accumulator",
            StrategyKind::SplitAndMerge => "split-and-merge",
            StrategyKind::ShardedBottomUp => "sharded-bottom-up",
        })
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sequential" => Ok(StrategyKind::Sequential),
            "shared-accumulator" | "mutex" => Ok(StrategyKind::SharedAccumulator),
            "split-and-merge" => Ok(StrategyKind::SplitAndMerge),
            "sharded-bottom-up" | "sharded" => Ok(StrategyKind::ShardedBottomUp),
            _ => Err(format!(
                "unknown strategy `{s}` (expected sequential, shared-accumulator, split-and-merge or sharded-bottom-up)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub workers: usize,
    pub batch_size: usize,
}

impl Default for Strategy {
    fn default() -> Self {
        Self::sequential()
    }
}

impl Strategy {
    pub fn sequential() -> Self {
        Self {
            kind: StrategyKind::Sequential,
            workers: 1,
            batch_size: DEFAULT_BATCH_SIZE,
        }
    }

    pub fn new(kind: StrategyKind, workers: usize) -> Self {
        Self {
            kind,
            workers,
            batch_size: DEFAULT_BATCH_SIZE,
        }
    }

    pub fn with_batch_size(self, batch_size: usize) -> Self {
        Self { batch_size, ..self }
    }

    /// The kind that actually runs: a single worker is always sequential.
    pub fn effective_kind(&self) -> StrategyKind {
        if self.workers <= 1 {
            StrategyKind::Sequential
        } else {
            self.kind
        }
    }

    pub fn validate(&self) -> Result<(), ParallelError> {
        if self.workers == 0 {
            return Err(ParallelError::InvalidStrategy(
                "worker count must be positive".into(),
            ));
        }
        if self.batch_size == 0 {
            return Err(ParallelError::InvalidStrategy(
                "batch size must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Counters collected while running a sharded loop.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    /// Items emitted by shards before deduplication.
    pub emitted: u64,
    /// Lock acquisitions on the shared accumulator.
    pub lock_acquisitions: u64,
    /// Pairwise merges performed by split-and-merge.
    pub merges: u64,
    /// Largest number of merges any single element went through.
    pub max_merge_depth: u32,
    /// Batches delivered to the streaming sink.
    pub sink_batches: u64,
}

impl RunStats {
    pub fn absorb(&mut self, other: &RunStats) {
        self.emitted += other.emitted;
        self.lock_acquisitions += other.lock_acquisitions;
        self.merges += other.merges;
        self.max_merge_depth = self.max_merge_depth.max(other.max_merge_depth);
        self.sink_batches += other.sink_batches;
    }
}

/// Runs `shard_fn` over every item and returns the deduplicated union of
/// everything the shards pushed.
///
/// `shard_fn` receives a local buffer; it must only append to it and must
/// not depend on mutable shared state.
pub fn run_sharded<T, E, F>(
    items: &[T],
    shard_fn: F,
    strategy: &Strategy,
) -> Result<(FxHashSet<E>, RunStats), ParallelError>
where
    T: Sync,
    E: Eq + Hash + Send,
    F: Fn(&T, &mut Vec<E>) + Sync,
{
    strategy.validate()?;
    match strategy.effective_kind() {
        StrategyKind::Sequential => Ok(sequential(items, &shard_fn)),
        StrategyKind::SharedAccumulator => {
            shared_accumulator(items, &shard_fn, strategy.workers, strategy.batch_size)
        }
        StrategyKind::SplitAndMerge => split_and_merge(items, &shard_fn, strategy.workers),
        StrategyKind::ShardedBottomUp => {
            sharded_stream(items, &shard_fn, strategy.workers, strategy.batch_size)
        }
    }
}

fn chunk_len(len: usize, workers: usize) -> usize {
    len.div_ceil(workers).max(1)
}

fn panic_message(payload: Box<dyn Any + Send>) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "worker panicked".to_string()
    }
}

fn sequential<T, E, F>(items: &[T], shard_fn: &F) -> (FxHashSet<E>, RunStats)
where
    E: Eq + Hash,
    F: Fn(&T, &mut Vec<E>),
{
    let mut set = FxHashSet::default();
    let mut buf = Vec::new();
    let mut stats = RunStats::default();
    for item in items {
        shard_fn(item, &mut buf);
        stats.emitted += buf.len() as u64;
        set.extend(buf.drain(..));
    }
    (set, stats)
}

fn shared_accumulator<T, E, F>(
    items: &[T],
    shard_fn: &F,
    workers: usize,
    batch_size: usize,
) -> Result<(FxHashSet<E>, RunStats), ParallelError>
where
    T: Sync,
    E: Eq + Hash + Send,
    F: Fn(&T, &mut Vec<E>) + Sync,
{
    let shared = Mutex::new(FxHashSet::default());
    let emitted = AtomicU64::new(0);
    let locks = AtomicU64::new(0);
    let flush = |buf: &mut Vec<E>| {
        let mut set = shared.lock().unwrap_or_else(|e| e.into_inner());
        locks.fetch_add(1, Ordering::Relaxed);
        set.extend(buf.drain(..));
    };
    let results: Vec<_> = thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk_len(items.len(), workers))
            .map(|chunk| {
                let (flush, emitted) = (&flush, &emitted);
                scope.spawn(move || {
                    let mut buf = Vec::with_capacity(batch_size);
                    for item in chunk {
                        let before = buf.len();
                        shard_fn(item, &mut buf);
                        emitted.fetch_add((buf.len() - before) as u64, Ordering::Relaxed);
                        if buf.len() >= batch_size {
                            flush(&mut buf);
                        }
                    }
                    if !buf.is_empty() {
                        flush(&mut buf);
                    }
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join()).collect()
    });
    for (worker, r) in results.into_iter().enumerate() {
        r.map_err(|p| ParallelError::WorkerPanicked {
            worker,
            message: panic_message(p),
        })?;
    }
    let stats = RunStats {
        emitted: emitted.into_inner(),
        lock_acquisitions: locks.into_inner(),
        ..RunStats::default()
    };
    Ok((
        shared.into_inner().unwrap_or_else(|e| e.into_inner()),
        stats,
    ))
}

/// A partial result in the reduction tree, with the largest number of
/// merges any of its elements has been through.
struct Partial<E> {
    set: FxHashSet<E>,
    depth: u32,
}

/// Merges the smaller set into the larger.
pub fn merge_sets<E: Eq + Hash>(a: FxHashSet<E>, b: FxHashSet<E>) -> FxHashSet<E> {
    let (mut big, small) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    big.extend(small);
    big
}

fn split_and_merge<T, E, F>(
    items: &[T],
    shard_fn: &F,
    workers: usize,
) -> Result<(FxHashSet<E>, RunStats), ParallelError>
where
    T: Sync,
    E: Eq + Hash + Send,
    F: Fn(&T, &mut Vec<E>) + Sync,
{
    let mut stats = RunStats::default();
    let results: Vec<_> = thread::scope(|scope| {
        let handles: Vec<_> = items
            .chunks(chunk_len(items.len(), workers))
            .map(|chunk| scope.spawn(move || sequential(chunk, shard_fn)))
            .collect();
        handles.into_iter().map(|h| h.join()).collect()
    });
    let mut partials = Vec::with_capacity(results.len());
    for (worker, r) in results.into_iter().enumerate() {
        let (set, s) = r.map_err(|p| ParallelError::WorkerPanicked {
            worker,
            message: panic_message(p),
        })?;
        stats.absorb(&s);
        partials.push(Partial { set, depth: 0 });
    }

    while partials.len() > 1 {
        let mut next = Vec::with_capacity(partials.len().div_ceil(2));
        let mut pairs = Vec::new();
        let mut iter = partials.into_iter();
        while let Some(a) = iter.next() {
            match iter.next() {
                Some(b) => pairs.push((a, b)),
                None => next.push(a),
            }
        }
        stats.merges += pairs.len() as u64;
        let merged: Vec<_> = thread::scope(|scope| {
            let handles: Vec<_> = pairs
                .into_iter()
                .map(|(a, b)| {
                    scope.spawn(move || Partial {
                        depth: a.depth.max(b.depth) + 1,
                        set: merge_sets(a.set, b.set),
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join()).collect()
        });
        for (worker, r) in merged.into_iter().enumerate() {
            next.push(r.map_err(|p| ParallelError::WorkerPanicked {
                worker,
                message: panic_message(p),
            })?);
        }
        partials = next;
    }
    let final_part = partials.pop().unwrap_or(Partial {
        set: FxHashSet::default(),
        depth: 0,
    });
    stats.max_merge_depth = final_part.depth;
    Ok((final_part.set, stats))
}

fn sharded_stream<T, E, F>(
    items: &[T],
    shard_fn: &F,
    workers: usize,
    batch_size: usize,
) -> Result<(FxHashSet<E>, RunStats), ParallelError>
where
    T: Sync,
    E: Eq + Hash + Send,
    F: Fn(&T, &mut Vec<E>) + Sync,
{
    let mut set = FxHashSet::default();
    let mut stats = RunStats::default();
    let results: Vec<_> = thread::scope(|scope| {
        let (tx, rx) = mpsc::sync_channel::<Vec<E>>(workers * 2);
        let handles: Vec<_> = items
            .chunks(chunk_len(items.len(), workers))
            .map(|chunk| {
                let tx = tx.clone();
                scope.spawn(move || {
                    let mut buf = Vec::with_capacity(batch_size);
                    for item in chunk {
                        shard_fn(item, &mut buf);
                        if buf.len() >= batch_size {
                            // The receiver outlives every worker.
                            let _ = tx.send(std::mem::replace(
                                &mut buf,
                                Vec::with_capacity(batch_size),
                            ));
                        }
                    }
                    if !buf.is_empty() {
                        let _ = tx.send(buf);
                    }
                })
            })
            .collect();
        drop(tx);
        for batch in rx {
            stats.sink_batches += 1;
            stats.emitted += batch.len() as u64;
            set.extend(batch);
        }
        handles.into_iter().map(|h| h.join()).collect::<Vec<_>>()
    });
    for (worker, r) in results.into_iter().enumerate() {
        r.map_err(|p| ParallelError::WorkerPanicked {
            worker,
            message: panic_message(p),
        })?;
    }
    Ok((set, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn workload(item: &u32, out: &mut Vec<u32>) {
        // overlapping outputs force deduplication
        for k in 0..(*item % 7) {
            out.push((item * 3 + k) % 50);
        }
    }

    #[test]
    fn all_strategies_agree() {
        let items: Vec<u32> = (0..500).collect();
        let (reference, _) = run_sharded(&items, workload, &Strategy::sequential()).unwrap();
        for kind in StrategyKind::ALL {
            for workers in [1, 2, 3, 4, 8] {
                let strategy = Strategy::new(kind, workers).with_batch_size(16);
                let (set, stats) = run_sharded(&items, workload, &strategy).unwrap();
                assert_eq!(set, reference, "{kind} x {workers}");
                if kind == StrategyKind::SplitAndMerge && workers > 1 {
                    let bound = (workers as f64).log2().ceil() as u32;
                    assert!(stats.max_merge_depth <= bound);
                    assert!(stats.max_merge_depth >= 1);
                }
                if kind == StrategyKind::SharedAccumulator && workers > 1 {
                    assert!(stats.lock_acquisitions > 0);
                }
            }
        }
    }

    #[test]
    fn empty_input() {
        let items: Vec<u32> = Vec::new();
        for kind in StrategyKind::ALL {
            let (set, _) = run_sharded(&items, workload, &Strategy::new(kind, 4)).unwrap();
            assert!(set.is_empty());
        }
    }

    #[test]
    fn single_worker_is_sequential() {
        let s = Strategy::new(StrategyKind::SplitAndMerge, 1);
        assert_eq!(s.effective_kind(), StrategyKind::Sequential);
    }

    #[test]
    fn worker_panic_aborts_run() {
        let items: Vec<u32> = (0..64).collect();
        let boom = |item: &u32, out: &mut Vec<u32>| {
            if *item == 40 {
                panic!("bad item {item}");
            }
            out.push(*item);
        };
        for kind in [
            StrategyKind::SharedAccumulator,
            StrategyKind::SplitAndMerge,
            StrategyKind::ShardedBottomUp,
        ] {
            let err = run_sharded(&items, boom, &Strategy::new(kind, 4)).unwrap_err();
            assert!(matches!(err, ParallelError::WorkerPanicked { worker: 2, .. }), "{err}");
        }
    }

    #[test]
    fn rejects_zero_workers() {
        let items = [1u32];
        let s = Strategy {
            kind: StrategyKind::SplitAndMerge,
            workers: 0,
            batch_size: 4,
        };
        assert!(run_sharded(&items, workload, &s).is_err());
    }
}
