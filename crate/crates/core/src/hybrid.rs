//! Output-sensitive engine.
//!
//! One top-down pass over `Σ_{>q}` enumerates every inclusion edge by
//! removing vertices, and records each simplex's strict supersimplices
//! (up-sets) for the dimensions that will need them. Coface lists are then
//! filled by applying the face maps once per simplex. Shared-face edges are
//! produced by starting from each q-simplex `α` and expanding its cofaces
//! through the up-sets.
//!
//! Propagation is sharded over `Σ_q`. The inclusion pass and the caches are
//! built on one thread.

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::complex::{FlagComplex, SimplexId};
use crate::error::Error;
use crate::nearness::{resolve_novel, Definition, Direction};
use crate::parallel::{run_sharded, RunStats, Strategy};
use crate::qdigraph::{Edge, EdgeSet, QDigraph};
use crate::simplex::{for_each_face_of_dim, remove_at, FaceIndex};

/// Lists of simplices keyed by simplex, stored densely per dimension.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimplexMultimap {
    levels: Vec<Vec<Vec<SimplexId>>>,
}

impl SimplexMultimap {
    fn with_dims(complex: &FlagComplex, dims: impl IntoIterator<Item = usize>) -> Self {
        let mut levels = Vec::new();
        for d in dims {
            if levels.len() <= d {
                levels.resize_with(d + 1, Vec::new);
            }
            levels[d] = vec![Vec::new(); complex.len_of(d)];
        }
        Self { levels }
    }

    fn holds_dim(&self, dim: usize) -> bool {
        self.levels.get(dim).is_some_and(|l| !l.is_empty())
    }

    fn push(&mut self, key: SimplexId, value: SimplexId) {
        self.levels[key.dim as usize][key.index as usize].push(value);
    }

    pub fn get(&self, key: SimplexId) -> &[SimplexId] {
        self.levels
            .get(key.dim as usize)
            .and_then(|l| l.get(key.index as usize))
            .map_or(&[], Vec::as_slice)
    }

    /// Number of stored values.
    pub fn total(&self) -> usize {
        self.levels.iter().flatten().map(Vec::len).sum()
    }
}

/// Criterion-[I] edges `(face, τ)` with `dim face ≥ q`, strict inclusion
/// only. Produced without duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InclusionEdges {
    pub edges: Vec<Edge>,
}

/// Strict supersimplices of selected simplices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UpSetCache {
    map: SimplexMultimap,
}

impl UpSetCache {
    pub fn get(&self, id: SimplexId) -> &[SimplexId] {
        self.map.get(id)
    }

    /// `{μ} ∪ upset(μ)`
    pub fn closure(&self, id: SimplexId) -> impl Iterator<Item = SimplexId> + '_ {
        std::iter::once(id).chain(self.get(id).iter().copied())
    }

    pub fn total(&self) -> usize {
        self.map.total()
    }
}

/// Single pass over `Σ_{>q}`: for each `τ` and each `d` in `q..dim τ`, every
/// d-face of `τ` becomes an inclusion edge into `τ`, and `τ` is added to the
/// up-set of faces whose dimension is in `cache_dims`.
pub fn compute_inclusions(
    complex: &FlagComplex,
    q: usize,
    cache_dims: &[usize],
) -> (InclusionEdges, UpSetCache) {
    let mut upsets = SimplexMultimap::with_dims(complex, cache_dims.iter().copied());
    let mut edges = Vec::new();
    let Some(top) = complex.max_dim() else {
        return (InclusionEdges::default(), UpSetCache { map: upsets });
    };
    for p in q + 1..=top {
        let level = &complex.levels()[p];
        for (k, tau) in level.iter().enumerate() {
            let tau_id = SimplexId::new(p, k);
            for d in q..p {
                let face_level = &complex.levels()[d];
                let cache = upsets.holds_dim(d);
                for_each_face_of_dim(tau, d, |face| {
                    let index = face_level
                        .position(face)
                        .expect("faces of a flag-complex simplex are in the complex");
                    let face_id = SimplexId::new(d, index);
                    edges.push(Edge::new(face_id, tau_id));
                    if cache {
                        upsets.push(face_id, tau_id);
                    }
                });
            }
        }
    }
    (InclusionEdges { edges }, UpSetCache { map: upsets })
}

/// Coface lists for the two face maps of a direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CofaceCache {
    definition: Definition,
    by_i: SimplexMultimap,
    /// `None` when both indices select the same face map.
    by_j: Option<SimplexMultimap>,
}

impl CofaceCache {
    pub fn definition(&self) -> Definition {
        self.definition
    }

    pub fn cofaces_i(&self, key: SimplexId) -> &[SimplexId] {
        self.by_i.get(key)
    }

    pub fn cofaces_j(&self, key: SimplexId) -> &[SimplexId] {
        self.by_j.as_ref().unwrap_or(&self.by_i).get(key)
    }

    /// Registrations per index (the same simplex counted once per map).
    pub fn registrations(&self) -> (usize, usize) {
        let i = self.by_i.total();
        (i, self.by_j.as_ref().map_or(i, SimplexMultimap::total))
    }
}

/// Registers cofaces under their face.
///
/// Novel: every `σ ∈ Σ_{q+1}` under `d_i(σ)` and `d_j(σ)` (keys in `Σ_q`).
/// Hat: every `σ ∈ Σ_{>q}` under `d̂_i(σ)` and `d̂_j(σ)`, clamped per
/// simplex, so keys range over `Σ_{≥q}`.
pub fn build_coface_cache(
    complex: &FlagComplex,
    q: usize,
    direction: Direction,
) -> Result<CofaceCache, Error> {
    direction.validate(q)?;
    let top = complex.max_dim().unwrap_or(0);
    let dims: Vec<usize> = match direction.definition {
        Definition::Novel => (q + 1..=top.min(q + 1)).collect(),
        Definition::Hat => (q + 1..=top).collect(),
    };
    let key_dims = dims.iter().map(|d| d - 1);
    let same = match direction.definition {
        Definition::Novel => resolve_novel(direction.i, q)? == resolve_novel(direction.j, q)?,
        Definition::Hat => direction.i == direction.j,
    };
    let mut by_i = SimplexMultimap::with_dims(complex, key_dims.clone());
    let mut by_j = (!same).then(|| SimplexMultimap::with_dims(complex, key_dims));

    let position = |index: FaceIndex, dim: usize| -> usize {
        match direction.definition {
            Definition::Novel => resolve_novel(index, q).expect("validated above"),
            Definition::Hat => index.clamp_to(dim),
        }
    };
    for &p in &dims {
        let (pi, pj) = (position(direction.i, p), position(direction.j, p));
        let face_level = &complex.levels()[p - 1];
        for (k, sigma) in complex.levels()[p].iter().enumerate() {
            let id = SimplexId::new(p, k);
            let key = |pos: usize| {
                let face = remove_at(sigma, pos);
                SimplexId::new(p - 1, face_level.position(&face).expect("face in complex"))
            };
            by_i.push(key(pi), id);
            if let Some(by_j) = by_j.as_mut() {
                by_j.push(key(pj), id);
            }
        }
    }
    Ok(CofaceCache {
        definition: direction.definition,
        by_i,
        by_j,
    })
}

/// Shared-face edges among `Σ_{q+1}`: `⋃_α coF_i(α) × coF_j(α)` without
/// self-loops.
pub fn compute_bottom_edges(complex: &FlagComplex, q: usize, cache: &CofaceCache) -> EdgeSet {
    let mut out = EdgeSet::default();
    for k in 0..complex.len_of(q) {
        let alpha = SimplexId::new(q, k);
        for &s in cache.cofaces_i(alpha) {
            for &t in cache.cofaces_j(alpha) {
                if s != t {
                    out.insert(Edge::new(s, t));
                }
            }
        }
    }
    out
}

/// Edges emitted by one q-simplex `α` under the novel definition:
/// `δ*(μσ) × δ*(μτ)` for `μσ ∈ coF_i(α)`, `μτ ∈ coF_j(α)`.
fn emit_novel(alpha: SimplexId, cache: &CofaceCache, upsets: &UpSetCache, out: &mut Vec<Edge>) {
    for &mu_s in cache.cofaces_i(alpha) {
        for &mu_t in cache.cofaces_j(alpha) {
            for s in upsets.closure(mu_s) {
                for t in upsets.closure(mu_t) {
                    if s != t {
                        out.push(Edge::new(s, t));
                    }
                }
            }
        }
    }
}

/// Edges emitted by one q-simplex `α` under the hat definition:
/// `coF̂_i(μσ) × coF̂_j(μτ)` for `μσ, μτ ∈ δ*(α)`.
fn emit_hat(alpha: SimplexId, cache: &CofaceCache, upsets: &UpSetCache, out: &mut Vec<Edge>) {
    let closure: Vec<SimplexId> = upsets.closure(alpha).collect();
    for &mu_s in &closure {
        let left = cache.cofaces_i(mu_s);
        if left.is_empty() {
            continue;
        }
        for &mu_t in &closure {
            for &s in left {
                for &t in cache.cofaces_j(mu_t) {
                    if s != t {
                        out.push(Edge::new(s, t));
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropagationStats {
    /// Edge emissions before deduplication.
    pub emissions: u64,
    /// Largest number of times one edge was emitted; only with
    /// instrumentation.
    pub max_duplicates: Option<u32>,
    pub run: RunStats,
}

fn propagate(
    complex: &FlagComplex,
    q: usize,
    instrument: bool,
    strategy: &Strategy,
    emit: impl Fn(SimplexId, &mut Vec<Edge>) + Sync,
) -> Result<(EdgeSet, PropagationStats), Error> {
    let alphas: Vec<SimplexId> = (0..complex.len_of(q)).map(|k| SimplexId::new(q, k)).collect();
    if instrument {
        let mut counts: FxHashMap<Edge, u32> = FxHashMap::default();
        let mut buf = Vec::new();
        let mut emissions = 0u64;
        for &alpha in &alphas {
            emit(alpha, &mut buf);
            emissions += buf.len() as u64;
            for e in buf.drain(..) {
                *counts.entry(e).or_insert(0) += 1;
            }
        }
        let max = counts.values().copied().max().unwrap_or(0);
        let stats = PropagationStats {
            emissions,
            max_duplicates: Some(max),
            run: RunStats {
                emitted: emissions,
                ..RunStats::default()
            },
        };
        return Ok((counts.into_keys().collect(), stats));
    }
    let (set, run) = run_sharded(&alphas, |a, out| emit(*a, out), strategy)?;
    let stats = PropagationStats {
        emissions: run.emitted,
        max_duplicates: None,
        run,
    };
    Ok((set, stats))
}

/// All novel shared-face edges via upward closure of the bottom-level
/// products.
pub fn propagate_up(
    complex: &FlagComplex,
    q: usize,
    cache: &CofaceCache,
    upsets: &UpSetCache,
    instrument: bool,
    strategy: &Strategy,
) -> Result<(EdgeSet, PropagationStats), Error> {
    propagate(complex, q, instrument, strategy, |a, out| {
        emit_novel(a, cache, upsets, out)
    })
}

/// All hat shared-face edges: inclusions of `α` first, then cofaces.
pub fn propagate_hat(
    complex: &FlagComplex,
    q: usize,
    cache: &CofaceCache,
    upsets: &UpSetCache,
    instrument: bool,
    strategy: &Strategy,
) -> Result<(EdgeSet, PropagationStats), Error> {
    propagate(complex, q, instrument, strategy, |a, out| {
        emit_hat(a, cache, upsets, out)
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridOptions {
    pub strategy: Strategy,
    /// Count per-edge emissions (sequential, slower).
    pub instrument: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HybridStats {
    pub inclusion_edges: u64,
    pub upset_entries: u64,
    pub coface_registrations: u64,
    pub propagation: PropagationStats,
}

/// The novel (q,i,j)-digraph.
pub fn get_q_hybrid(
    complex: &FlagComplex,
    q: usize,
    direction: Direction,
    options: &HybridOptions,
) -> Result<(QDigraph, HybridStats), Error> {
    if direction.definition != Definition::Novel {
        return Err(Error::Unsupported(
            "get_q_hybrid computes the novel definition; use get_qhat_hybrid".into(),
        ));
    }
    run(complex, q, direction, options, q + 1)
}

/// The hat (q,i,j)-digraph.
pub fn get_qhat_hybrid(
    complex: &FlagComplex,
    q: usize,
    direction: Direction,
    options: &HybridOptions,
) -> Result<(QDigraph, HybridStats), Error> {
    if direction.definition != Definition::Hat {
        return Err(Error::Unsupported(
            "get_qhat_hybrid computes the hat definition; use get_q_hybrid".into(),
        ));
    }
    run(complex, q, direction, options, q)
}

/// Dispatches on the direction's definition.
pub fn compute(
    complex: &FlagComplex,
    q: usize,
    direction: Direction,
    options: &HybridOptions,
) -> Result<(QDigraph, HybridStats), Error> {
    match direction.definition {
        Definition::Novel => get_q_hybrid(complex, q, direction, options),
        Definition::Hat => get_qhat_hybrid(complex, q, direction, options),
    }
}

fn run(
    complex: &FlagComplex,
    q: usize,
    direction: Direction,
    options: &HybridOptions,
    upset_dim: usize,
) -> Result<(QDigraph, HybridStats), Error> {
    direction.validate(q)?;
    options.strategy.validate()?;
    let (inclusions, upsets) = compute_inclusions(complex, q, &[upset_dim]);
    let cache = build_coface_cache(complex, q, direction)?;
    let (shared, propagation) = match direction.definition {
        Definition::Novel => {
            propagate_up(complex, q, &cache, &upsets, options.instrument, &options.strategy)?
        }
        Definition::Hat => {
            propagate_hat(complex, q, &cache, &upsets, options.instrument, &options.strategy)?
        }
    };
    let (ri, rj) = cache.registrations();
    let stats = HybridStats {
        inclusion_edges: inclusions.edges.len() as u64,
        upset_entries: upsets.total() as u64,
        coface_registrations: (ri + rj) as u64,
        propagation,
    };
    let graph = QDigraph::from_parts(complex, q, direction, inclusions.edges, shared);
    Ok((graph, stats))
}

/// Upper bound on how often one edge can be emitted by [`propagate_up`]:
/// `C(D+1, q+1) · (D-q)²`.
pub fn duplicate_bound(max_dim: usize, q: usize) -> u64 {
    if max_dim < q {
        return 0;
    }
    binomial(max_dim as u64 + 1, q as u64 + 1) * ((max_dim - q) as u64).pow(2)
}

pub(crate) fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, r| acc * (n - r) / (r + 1))
}
