//! Q-digraphs of directed flag complexes.
//!
//! A directed graph induces a flag complex whose simplices are its totally
//! ordered cliques. Two simplices are q-near when one includes the other or
//! when they share a q-face in a prescribed pair of face directions. This
//! crate enumerates the complex and computes the digraph of q-near pairs with
//! three interchangeable engines:
//!
//! * [`topdown`] checks every ordered pair and serves as the reference;
//! * [`hybrid`] caches inclusions and cofaces and propagates near pairs
//!   upward, running in time proportional to the output;
//! * [`bottomup`] recomputes cofaces from adjacency lists and needs no
//!   global cache.

pub mod bench;
pub mod bottomup;
pub mod complex;
pub mod engine;
pub mod error;
pub mod generate;
pub mod graph;
pub mod hybrid;
pub mod io;
pub mod nearness;
pub mod parallel;
pub mod qdigraph;
pub mod simplex;
pub mod topdown;

pub use complex::{build_flag_complex, FlagComplex, SimplexId};
pub use engine::{run_engine, Algorithm, EngineStats};
pub use error::Error;
pub use graph::{DirectedGraph, VertexId};
pub use nearness::{Definition, Direction};
pub use parallel::{Strategy, StrategyKind};
pub use qdigraph::{CriterionFilter, Edge, Provenance, QDigraph};
pub use simplex::{FaceIndex, Simplex};
