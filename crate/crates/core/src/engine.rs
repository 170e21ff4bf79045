//! Uniform entry point over the three engines.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bottomup::get_q_bottomup_named;
use crate::complex::FlagComplex;
use crate::error::Error;
use crate::graph::DirectedGraph;
use crate::hybrid::{self, HybridOptions};
use crate::nearness::{Definition, Direction};
use crate::parallel::Strategy;
use crate::qdigraph::QDigraph;
use crate::topdown::get_q_topdown;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    TopDown,
    Hybrid,
    BottomUp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::TopDown, Algorithm::Hybrid, Algorithm::BottomUp];

    pub fn supports(self, definition: Definition) -> bool {
        !(self == Algorithm::BottomUp && definition == Definition::Hat)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::TopDown => "topdown",
            Algorithm::Hybrid => "hybrid",
            Algorithm::BottomUp => "bottomup",
        })
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "topdown" | "top-down" => Ok(Algorithm::TopDown),
            "hybrid" => Ok(Algorithm::Hybrid),
            "bottomup" | "bottom-up" => Ok(Algorithm::BottomUp),
            _ => Err(format!(
                "unknown algorithm `{s}` (expected topdown, hybrid or bottomup)"
            )),
        }
    }
}

/// Counters reported by whichever engine ran; fields an engine does not
/// produce stay `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineStats {
    pub pair_checks: Option<u64>,
    pub emissions: Option<u64>,
    pub max_duplicates: Option<u32>,
    pub peak_shard_state: Option<u64>,
    pub max_merge_depth: u32,
}

/// Runs `algorithm` on a complex built from `graph`. Bottom-up reads the
/// graph directly and only uses `complex` to name simplices.
pub fn run_engine(
    algorithm: Algorithm,
    graph: &DirectedGraph,
    complex: &FlagComplex,
    q: usize,
    direction: Direction,
    strategy: &Strategy,
    instrument: bool,
) -> Result<(QDigraph, EngineStats), Error> {
    match algorithm {
        Algorithm::TopDown => {
            let (g, s) = get_q_topdown(complex, q, direction, strategy)?;
            Ok((
                g,
                EngineStats {
                    pair_checks: Some(s.pair_checks),
                    max_merge_depth: s.run.max_merge_depth,
                    ..EngineStats::default()
                },
            ))
        }
        Algorithm::Hybrid => {
            let options = HybridOptions {
                strategy: *strategy,
                instrument,
            };
            let (g, s) = hybrid::compute(complex, q, direction, &options)?;
            Ok((
                g,
                EngineStats {
                    emissions: Some(s.propagation.emissions),
                    max_duplicates: s.propagation.max_duplicates,
                    max_merge_depth: s.propagation.run.max_merge_depth,
                    ..EngineStats::default()
                },
            ))
        }
        Algorithm::BottomUp => {
            let (g, s) = get_q_bottomup_named(graph, complex, q, direction, strategy)?;
            Ok((
                g,
                EngineStats {
                    peak_shard_state: Some(s.peak_shard_state),
                    emissions: Some(s.shared_face.emitted),
                    max_merge_depth: s
                        .shared_face
                        .max_merge_depth
                        .max(s.inclusion.max_merge_depth),
                    ..EngineStats::default()
                },
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_flag_complex;
    use crate::generate::erdos_renyi;
    use crate::simplex::FaceIndex::{At, Last};

    #[test]
    fn engines_agree_through_dispatch() {
        let g = erdos_renyi(9, 0.5, 21);
        let c = build_flag_complex(&g, None);
        let dir = Direction::novel(At(0), Last);
        let results: Vec<_> = Algorithm::ALL
            .iter()
            .map(|&a| run_engine(a, &g, &c, 1, dir, &Strategy::sequential(), true).unwrap())
            .collect();
        assert_eq!(results[0].0, results[1].0);
        assert_eq!(results[0].0, results[2].0);
        assert!(results[0].1.pair_checks.is_some());
        assert!(results[1].1.max_duplicates.is_some());
        assert!(results[2].1.peak_shard_state.is_some());
    }

    #[test]
    fn algorithm_names() {
        for a in Algorithm::ALL {
            assert_eq!(a.to_string().parse::<Algorithm>().unwrap(), a);
        }
        assert!(!Algorithm::BottomUp.supports(Definition::Hat));
        assert!(Algorithm::Hybrid.supports(Definition::Hat));
    }
}
