use thiserror::Error;

use crate::graph::GraphError;
use crate::io::ParseError;
use crate::nearness::NearnessError;
use crate::parallel::ParallelError;
use crate::simplex::SimplexError;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Nearness(#[from] NearnessError),
    #[error(transparent)]
    Simplex(#[from] SimplexError),
    #[error(transparent)]
    Parallel(#[from] ParallelError),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}
