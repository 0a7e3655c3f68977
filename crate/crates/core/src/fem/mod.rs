//! Finite element assembly for the benchmark problems: 1D and 2D Poisson
//! with linear / bilinear elements, and the 1D wave equation advanced with
//! the Newmark average-acceleration scheme.

mod boundary;
mod io;
mod mesh;
mod poisson;
mod system;
mod wave;

pub use boundary::{BoundarySpec, NeumannSegment};
pub use io::{read_matrix_market, write_matrix_market, SystemFile};
pub use mesh::{Mesh1D, Mesh2D};
pub use poisson::{
    assemble_poisson_1d, assemble_poisson_2d, ramp_forcing, ramp_solution, Poisson2dCase,
};
pub use system::{residual_norm, LinearSystem};
pub use wave::{newmark_step, NewmarkError, NewmarkState, WaveCase, WaveProblem};

use crate::linalg::LinalgError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FemError {
    #[error("mesh needs at least 2 nodes per direction, got {0}")]
    TooFewNodes(usize),
    #[error("mesh length must be positive and finite")]
    InvalidLength,
    #[error("forcing has {found} samples, mesh has {expected} nodes")]
    ForcingLength { expected: usize, found: usize },
    #[error("forcing sample at node {0} is not finite")]
    NonFiniteForcing(usize),
    #[error("boundary node {node} out of range for {nodes} nodes")]
    BoundaryIndex { node: usize, nodes: usize },
    #[error("node {0} listed as Dirichlet more than once")]
    DuplicateDirichlet(usize),
    #[error("Neumann segment {0} lies entirely on the Dirichlet boundary")]
    NeumannOnDirichlet(usize),
    #[error("Neumann segment {index} has {found} nodes, expected {expected}")]
    NeumannShape {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("Dirichlet value at node {0} is not finite")]
    NonFiniteDirichlet(usize),
    #[error("vector has length {found}, system has {expected} unknowns")]
    Dimension { expected: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("matrix market: {0}")]
    MatrixMarket(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
