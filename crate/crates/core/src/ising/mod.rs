//! Mapping of quadratic functionals around an iterate to Ising Hamiltonians.
//!
//! A candidate update is `u + delta + alpha q` with `q` in `{-1, +1}^n` over the
//! non-Dirichlet dofs. Substituting it into `F(u) = 1/2 u^T A u - u^T b` or
//! `G(u) = ||A u - b||^2` gives `E(q) = q^T J q + q^T h + sum(S) + c` exactly.

mod frame;
mod hamiltonian;
mod mapping;

pub use frame::{build_frame, decode, NestedFrame, NestedGrid, SearchFrame};
pub use hamiltonian::{energy, spin_vector, to_standard, ModifiedIsing, Spin, StandardIsing};
pub use mapping::{functional_value, map_lsq, map_spd, nested_compose, Functional};

use crate::fem::FemError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IsingError {
    #[error("expected length {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("neighborhood scale must be positive and finite")]
    NonPositiveScale,
    #[error("node {node} must equal its Dirichlet value {expected}, found {found}")]
    DirichletViolation {
        node: usize,
        expected: f64,
        found: f64,
    },
    #[error("system is not flagged SPD; use the least-squares mapping")]
    NotSpd,
    #[error("level scales {first} and {second} do not form a {grid:?} grid")]
    ScaleRelation {
        first: f64,
        second: f64,
        grid: NestedGrid,
    },
    #[error("nested composition requires a zero translation")]
    NonzeroTranslation,
    #[error("spin {index} is not +1 or -1")]
    InvalidSpin { index: usize },
    #[error("coupling J[{row}][{col}] must be zero")]
    NotUpperTriangular { row: usize, col: usize },
    #[error("Ising JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Fem(#[from] FemError),
}
