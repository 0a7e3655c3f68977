//! Finite element linear systems solved by direct search whose polls are
//! Ising ground-state problems.
//!
//! Every numeric type is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix the common choices.

pub mod fem;
pub mod ising;
pub mod linalg;
pub mod sampler;
pub mod scalar;
pub mod search;
pub mod spanning;
pub mod ttt;

pub use scalar::Real;

pub type LinearSystem64 = fem::LinearSystem<f64>;
pub type LinearSystem32 = fem::LinearSystem<f32>;
pub type Mesh1D64 = fem::Mesh1D<f64>;
pub type Mesh2D64 = fem::Mesh2D<f64>;
pub type BoundarySpec64 = fem::BoundarySpec<f64>;
pub type WaveProblem64 = fem::WaveProblem<f64>;
pub type NewmarkState64 = fem::NewmarkState<f64>;
pub type CsrMatrix64 = linalg::CsrMatrix<f64>;
pub type DenseMatrix64 = linalg::DenseMatrix<f64>;
pub type ModifiedIsing64 = ising::ModifiedIsing<f64>;
pub type StandardIsing64 = ising::StandardIsing<f64>;
pub type StandardIsing32 = ising::StandardIsing<f32>;
pub type SearchFrame64 = ising::SearchFrame<f64>;
pub type Sample64 = sampler::Sample<f64>;
pub type SearchTrace64 = search::SearchTrace<f64>;
pub type SearchTrace32 = search::SearchTrace<f32>;
