//! Sources of low-energy spin states for a [`StandardIsing`].

mod annealing;
mod exhaustive;
mod remote;

pub use annealing::{auto_temperatures, simulated_anneal, SaConfig, SimulatedAnnealer};
pub use exhaustive::{exhaustive, exhaustive_lowest, ExhaustiveSampler, MAX_EXHAUSTIVE_SPINS};
pub use remote::{
    HttpTransport, RemoteBatch, RemoteConfig, RemoteSampler, Transport, TransportError,
    ENDPOINT_ENV, TOKEN_ENV,
};

use serde::{Deserialize, Serialize};

use crate::ising::{Spin, StandardIsing};
use crate::scalar::Real;

/// One readout: spins in `{-1, +1}` and the energy including the offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Sample<T> {
    pub spins: Vec<Spin>,
    pub energy: T,
}

impl<T: Real> Sample<T> {
    /// Sample with its energy evaluated on `h`.
    pub fn evaluate(h: &StandardIsing<T>, spins: Vec<Spin>) -> Self {
        let energy = h.energy(&spins);
        Self { spins, energy }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SamplerError {
    #[error("at least one read is required")]
    NoReads,
    #[error("{n} spins exceed the exhaustive limit of {max}")]
    TooManySpins { n: usize, max: usize },
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),
    #[error("Hamiltonian outside the hardware range (max |h| = {max_bias}, max |J| = {max_coupling})")]
    RangeViolation { max_bias: f64, max_coupling: f64 },
    #[error("remote sampler failed after {retries} retries: {message}")]
    Remote { message: String, retries: usize },
    #[error("malformed sampler response: {0}")]
    MalformedResponse(String),
    #[error("sampler returned {found} samples, expected {expected}")]
    WrongCount { expected: usize, found: usize },
}

/// Interchangeable sample source. Implementations return exactly `reads`
/// samples and are deterministic for a fixed `seed` (a remote backend may
/// ignore the seed).
pub trait Sampler<T: Real>: Send + Sync {
    fn sample(&self, h: &StandardIsing<T>, reads: usize, seed: u64) -> Result<Vec<Sample<T>>, SamplerError>;

    fn name(&self) -> &str;

    /// Annealing time charged per sample in microseconds, when the backend knows it.
    fn time_per_sample_us(&self) -> Option<f64> {
        None
    }
}

/// `j_max` samples from `sampler`, checking the count contract.
pub fn sample_batch<T: Real, S: Sampler<T> + ?Sized>(
    sampler: &S,
    h: &StandardIsing<T>,
    j_max: usize,
    seed: u64,
) -> Result<Vec<Sample<T>>, SamplerError> {
    if j_max == 0 {
        return Err(SamplerError::NoReads);
    }
    let out = sampler.sample(h, j_max, seed)?;
    if out.len() != j_max {
        return Err(SamplerError::WrongCount {
            expected: j_max,
            found: out.len(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    struct Short;

    impl Sampler<f64> for Short {
        fn sample(&self, _: &StandardIsing<f64>, _: usize, _: u64) -> Result<Vec<Sample<f64>>, SamplerError> {
            Ok(Vec::new())
        }

        fn name(&self) -> &str {
            "short"
        }
    }

    #[test]
    fn batch_contract_is_enforced() {
        let h = StandardIsing::new(DenseMatrix::zeros(1, 1), vec![1.0], 0.0).unwrap();
        assert_eq!(sample_batch(&Short, &h, 0, 1), Err(SamplerError::NoReads));
        assert_eq!(
            sample_batch(&Short, &h, 3, 1),
            Err(SamplerError::WrongCount { expected: 3, found: 0 })
        );
        let best = sample_batch(&ExhaustiveSampler, &h, 1, 0).unwrap();
        assert_eq!(best[0].spins, vec![-1]);
    }
}
