//! Direct search driven by Ising samples: `2^N`, nested `3^N`/`4^N` polling
//! and two-step hyperoctant polling, with an expansion phase before the
//! usual contraction.

mod poll;
mod run;
mod trace;

pub(crate) use poll::mix;
pub use poll::{hyperoctant_step, poll_hamiltonians, poll_step, Candidate, PollOutcome};
pub use run::{default_alpha0, run};
pub use trace::{Phase, PollSnapshot, SearchTrace, Termination, TraceRecord, TRACE_CSV_HEADER};

use serde::{Deserialize, Serialize};

use crate::fem::{FemError, LinearSystem};
use crate::ising::{functional_value, Functional, IsingError};
use crate::sampler::SamplerError;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Qubit grid `u + alpha D2`.
    Poll2,
    /// Nested qubits giving `u + alpha D3`.
    Poll3,
    /// Nested qubits giving `u + alpha {-1.5, -0.5, 0.5, 1.5}^N`.
    Poll4,
    /// `D2` poll for `u_a`, then a half-scale `D2` poll centred between `u` and `u_a`.
    Hyperoctant,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "poll2" => Ok(Self::Poll2),
            "poll3" => Ok(Self::Poll3),
            "poll4" => Ok(Self::Poll4),
            "hyperoctant" => Ok(Self::Hyperoctant),
            other => Err(format!("unknown search method {other:?}")),
        }
    }
}

/// Whether the residual tolerance is relative to `||Psi(u0)||` or absolute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceMode {
    Relative,
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    pub method: Method,
    /// `None` picks the energy functional for SPD systems, least squares otherwise.
    pub functional: Option<Functional>,
    /// `None` uses [`default_alpha0`].
    pub alpha0: Option<f64>,
    pub tolerance: f64,
    pub tolerance_mode: ToleranceMode,
    /// Samples per poll (`j_max`).
    pub reads: usize,
    pub expansion: bool,
    pub growth: f64,
    pub shrink: f64,
    pub max_iterations: usize,
    pub seed: u64,
    /// Keep `(u_i, alpha_i, u_a)` per iteration so Hamiltonians can be rebuilt.
    pub record_snapshots: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            method: Method::Hyperoctant,
            functional: None,
            alpha0: None,
            tolerance: 1e-5,
            tolerance_mode: ToleranceMode::Relative,
            reads: 10,
            expansion: true,
            growth: 2.0,
            shrink: 0.5,
            max_iterations: 10_000,
            seed: 0,
            record_snapshots: false,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<(), SearchError> {
        let bad = |m: &str| Err(SearchError::InvalidConfig(m.to_string()));
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink factor must lie in (0, 1)");
        }
        if !(self.growth > 1.0) || !self.growth.is_finite() {
            return bad("growth factor must exceed 1");
        }
        if !(self.tolerance > 0.0) || !self.tolerance.is_finite() {
            return bad("tolerance must be positive");
        }
        if self.reads == 0 {
            return bad("at least one read per poll is required");
        }
        if let Some(a) = self.alpha0 {
            if !(a > 0.0) || !a.is_finite() {
                return bad("alpha0 must be positive");
            }
        }
        Ok(())
    }

    pub fn functional_for<T: Real>(&self, sys: &LinearSystem<T>) -> Functional {
        self.functional.unwrap_or_else(|| Functional::for_system(sys))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Ising(#[from] IsingError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Fem(#[from] FemError),
}

/// `F(u)` or `||A u - b||^2`, evaluated classically.
pub fn functional_eval<T: Real>(
    sys: &LinearSystem<T>,
    u: &[T],
    which: Functional,
) -> Result<T, SearchError> {
    Ok(functional_value(sys, u, which)?)
}
