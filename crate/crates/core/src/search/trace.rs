use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Initial,
    Expansion,
    Contraction,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Initial => "initial",
            Phase::Expansion => "expansion",
            Phase::Contraction => "contraction",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    AlphaUnderflow,
    MaxIterations,
}

/// Row `0` is the initial guess; row `k` is the state after poll `k`, which
/// used scale `alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub alpha: f64,
    pub functional: f64,
    pub residual: f64,
    pub success: bool,
    pub phase: Phase,
}

/// Iterate and scale a poll started from, enough to rebuild its Hamiltonians.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PollSnapshot<T> {
    pub iter: usize,
    pub alpha: T,
    pub u: Vec<T>,
    #[serde(default)]
    pub u_a: Option<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SearchTrace<T> {
    pub records: Vec<TraceRecord>,
    pub solution: Vec<T>,
    pub termination: Termination,
    pub initial_residual: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<PollSnapshot<T>>,
}

pub const TRACE_CSV_HEADER: &str = "iter,alpha,functional,residual,success,phase";

impl<T: Real> SearchTrace<T> {
    /// Number of polls performed.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn final_residual(&self) -> f64 {
        self.records.last().map_or(self.initial_residual, |r| r.residual)
    }

    /// `||Psi(u_final)|| / ||Psi(u_0)||`, or `0` when the start was exact.
    pub fn normalized_residual(&self) -> f64 {
        if self.initial_residual == 0.0 {
            0.0
        } else {
            self.final_residual() / self.initial_residual
        }
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_CSV_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{:e},{:e},{:e},{},{}",
                r.iter,
                r.alpha,
                r.functional,
                r.residual,
                r.success,
                r.phase.as_str()
            );
        }
        out
    }

    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }
}
