//! Time-to-target benchmarking: percentile targets, samples-to-target and
//! wall-clock comparisons across annealing sweep budgets.

mod bench;

pub use bench::{
    aggregate, batch_ttt_over_iterations, select_iterations, ttt_compare, BatchReport, TttAggregate, TttConfig,
};

use serde::{Deserialize, Serialize};

use crate::sampler::{Sample, SamplerError};
use crate::scalar::Real;
use crate::search::SearchError;

/// Annealing sweep counts compared by default.
pub const DEFAULT_SWEEP_GRID: [usize; 10] = [10, 20, 40, 100, 200, 400, 1000, 2000, 4000, 10000];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TttError {
    #[error("energy distribution is empty")]
    EmptyDistribution,
    #[error("percentile must lie in (0, 100), got {0}")]
    InvalidPercentile(f64),
    #[error("sweep grid is empty")]
    EmptyGrid,
    #[error("invalid benchmark configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyDistribution {
    pub energies: Vec<f64>,
    pub sampler: String,
    /// Sweep budget for annealers.
    #[serde(default)]
    pub sweeps: Option<usize>,
    #[serde(default)]
    pub seed: u64,
}

impl EnergyDistribution {
    pub fn new(energies: Vec<f64>, sampler: impl Into<String>) -> Result<Self, TttError> {
        if energies.is_empty() {
            return Err(TttError::EmptyDistribution);
        }
        Ok(Self { energies, sampler: sampler.into(), sweeps: None, seed: 0 })
    }

    pub fn from_samples<T: Real>(samples: &[Sample<T>], sampler: impl Into<String>) -> Result<Self, TttError> {
        Self::new(samples.iter().map(|s| s.energy.as_f64()).collect(), sampler)
    }

    pub fn sample_count(&self) -> usize {
        self.energies.len()
    }
}

/// Nearest-rank percentile: the `ceil(q n / 100)`-th smallest energy.
pub fn target_energy(dist: &EnergyDistribution, q: f64) -> Result<f64, TttError> {
    if !(q > 0.0 && q < 100.0) {
        return Err(TttError::InvalidPercentile(q));
    }
    let n = dist.energies.len();
    if n == 0 {
        return Err(TttError::EmptyDistribution);
    }
    let mut sorted = dist.energies.clone();
    sorted.sort_by(f64::total_cmp);
    let rank = ((q * n as f64 / 100.0).ceil() as usize).clamp(1, n);
    Ok(sorted[rank - 1])
}

/// Fraction of samples at or below `target`.
pub fn success_probability(dist: &EnergyDistribution, target: f64) -> f64 {
    if dist.energies.is_empty() {
        return 0.0;
    }
    let hits = dist.energies.iter().filter(|&&e| e <= target).count();
    hits as f64 / dist.energies.len() as f64
}

/// Expected samples to reach `target`, `1 / p`; `None` when no sample did.
pub fn stt(dist: &EnergyDistribution, target: f64) -> Option<f64> {
    let p = success_probability(dist, target);
    (p > 0.0).then(|| 1.0 / p)
}

/// One sampler's row of a report. Times are in microseconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerTtt {
    pub sampler: String,
    pub sweeps: Option<usize>,
    pub p_hat: f64,
    /// `None` stands for an infinite value.
    pub stt: Option<f64>,
    pub per_sample_us: f64,
    pub ttt_us: Option<f64>,
}

impl SamplerTtt {
    pub fn evaluate(dist: &EnergyDistribution, target: f64, per_sample_us: f64) -> Self {
        let s = stt(dist, target);
        Self {
            sampler: dist.sampler.clone(),
            sweeps: dist.sweeps,
            p_hat: success_probability(dist, target),
            stt: s,
            per_sample_us,
            ttt_us: s.map(|s| s * per_sample_us),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TttReport {
    pub percentile: f64,
    pub target: f64,
    pub reference: SamplerTtt,
    /// One row per sweep count.
    pub grid: Vec<SamplerTtt>,
    /// Index into `grid` of the smallest finite TTT.
    pub best: Option<usize>,
}

pub const TTT_CSV_HEADER: &str = "sampler,sweeps,p_hat,stt,per_sample_us,ttt_us";

impl TttReport {
    /// Grid rows against a reference; the target is the reference's
    /// `q`-th percentile. `runs` holds each comparison distribution with its
    /// per-sample time.
    pub fn from_distributions(
        reference: &EnergyDistribution,
        reference_time_us: f64,
        runs: &[(EnergyDistribution, f64)],
        q: f64,
    ) -> Result<Self, TttError> {
        if runs.is_empty() {
            return Err(TttError::EmptyGrid);
        }
        let target = target_energy(reference, q)?;
        let grid: Vec<SamplerTtt> = runs.iter().map(|(d, t)| SamplerTtt::evaluate(d, target, *t)).collect();
        let best = grid
            .iter()
            .enumerate()
            .filter_map(|(i, r)| r.ttt_us.map(|t| (i, t)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(i, _)| i);
        Ok(Self {
            percentile: q,
            target,
            reference: SamplerTtt::evaluate(reference, target, reference_time_us),
            grid,
            best,
        })
    }

    pub fn best_row(&self) -> Option<&SamplerTtt> {
        self.best.map(|i| &self.grid[i])
    }

    /// Optimal comparison TTT over reference TTT.
    pub fn ratio(&self) -> Option<f64> {
        Some(self.best_row()?.ttt_us? / self.reference.ttt_us?)
    }

    pub fn to_csv(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or_else(|| "inf".to_string(), |x| format!("{x:e}"));
        let mut out = format!("{TTT_CSV_HEADER}\n");
        for r in std::iter::once(&self.reference).chain(&self.grid) {
            out.push_str(&format!(
                "{},{},{:e},{},{:e},{}\n",
                r.sampler,
                r.sweeps.map_or_else(String::new, |s| s.to_string()),
                r.p_hat,
                fmt(r.stt),
                r.per_sample_us,
                fmt(r.ttt_us)
            ));
        }
        out
    }

    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        serde_json::to_string_pretty(self)
    }
}
