use std::time::Instant;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{EnergyDistribution, TttError, TttReport, DEFAULT_SWEEP_GRID};
use crate::fem::LinearSystem;
use crate::ising::{Functional, StandardIsing};
use crate::sampler::{SaConfig, Sampler, SimulatedAnnealer};
use crate::scalar::Real;
use crate::search::{mix, poll_hamiltonians, Method, SearchTrace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TttConfig {
    pub sweep_grid: Vec<usize>,
    pub reads: usize,
    pub percentile: f64,
    pub seed: u64,
    /// Fixed per-sample time of the reference (`t_a`). Unset uses the
    /// sampler's own figure, then measured wall time per read.
    pub reference_time_us: Option<f64>,
    /// Per-sweep annealer time `t_s`. Unset measures wall time per read.
    pub sweep_time_us: Option<f64>,
    /// Reference accounting overheads, spread over the reads of one job.
    pub per_job_overhead_us: f64,
    pub per_read_overhead_us: f64,
    pub t_hot: Option<f64>,
    pub t_cold: Option<f64>,
}

impl Default for TttConfig {
    fn default() -> Self {
        Self {
            sweep_grid: DEFAULT_SWEEP_GRID.to_vec(),
            reads: 1000,
            percentile: 10.0,
            seed: 0,
            reference_time_us: None,
            sweep_time_us: None,
            per_job_overhead_us: 0.0,
            per_read_overhead_us: 0.0,
            t_hot: None,
            t_cold: None,
        }
    }
}

impl TttConfig {
    pub fn validate(&self) -> Result<(), TttError> {
        if self.sweep_grid.is_empty() {
            return Err(TttError::EmptyGrid);
        }
        if self.sweep_grid.contains(&0) {
            return Err(TttError::InvalidConfig("sweep counts must be positive".into()));
        }
        if self.reads == 0 {
            return Err(TttError::InvalidConfig("at least one read is required".into()));
        }
        if !(self.percentile > 0.0 && self.percentile < 100.0) {
            return Err(TttError::InvalidPercentile(self.percentile));
        }
        let times = [self.reference_time_us, self.sweep_time_us];
        if times.iter().flatten().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(TttError::InvalidConfig("per-sample times must be positive".into()));
        }
        if !(self.per_job_overhead_us >= 0.0 && self.per_read_overhead_us >= 0.0) {
            return Err(TttError::InvalidConfig("overheads must be nonnegative".into()));
        }
        if self.reads < 100 {
            log::warn!("{} reads give an unstable percentile target", self.reads);
        }
        Ok(())
    }

    fn annealer(&self, sweeps: usize) -> SimulatedAnnealer {
        SimulatedAnnealer {
            config: SaConfig { sweeps, t_hot: self.t_hot, t_cold: self.t_cold, seed: 0 },
        }
    }
}

fn timed<T: Real, S: Sampler<T> + ?Sized>(
    sampler: &S,
    h: &StandardIsing<T>,
    reads: usize,
    seed: u64,
) -> Result<(EnergyDistribution, f64), TttError> {
    let start = Instant::now();
    let samples = sampler.sample(h, reads, seed)?;
    let per_read = start.elapsed().as_secs_f64() * 1e6 / reads as f64;
    let mut dist = EnergyDistribution::from_samples(&samples, sampler.name())?;
    dist.seed = seed;
    Ok((dist, per_read))
}

/// Samples `h` with the reference and with annealing at every grid sweep
/// count, then compares times to the reference's percentile target.
pub fn ttt_compare<T: Real, S: Sampler<T> + ?Sized>(
    h: &StandardIsing<T>,
    reference: &S,
    cfg: &TttConfig,
) -> Result<TttReport, TttError> {
    cfg.validate()?;
    let (ref_dist, measured) = timed(reference, h, cfg.reads, mix(cfg.seed, 0))?;
    let base = cfg
        .reference_time_us
        .or_else(|| reference.time_per_sample_us())
        .unwrap_or(measured);
    let ref_time = base + cfg.per_read_overhead_us + cfg.per_job_overhead_us / cfg.reads as f64;

    let mut runs = Vec::with_capacity(cfg.sweep_grid.len());
    for (k, &sweeps) in cfg.sweep_grid.iter().enumerate() {
        let (mut dist, measured) = timed(&cfg.annealer(sweeps), h, cfg.reads, mix(cfg.seed, k as u64 + 1))?;
        dist.sweeps = Some(sweeps);
        let per_sample = cfg.sweep_time_us.map_or(measured, |ts| sweeps as f64 * ts);
        runs.push((dist, per_sample));
    }
    TttReport::from_distributions(&ref_dist, ref_time, &runs, cfg.percentile)
}

/// `count` distinct indices below `available` in ascending order, or all of
/// them when fewer are available.
pub fn select_iterations(available: usize, count: usize, seed: u64) -> Vec<usize> {
    if count >= available {
        return (0..available).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, available, count).into_vec();
    picked.sort_unstable();
    picked
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TttAggregate {
    pub count: usize,
    /// Reports with no finite comparison TTT.
    pub infinite: usize,
    pub mean_reference_ttt_us: Option<f64>,
    pub mean_best_ttt_us: Option<f64>,
    pub mean_ratio: Option<f64>,
    pub min_ratio: Option<f64>,
    pub max_ratio: Option<f64>,
    pub std_ratio: Option<f64>,
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Means over the finite values of each column.
pub fn aggregate(reports: &[TttReport]) -> TttAggregate {
    let refs: Vec<f64> = reports.iter().filter_map(|r| r.reference.ttt_us).collect();
    let best: Vec<f64> = reports.iter().filter_map(|r| r.best_row().and_then(|b| b.ttt_us)).collect();
    let ratios: Vec<f64> = reports.iter().filter_map(TttReport::ratio).collect();
    let m = mean(&ratios);
    TttAggregate {
        count: reports.len(),
        infinite: reports.iter().filter(|r| r.best.is_none()).count(),
        mean_reference_ttt_us: mean(&refs),
        mean_best_ttt_us: mean(&best),
        mean_ratio: m,
        min_ratio: ratios.iter().cloned().reduce(f64::min),
        max_ratio: ratios.iter().cloned().reduce(f64::max),
        std_ratio: m.map(|m| (ratios.iter().map(|r| (r - m).powi(2)).sum::<f64>() / ratios.len() as f64).sqrt()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    /// Iteration numbers whose Hamiltonians were benchmarked.
    pub iterations: Vec<usize>,
    pub reports: Vec<TttReport>,
    pub aggregate: TttAggregate,
}

/// Rebuilds the Hamiltonians of up to `iterations` randomly chosen polls of
/// a recorded run (at most `per_iteration` each) and benchmarks every one.
#[allow(clippy::too_many_arguments)]
pub fn batch_ttt_over_iterations<T: Real, S: Sampler<T> + ?Sized>(
    sys: &LinearSystem<T>,
    trace: &SearchTrace<T>,
    method: Method,
    functional: Functional,
    iterations: usize,
    per_iteration: usize,
    reference: &S,
    cfg: &TttConfig,
) -> Result<BatchReport, TttError> {
    if trace.snapshots.is_empty() {
        return Err(TttError::InvalidConfig("run has no recorded poll snapshots".into()));
    }
    let picked = select_iterations(trace.snapshots.len(), iterations, cfg.seed);
    let mut reports = Vec::new();
    let mut chosen = Vec::with_capacity(picked.len());
    for (k, &i) in picked.iter().enumerate() {
        let snap = &trace.snapshots[i];
        chosen.push(snap.iter);
        let hs = poll_hamiltonians(sys, snap, method, functional)?;
        for (m, h) in hs.iter().take(per_iteration).enumerate() {
            let sub = TttConfig { seed: mix(cfg.seed, (2 * k + m) as u64 + 1), ..cfg.clone() };
            reports.push(ttt_compare(h, reference, &sub)?);
        }
    }
    Ok(BatchReport { iterations: chosen, aggregate: aggregate(&reports), reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::sampler::ExhaustiveSampler;

    fn glass(n: usize, seed: u64) -> StandardIsing<f64> {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut j = DenseMatrix::zeros(n, n);
        for a in 0..n {
            for b in a + 1..n {
                j[(a, b)] = rng.random_range(-1.0..1.0);
            }
        }
        let h = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        StandardIsing::new(j, h, 0.0).unwrap()
    }

    #[test]
    fn selection_is_seeded_and_saturates() {
        assert_eq!(select_iterations(5, 20, 1), vec![0, 1, 2, 3, 4]);
        let a = select_iterations(100, 20, 7);
        assert_eq!(a, select_iterations(100, 20, 7));
        assert_eq!(a.len(), 20);
        assert!(a.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(select_iterations(100, 1, 3), select_iterations(100, 1, 3));
    }

    #[test]
    fn identical_reports_aggregate_to_themselves() {
        let reference = EnergyDistribution::new(vec![0.0, 1.0], "r").unwrap();
        let run = (EnergyDistribution::new(vec![0.0, 1.0, 1.0, 1.0], "c").unwrap(), 2.0);
        let report = TttReport::from_distributions(&reference, 3.0, &[run], 10.0).unwrap();
        let agg = aggregate(&vec![report.clone(); 4]);
        assert_eq!(agg.count, 4);
        assert_eq!(agg.mean_ratio, report.ratio());
        assert_eq!(agg.mean_best_ttt_us, Some(8.0));
        assert_eq!(agg.std_ratio, Some(0.0));
    }

    #[test]
    fn self_comparison_near_one() {
        let h = glass(12, 4);
        let cfg = TttConfig {
            sweep_grid: vec![100],
            reads: 1000,
            reference_time_us: Some(100.0),
            sweep_time_us: Some(1.0),
            ..Default::default()
        };
        let sa = cfg.annealer(100);
        let report = ttt_compare(&h, &sa, &cfg).unwrap();
        let ratio = report.ratio().unwrap();
        assert!((0.5..=2.0).contains(&ratio), "{ratio}");
    }

    #[test]
    fn exhaustive_reference_target() {
        // 160 reads cycle the 16 states ten times each; rank 16 is the second state
        let h = glass(4, 1);
        let cfg = TttConfig { sweep_grid: vec![10, 100], reads: 160, sweep_time_us: Some(1.0), ..Default::default() };
        let report = ttt_compare(&h, &ExhaustiveSampler, &cfg).unwrap();
        let states = crate::sampler::exhaustive(&h).unwrap();
        assert_eq!(report.target, states[1].energy);
        assert_eq!(report.reference.p_hat, 20.0 / 160.0);
        assert_eq!(report.grid.len(), 2);
    }

    #[test]
    fn rejects_bad_configs() {
        let h = glass(3, 0);
        for cfg in [
            TttConfig { sweep_grid: vec![], ..Default::default() },
            TttConfig { sweep_grid: vec![0], ..Default::default() },
            TttConfig { percentile: 100.0, ..Default::default() },
            TttConfig { reads: 0, ..Default::default() },
        ] {
            assert!(ttt_compare(&h, &ExhaustiveSampler, &cfg).is_err());
        }
    }
}
