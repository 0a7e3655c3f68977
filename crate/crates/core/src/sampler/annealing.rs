use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Sample, Sampler, SamplerError};
use crate::ising::{Spin, StandardIsing};
use crate::scalar::Real;

/// Metropolis annealing parameters. Temperatures left unset are derived from
/// the Hamiltonian by [`auto_temperatures`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaConfig {
    pub sweeps: usize,
    pub t_hot: Option<f64>,
    pub t_cold: Option<f64>,
    pub seed: u64,
}

impl Default for SaConfig {
    fn default() -> Self {
        Self {
            sweeps: 1000,
            t_hot: None,
            t_cold: None,
            seed: 0,
        }
    }
}

impl SaConfig {
    pub fn with_sweeps(sweeps: usize) -> Self {
        Self {
            sweeps,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.sweeps == 0 {
            return Err(SamplerError::InvalidConfig("sweep count must be positive".into()));
        }
        let ok = |t: f64| t.is_finite() && t > 0.0;
        if let Some(t) = self.t_hot {
            if !ok(t) {
                return Err(SamplerError::InvalidConfig("T_hot must be positive".into()));
            }
        }
        if let Some(t) = self.t_cold {
            if !ok(t) {
                return Err(SamplerError::InvalidConfig("T_cold must be positive".into()));
            }
        }
        if let (Some(hot), Some(cold)) = (self.t_hot, self.t_cold) {
            if hot < cold {
                return Err(SamplerError::InvalidConfig("T_hot must be >= T_cold".into()));
            }
        }
        Ok(())
    }

    /// `(T_hot, T_cold)` for `h`.
    pub fn temperatures<T: Real>(&self, h: &StandardIsing<T>) -> (f64, f64) {
        let (auto_hot, _) = auto_temperatures(h);
        let hot = self.t_hot.unwrap_or(auto_hot);
        let cold = self.t_cold.unwrap_or(1e-3 * hot).min(hot);
        (hot, cold)
    }
}

/// `T_hot = max(max|h|, max_i sum_j |J_ij|)` over the symmetric couplings and
/// `T_cold = 1e-3 T_hot`; a zero Hamiltonian gets `T_hot = 1`.
pub fn auto_temperatures<T: Real>(h: &StandardIsing<T>) -> (f64, f64) {
    let mut col = vec![0.0f64; h.n()];
    for (i, k, v) in h.edges() {
        col[i] += v.as_f64().abs();
        col[k] += v.as_f64().abs();
    }
    let hot = col
        .into_iter()
        .fold(h.max_abs_bias().as_f64(), f64::max);
    let hot = if hot > 0.0 && hot.is_finite() { hot } else { 1.0 };
    (hot, 1e-3 * hot)
}

struct Prepared {
    bias: Vec<f64>,
    adj: Vec<Vec<(usize, f64)>>,
    betas: Vec<f64>,
}

impl Prepared {
    fn new<T: Real>(h: &StandardIsing<T>, cfg: &SaConfig) -> Self {
        let (hot, cold) = cfg.temperatures(h);
        let k = cfg.sweeps;
        let betas = (0..k)
            .map(|s| {
                let t = if k == 1 {
                    cold
                } else {
                    hot * (cold / hot).powf(s as f64 / (k - 1) as f64)
                };
                1.0 / t
            })
            .collect();
        Self {
            bias: h.biases().iter().map(|v| v.as_f64()).collect(),
            adj: h
                .neighbors()
                .into_iter()
                .map(|row| row.into_iter().map(|(j, v)| (j, v.as_f64())).collect())
                .collect(),
            betas,
        }
    }

    fn run(&self, rng: &mut ChaCha8Rng) -> Vec<Spin> {
        let n = self.bias.len();
        let mut q: Vec<Spin> = (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
        // field_i = h_i + sum_j J_ij q_j; flipping i changes the energy by -2 q_i field_i
        let mut field: Vec<f64> = (0..n)
            .map(|i| self.bias[i] + self.adj[i].iter().map(|&(j, v)| v * q[j] as f64).sum::<f64>())
            .collect();
        for &beta in &self.betas {
            for i in 0..n {
                let de = -2.0 * q[i] as f64 * field[i];
                if de <= 0.0 || rng.random::<f64>() < (-beta * de).exp() {
                    q[i] = -q[i];
                    let change = 2.0 * q[i] as f64;
                    for &(j, v) in &self.adj[i] {
                        field[j] += v * change;
                    }
                }
            }
        }
        q
    }
}

fn read_rng(seed: u64, read: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(read);
    rng
}

/// One annealing run of `cfg.sweeps` sequential Metropolis sweeps from a
/// uniformly random start, seeded by `cfg.seed`.
pub fn simulated_anneal<T: Real>(h: &StandardIsing<T>, cfg: &SaConfig) -> Sample<T> {
    let prep = Prepared::new(h, cfg);
    let spins = prep.run(&mut read_rng(cfg.seed, 0));
    Sample::evaluate(h, spins)
}

/// Batch annealer; read `j` uses ChaCha8 stream `j` of the batch seed, so
/// results do not depend on the thread count.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimulatedAnnealer {
    pub config: SaConfig,
}

impl SimulatedAnnealer {
    pub fn new(config: SaConfig) -> Result<Self, SamplerError> {
        config.validate()?;
        Ok(Self { config })
    }
}

impl<T: Real> Sampler<T> for SimulatedAnnealer {
    fn sample(&self, h: &StandardIsing<T>, reads: usize, seed: u64) -> Result<Vec<Sample<T>>, SamplerError> {
        self.config.validate()?;
        let prep = Prepared::new(h, &self.config);
        Ok((0..reads as u64)
            .into_par_iter()
            .map(|j| Sample::evaluate(h, prep.run(&mut read_rng(seed, j))))
            .collect())
    }

    fn name(&self) -> &str {
        "simulated_annealing"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;

    fn single(bias: f64) -> StandardIsing<f64> {
        StandardIsing::new(DenseMatrix::zeros(1, 1), vec![bias], 0.0).unwrap()
    }

    fn ferromagnet() -> StandardIsing<f64> {
        let mut j = DenseMatrix::zeros(2, 2);
        j[(0, 1)] = -1.0;
        StandardIsing::new(j, vec![0.0, 0.0], 0.0).unwrap()
    }

    #[test]
    fn strong_field_aligns_spin() {
        let h = single(-2.0);
        let mut ups = 0;
        for seed in 0..100 {
            let cfg = SaConfig {
                sweeps: 100,
                t_hot: Some(2.0),
                t_cold: Some(0.01),
                seed,
            };
            if simulated_anneal(&h, &cfg).spins == vec![1] {
                ups += 1;
            }
        }
        assert!(ups >= 99, "{ups}");
    }

    #[test]
    fn free_spins_have_zero_energy() {
        let h = StandardIsing::new(DenseMatrix::zeros(3, 3), vec![0.0; 3], 0.0).unwrap();
        let batch = SimulatedAnnealer::default().sample(&h, 200, 3).unwrap();
        assert!(batch.iter().all(|s| s.energy == 0.0));
        let ups = batch.iter().filter(|s| s.spins[0] == 1).count();
        assert!((60..=140).contains(&ups), "{ups}");
    }

    #[test]
    fn ferromagnet_finds_aligned_states() {
        let h = ferromagnet();
        let sa = SimulatedAnnealer::new(SaConfig::with_sweeps(200)).unwrap();
        let batch = sa.sample(&h, 200, 11).unwrap();
        let ground = batch.iter().filter(|s| s.energy == -1.0).count();
        assert!(ground as f64 >= 0.95 * 200.0, "{ground}");
        for s in &batch {
            if s.energy == -1.0 {
                assert_eq!(s.spins[0], s.spins[1]);
            }
        }
    }

    #[test]
    fn batches_are_reproducible() {
        let h = ferromagnet();
        let sa = SimulatedAnnealer::new(SaConfig::with_sweeps(10)).unwrap();
        let a = sa.sample(&h, 32, 5).unwrap();
        let b = sa.sample(&h, 32, 5).unwrap();
        assert_eq!(a, b);
        let c = sa.sample(&h, 32, 6).unwrap();
        assert_ne!(a, c);
        let first = simulated_anneal(&h, &SaConfig { seed: 5, ..SaConfig::with_sweeps(10) });
        assert_eq!(first, a[0]);
    }

    #[test]
    fn auto_schedule() {
        let h = ferromagnet();
        assert_eq!(auto_temperatures(&h), (1.0, 1e-3));
        assert_eq!(auto_temperatures(&single(-3.0)).0, 3.0);
        assert_eq!(auto_temperatures(&single(0.0)).0, 1.0);
    }

    #[test]
    fn bad_configs_rejected() {
        assert!(SimulatedAnnealer::new(SaConfig::with_sweeps(0)).is_err());
        let cfg = SaConfig {
            t_hot: Some(0.1),
            t_cold: Some(1.0),
            ..SaConfig::default()
        };
        assert!(SimulatedAnnealer::new(cfg).is_err());
    }
}
