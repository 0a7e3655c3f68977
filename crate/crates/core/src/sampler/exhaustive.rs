use std::cmp::Ordering;

use rayon::prelude::*;

use super::{Sample, Sampler, SamplerError};
use crate::ising::{spin_vector, StandardIsing};
use crate::scalar::Real;

pub const MAX_EXHAUSTIVE_SPINS: usize = 24;

fn ranked<T: Real>(h: &StandardIsing<T>) -> Result<Vec<(T, u64)>, SamplerError> {
    let n = h.n();
    if n > MAX_EXHAUSTIVE_SPINS {
        return Err(SamplerError::TooManySpins {
            n,
            max: MAX_EXHAUSTIVE_SPINS,
        });
    }
    let total = 1u64 << n;
    let mut all: Vec<(T, u64)> = (0..total)
        .into_par_iter()
        .map(|idx| (h.energy(&spin_vector(idx, n)), idx))
        .collect();
    all.par_sort_unstable_by(order);
    Ok(all)
}

fn order<T: Real>(a: &(T, u64), b: &(T, u64)) -> Ordering {
    a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1))
}

/// Every state sorted by energy, ties in lexicographic spin order.
pub fn exhaustive<T: Real>(h: &StandardIsing<T>) -> Result<Vec<Sample<T>>, SamplerError> {
    let n = h.n();
    Ok(ranked(h)?
        .into_iter()
        .map(|(energy, idx)| Sample {
            spins: spin_vector(idx, n),
            energy,
        })
        .collect())
}

/// The `k` lowest states in the [`exhaustive`] order.
pub fn exhaustive_lowest<T: Real>(h: &StandardIsing<T>, k: usize) -> Result<Vec<Sample<T>>, SamplerError> {
    let n = h.n();
    Ok(ranked(h)?
        .into_iter()
        .take(k)
        .map(|(energy, idx)| Sample {
            spins: spin_vector(idx, n),
            energy,
        })
        .collect())
}

/// Deterministic oracle: read `j` is the `j`-th lowest state, wrapping around
/// when more reads than states are requested. The seed is ignored.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExhaustiveSampler;

impl<T: Real> Sampler<T> for ExhaustiveSampler {
    fn sample(&self, h: &StandardIsing<T>, reads: usize, _seed: u64) -> Result<Vec<Sample<T>>, SamplerError> {
        let states = exhaustive_lowest(h, reads)?;
        Ok(states.iter().cycle().take(reads).cloned().collect())
    }

    fn name(&self) -> &str {
        "exhaustive"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::{map_spd, to_standard, build_frame};
    use crate::fem::{BoundarySpec, LinearSystem};
    use crate::linalg::{CsrMatrix, DenseMatrix};

    #[test]
    fn ferromagnet_enumeration() {
        let mut j = DenseMatrix::zeros(2, 2);
        j[(0, 1)] = -1.0;
        let h = StandardIsing::new(j, vec![0.0, 0.0], 0.0).unwrap();
        let all = exhaustive(&h).unwrap();
        let e: Vec<f64> = all.iter().map(|s| s.energy).collect();
        assert_eq!(e, vec![-1.0, -1.0, 1.0, 1.0]);
        assert_eq!(all[0].spins, vec![-1, -1]);
        assert_eq!(all[1].spins, vec![1, 1]);
        assert_eq!(all[2].spins, vec![-1, 1]);
    }

    #[test]
    fn no_spins_gives_offset() {
        let h = StandardIsing::new(DenseMatrix::zeros(0, 0), vec![], 2.5).unwrap();
        let all = exhaustive(&h).unwrap();
        assert_eq!(all, vec![Sample { spins: vec![], energy: 2.5 }]);
        let reads = ExhaustiveSampler.sample(&h, 3, 0).unwrap();
        assert_eq!(reads.len(), 3);
    }

    #[test]
    fn mapped_example_ground_state() {
        let a = CsrMatrix::from_dense(&DenseMatrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap());
        let sys = LinearSystem::new(a, vec![1.0, 1.0], BoundarySpec::new(), true).unwrap();
        let frame = build_frame(&sys, &[0.0, 0.0], 1.0, &[0.0, 0.0]).unwrap();
        let h = to_standard(&map_spd(&sys, &frame).unwrap());
        assert_eq!(exhaustive(&h).unwrap()[0].spins, vec![1, 1]);
    }

    #[test]
    fn oversized_problem_rejected() {
        let n = MAX_EXHAUSTIVE_SPINS + 1;
        let h = StandardIsing::new(DenseMatrix::zeros(n, n), vec![0.0; n], 0.0).unwrap();
        assert_eq!(
            exhaustive(&h),
            Err(SamplerError::TooManySpins { n, max: MAX_EXHAUSTIVE_SPINS })
        );
    }

    #[test]
    fn sampler_returns_lowest_states() {
        let h = StandardIsing::new(DenseMatrix::zeros(2, 2), vec![1.0, 2.0], 0.0).unwrap();
        let reads = ExhaustiveSampler.sample(&h, 5, 0).unwrap();
        let e: Vec<f64> = reads.iter().map(|s| s.energy).collect();
        assert_eq!(e, vec![-3.0, -1.0, 1.0, 3.0, -3.0]);
    }
}
