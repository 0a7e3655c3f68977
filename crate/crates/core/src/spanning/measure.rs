use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{SetKind, SpanningError, SpanningSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureOptions {
    /// Random starting directions in addition to the structured ones.
    pub restarts: usize,
    /// Stop refining once the projected gradient is this small.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self { restarts: 1000, tolerance: 1e-10, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineMeasureReport {
    pub n: usize,
    pub kind: SetKind,
    /// Smallest inner maximum found; an upper bound on `cm(D)`.
    pub estimate: f64,
    pub closed_form: Option<f64>,
    /// Unit direction attaining `estimate`.
    pub minimizer: Vec<f64>,
    /// Inner maximum at the known minimizing direction, when there is one.
    pub at_known_minimizer: Option<f64>,
    pub restarts: usize,
    pub starts_evaluated: usize,
    pub tolerance: f64,
}

impl CosineMeasureReport {
    pub fn to_table(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.6}"));
        format!(
            "kind        {:?}\nN           {}\nestimate    {:.6}\nclosed form {}\nat witness  {}\nstarts      {} ({} random)\n",
            self.kind,
            self.n,
            self.estimate,
            opt(self.closed_form),
            opt(self.at_known_minimizer),
            self.starts_evaluated,
            self.restarts,
        )
    }
}

/// `1 / sqrt(sum_j (sqrt j - sqrt(j-1))^2)`
pub fn cm_d3_closed_form(n: usize) -> f64 {
    1.0 / d3_square_sum(n).sqrt()
}

fn d3_term(j: usize) -> f64 {
    // sqrt j - sqrt(j-1) = 1 / (sqrt j + sqrt(j-1)), without cancellation
    let t = 1.0 / ((j as f64).sqrt() + ((j - 1) as f64).sqrt());
    t * t
}

fn d3_square_sum(n: usize) -> f64 {
    (1..=n).map(d3_term).sum()
}

/// `1 / sqrt(ln N + 1)`
pub fn d3_lower_bound(n: usize) -> f64 {
    1.0 / ((n as f64).ln() + 1.0).sqrt()
}

/// Smallest `N <= max_n` where the closed form falls below [`d3_lower_bound`].
pub fn first_d3_bound_violation(max_n: usize) -> Option<usize> {
    let mut sum = 0.0;
    (1..=max_n).find(|&n| {
        sum += d3_term(n);
        1.0 / sum.sqrt() < d3_lower_bound(n)
    })
}

/// Direction whose `j`-th largest component in magnitude is
/// `(sqrt j - sqrt(j-1))` with the sign of `v`; it makes equal angles with
/// the `N` vectors of `D3` closest to `v`. Returned with unit length.
pub fn minimizer_witness_d3(v: &[f64]) -> Option<Vec<f64>> {
    if v.is_empty() || v.iter().all(|&x| x == 0.0) || v.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&a, &b| v[b].abs().total_cmp(&v[a].abs()).then(a.cmp(&b)));
    let mut r = vec![0.0; v.len()];
    for (rank, &i) in order.iter().enumerate() {
        let sign = if v[i] < 0.0 { -1.0 } else { 1.0 };
        r[i] = sign * d3_term(rank + 1).sqrt();
    }
    normalize(&mut r);
    Some(r)
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

struct Directions {
    dim: usize,
    // row-major unit vectors
    data: Vec<f64>,
}

impl Directions {
    fn new(set: &SpanningSet) -> Result<Self, SpanningError> {
        let mut data = Vec::new();
        for v in set.nonzero() {
            let mut u = v.clone();
            normalize(&mut u);
            data.extend(u);
        }
        if data.is_empty() {
            return Err(SpanningError::Degenerate);
        }
        Ok(Self { dim: set.dim, data })
    }

    fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    fn inner_max(&self, v: &[f64]) -> f64 {
        self.rows()
            .map(|d| d.iter().zip(v).map(|(a, b)| a * b).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Log-sum-exp smoothing of the inner max and its gradient.
    fn smooth(&self, v: &[f64], mu: f64, grad: &mut [f64]) -> f64 {
        let dots: Vec<f64> = self.rows().map(|d| d.iter().zip(v).map(|(a, b)| a * b).sum()).collect();
        let top = dots.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut z = 0.0;
        for (d, &p) in self.rows().zip(&dots) {
            let w = ((p - top) / mu).exp();
            z += w;
            for (g, x) in grad.iter_mut().zip(d) {
                *g += w * x;
            }
        }
        grad.iter_mut().for_each(|g| *g /= z);
        top + mu * z.ln()
    }

    /// Projected gradient descent on the sphere over a decreasing smoothing
    /// sequence; returns the best point seen under the exact inner max.
    fn refine(&self, start: &[f64], tol: f64) -> (f64, Vec<f64>) {
        let mut v = start.to_vec();
        normalize(&mut v);
        let mut best = (self.inner_max(&v), v.clone());
        let mut grad = vec![0.0; self.dim];
        let mut trial_grad = vec![0.0; self.dim];
        for mu in [1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4, 3e-5] {
            let mut f = self.smooth(&v, mu, &mut grad);
            let mut step: f64 = 1.0;
            for _ in 0..200 {
                let radial: f64 = grad.iter().zip(&v).map(|(g, x)| g * x).sum();
                let tangent: Vec<f64> = grad.iter().zip(&v).map(|(g, x)| g - radial * x).collect();
                let t2: f64 = tangent.iter().map(|t| t * t).sum();
                if t2.sqrt() < tol {
                    break;
                }
                step = (step * 2.0).min(1.0);
                let mut moved = false;
                while step > 1e-14 {
                    let mut w: Vec<f64> = v.iter().zip(&tangent).map(|(x, t)| x - step * t).collect();
                    normalize(&mut w);
                    let fw = self.smooth(&w, mu, &mut trial_grad);
                    if fw <= f - 1e-4 * step * t2 {
                        v = w;
                        f = fw;
                        std::mem::swap(&mut grad, &mut trial_grad);
                        moved = true;
                        break;
                    }
                    step *= 0.5;
                }
                if !moved {
                    break;
                }
            }
            let exact = self.inner_max(&v);
            if exact < best.0 {
                best = (exact, v.clone());
            }
        }
        best
    }
}

/// `max_{d != 0} v^T d / (||v|| ||d||)`
pub fn inner_max(set: &SpanningSet, v: &[f64]) -> Result<f64, SpanningError> {
    let dirs = Directions::new(set)?;
    let mut u = v.to_vec();
    if normalize(&mut u) == 0.0 {
        return Err(SpanningError::Degenerate);
    }
    Ok(dirs.inner_max(&u))
}

fn sign_vectors(n: usize) -> Vec<Vec<f64>> {
    (0..1usize << n)
        .map(|k| (0..n).map(|i| if (k >> i) & 1 == 1 { 1.0 } else { -1.0 }).collect())
        .collect()
}

fn known_minimizer(kind: SetKind, n: usize) -> Option<Vec<f64>> {
    match kind {
        SetKind::Dplus | SetKind::D2 => Some(vec![1.0; n]),
        SetKind::D3 => {
            let v: Vec<f64> = (0..n).map(|i| (n - i) as f64).collect();
            minimizer_witness_d3(&v)
        }
        _ => None,
    }
}

fn closed_form(kind: SetKind, n: usize) -> Option<f64> {
    match kind {
        SetKind::Dplus | SetKind::D2 => Some(1.0 / (n as f64).sqrt()),
        SetKind::D3 => Some(cm_d3_closed_form(n)),
        _ => None,
    }
}

/// Multi-start estimate of `min_v max_{d != 0} cos(v, d)`. Starts are the
/// coordinate directions, the normalized set vectors, sign vectors for
/// `N <= 10`, the `D3` witness of every random start, and the random starts.
pub fn cosine_measure(set: &SpanningSet, opts: &MeasureOptions) -> Result<CosineMeasureReport, SpanningError> {
    let dirs = Directions::new(set)?;
    let n = set.dim;
    let mut starts: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        for s in [1.0, -1.0] {
            let mut e = vec![0.0; n];
            e[i] = s;
            starts.push(e);
        }
    }
    if n <= 10 {
        starts.extend(sign_vectors(n));
    }
    if set.len() <= 4096 {
        starts.extend(set.nonzero().cloned());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.restarts {
        let v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
        if let Some(w) = minimizer_witness_d3(&v) {
            starts.push(w);
        }
        starts.push(v);
    }
    starts.retain(|v| v.iter().any(|&x| x != 0.0));

    let (estimate, minimizer) = starts
        .par_iter()
        .map(|s| dirs.refine(s, opts.tolerance))
        .reduce_with(|a, b| if b.0 < a.0 { b } else { a })
        .ok_or(SpanningError::Degenerate)?;

    Ok(CosineMeasureReport {
        n,
        kind: set.kind,
        estimate,
        closed_form: closed_form(set.kind, n),
        minimizer,
        at_known_minimizer: known_minimizer(set.kind, n).map(|v| {
            let mut u = v;
            normalize(&mut u);
            dirs.inner_max(&u)
        }),
        restarts: opts.restarts,
        starts_evaluated: starts.len(),
        tolerance: opts.tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spanning::generate;

    fn quick() -> MeasureOptions {
        MeasureOptions { restarts: 50, ..Default::default() }
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(cm_d3_closed_form(1), 1.0);
        let two = 1.0 / (4.0 - 2.0 * 2f64.sqrt()).sqrt();
        assert!((cm_d3_closed_form(2) - two).abs() < 1e-15);
        assert!((two - 0.923_879_532_5).abs() < 1e-9);
        assert!(cm_d3_closed_form(100) >= 0.4252);
    }

    #[test]
    fn witness_examples() {
        let r = minimizer_witness_d3(&[5.0]).unwrap();
        assert_eq!(r, vec![1.0]);
        let r = minimizer_witness_d3(&[3.0, -1.0]).unwrap();
        let ratio = r[1] / r[0];
        assert!((ratio + (2f64.sqrt() - 1.0)).abs() < 1e-15);
        let d3 = generate(SetKind::D3, 2).unwrap();
        assert!((inner_max(&d3, &r).unwrap() - cm_d3_closed_form(2)).abs() < 1e-12);
        assert!(minimizer_witness_d3(&[0.0, 0.0]).is_none());
    }

    #[test]
    fn witness_equal_angles_three_dims() {
        let d3 = generate(SetKind::D3, 3).unwrap();
        let r = minimizer_witness_d3(&[0.2, -3.0, 1.1]).unwrap();
        assert!((inner_max(&d3, &r).unwrap() - cm_d3_closed_form(3)).abs() < 1e-12);
    }

    #[test]
    fn small_measures() {
        let rep = cosine_measure(&generate(SetKind::Dplus, 4).unwrap(), &quick()).unwrap();
        assert!((rep.estimate - 0.5).abs() < 1e-3, "{}", rep.estimate);
        let rep = cosine_measure(&generate(SetKind::D3, 2).unwrap(), &quick()).unwrap();
        assert!((rep.estimate - cm_d3_closed_form(2)).abs() < 1e-3);
        assert!((rep.at_known_minimizer.unwrap() - cm_d3_closed_form(2)).abs() < 1e-12);
    }

    #[test]
    fn degenerate_set() {
        let set = SpanningSet::custom(2, vec![vec![0.0, 0.0]]).unwrap();
        assert_eq!(cosine_measure(&set, &quick()), Err(SpanningError::Degenerate));
    }

    #[test]
    fn bound_holds_on_prefix() {
        assert_eq!(first_d3_bound_violation(10_000), None);
    }
}
