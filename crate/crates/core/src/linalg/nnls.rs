use super::{dot, norm2, DenseMatrix};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct NnlsSolution<T> {
    /// One non-negative coefficient per column.
    pub coefficients: Vec<T>,
    /// `||A x - b||_2` at the returned coefficients.
    pub residual: T,
}

/// Lawson–Hanson active-set solver for `min ||A x - b||_2, x >= 0`.
///
/// `columns[k]` is the k-th column of `A`; every column must have the length
/// of `target`.
pub fn nnls<T: Real>(columns: &[Vec<T>], target: &[T]) -> NnlsSolution<T> {
    let m = columns.len();
    let n = target.len();
    debug_assert!(columns.iter().all(|c| c.len() == n));

    let apply = |x: &[T]| -> Vec<T> {
        let mut out = vec![T::zero(); n];
        for (c, &xk) in columns.iter().zip(x) {
            if xk != T::zero() {
                super::axpy(xk, c, &mut out);
            }
        }
        out
    };
    let scale = columns
        .iter()
        .map(|c| norm2(c))
        .fold(T::zero(), T::max)
        .max(norm2(target))
        .max(T::one());
    let tol = T::of(1e3) * T::epsilon() * scale * scale * T::of_usize(n.max(1));

    let mut x = vec![T::zero(); m];
    let mut passive = vec![false; m];
    let max_outer = 3 * m + 10;

    for _ in 0..max_outer {
        let r = super::sub(target, &apply(&x));
        let (best, wmax) = (0..m)
            .filter(|&k| !passive[k])
            .map(|k| (k, dot(&columns[k], &r)))
            .fold((usize::MAX, T::zero()), |acc, c| if c.1 > acc.1 { c } else { acc });
        if best == usize::MAX || wmax <= tol {
            break;
        }
        passive[best] = true;

        // inner loop keeps the passive solution feasible
        loop {
            let idx: Vec<usize> = (0..m).filter(|&k| passive[k]).collect();
            let Some(s) = passive_least_squares(columns, target, &idx) else {
                passive[best] = false;
                break;
            };
            if s.iter().all(|&v| v > T::zero()) {
                for k in x.iter_mut() {
                    *k = T::zero();
                }
                for (&k, &v) in idx.iter().zip(&s) {
                    x[k] = v;
                }
                break;
            }
            let mut alpha = T::one();
            for (&k, &sk) in idx.iter().zip(&s) {
                if sk <= T::zero() {
                    let denom = x[k] - sk;
                    if denom > T::zero() {
                        alpha = alpha.min(x[k] / denom);
                    }
                }
            }
            for (&k, &sk) in idx.iter().zip(&s) {
                let xk = x[k];
                x[k] = xk + alpha * (sk - xk);
            }
            let mut dropped = false;
            for &k in &idx {
                if x[k] <= T::epsilon() * scale {
                    x[k] = T::zero();
                    passive[k] = false;
                    dropped = true;
                }
            }
            if !dropped {
                break;
            }
        }
    }

    let residual = norm2(&super::sub(target, &apply(&x)));
    NnlsSolution {
        coefficients: x,
        residual,
    }
}

fn passive_least_squares<T: Real>(columns: &[Vec<T>], target: &[T], idx: &[usize]) -> Option<Vec<T>> {
    let p = idx.len();
    let mut gram = DenseMatrix::zeros(p, p);
    let mut rhs = vec![T::zero(); p];
    for (a, &i) in idx.iter().enumerate() {
        rhs[a] = dot(&columns[i], target);
        for (b, &j) in idx.iter().enumerate() {
            gram[(a, b)] = dot(&columns[i], &columns[j]);
        }
    }
    gram.solve_lu(&rhs).ok()
}
