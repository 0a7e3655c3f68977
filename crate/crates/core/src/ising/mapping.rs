use serde::{Deserialize, Serialize};

use super::{IsingError, ModifiedIsing, NestedFrame, SearchFrame};
use crate::fem::LinearSystem;
use crate::linalg::{dot, DenseMatrix};
use crate::scalar::Real;

/// Objective minimized by the search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// `F(u) = 1/2 u^T A u - u^T b`, for SPD systems.
    #[serde(alias = "f")]
    Energy,
    /// `G(u) = ||A u - b||_2^2`, for any system.
    #[serde(alias = "g")]
    LeastSquares,
}

impl Functional {
    /// `Energy` for SPD systems, `LeastSquares` otherwise.
    pub fn for_system<T: Real>(sys: &LinearSystem<T>) -> Self {
        if sys.is_spd() {
            Self::Energy
        } else {
            Self::LeastSquares
        }
    }
}

pub fn functional_value<T: Real>(
    sys: &LinearSystem<T>,
    u: &[T],
    functional: Functional,
) -> Result<T, IsingError> {
    Ok(match functional {
        Functional::Energy => sys.energy(u)?,
        Functional::LeastSquares => sys.squared_residual(u)?,
    })
}

fn check_frame<T: Real>(sys: &LinearSystem<T>, frame: &SearchFrame<T>) -> Result<(), IsingError> {
    if frame.dofs() != sys.n() {
        return Err(IsingError::Dimension {
            expected: sys.n(),
            found: frame.dofs(),
        });
    }
    Ok(())
}

fn local_positions(n: usize, active: &[usize]) -> Vec<Option<usize>> {
    let mut pos = vec![None; n];
    for (p, &g) in active.iter().enumerate() {
        pos[g] = Some(p);
    }
    pos
}

/// `A` restricted to the active dofs.
fn active_block<T: Real>(sys: &LinearSystem<T>, active: &[usize]) -> DenseMatrix<T> {
    let pos = local_positions(sys.n(), active);
    let mut m = DenseMatrix::zeros(active.len(), active.len());
    for (p, &g) in active.iter().enumerate() {
        for (col, v) in sys.matrix().row(g) {
            if let Some(q) = pos[col] {
                m[(p, q)] += v;
            }
        }
    }
    m
}

/// `(A^T A)` restricted to the active columns, accumulated row by row.
fn active_gram<T: Real>(sys: &LinearSystem<T>, active: &[usize]) -> DenseMatrix<T> {
    let pos = local_positions(sys.n(), active);
    let mut m = DenseMatrix::zeros(active.len(), active.len());
    let mut entries = Vec::new();
    for i in 0..sys.n() {
        entries.clear();
        entries.extend(
            sys.matrix()
                .row(i)
                .filter_map(|(col, v)| pos[col].map(|p| (p, v))),
        );
        for &(p, vp) in &entries {
            for &(q, vq) in &entries {
                m[(p, q)] += vp * vq;
            }
        }
    }
    m
}

fn pick<T: Real>(v: &[T], active: &[usize]) -> Vec<T> {
    active.iter().map(|&g| v[g]).collect()
}

/// Hamiltonian of `F(u + delta + D q)`.
///
/// `J = 1/2 a^2 A_off`, `h = a (A w - b)`, `S = 1/2 a^2 diag(A)`, `c = F(w)`
/// on the active dofs, with `w = u + delta`.
pub fn map_spd<T: Real>(
    sys: &LinearSystem<T>,
    frame: &SearchFrame<T>,
) -> Result<ModifiedIsing<T>, IsingError> {
    if !sys.is_spd() {
        return Err(IsingError::NotSpd);
    }
    check_frame(sys, frame)?;
    let w = frame.center();
    let r = sys.residual(&w)?;
    let c = T::of(0.5) * dot(&w, &sys.matrix().matvec(&w)) - dot(&w, sys.rhs());
    let a = frame.alpha();
    let half_a2 = T::of(0.5) * a * a;
    let block = active_block(sys, frame.active());
    let n = frame.n();
    let mut j = DenseMatrix::zeros(n, n);
    let mut s = vec![T::zero(); n];
    for p in 0..n {
        for q in 0..n {
            if p == q {
                s[p] = half_a2 * block[(p, p)];
            } else {
                j[(p, q)] = half_a2 * block[(p, q)];
            }
        }
    }
    let h = pick(&r, frame.active()).into_iter().map(|v| a * v).collect();
    Ok(ModifiedIsing { j, h, s, c })
}

/// Hamiltonian of `||A (u + delta + D q) - b||^2`.
///
/// `J = a^2 (A^T A)_off`, `h = 2 a A^T r`, `S = a^2 diag(A^T A)`, `c = ||r||^2`.
pub fn map_lsq<T: Real>(
    sys: &LinearSystem<T>,
    frame: &SearchFrame<T>,
) -> Result<ModifiedIsing<T>, IsingError> {
    check_frame(sys, frame)?;
    let w = frame.center();
    let r = sys.residual(&w)?;
    let g = sys.matrix().matvec_transpose(&r);
    let a = frame.alpha();
    let a2 = a * a;
    let gram = active_gram(sys, frame.active());
    let n = frame.n();
    let mut j = DenseMatrix::zeros(n, n);
    let mut s = vec![T::zero(); n];
    for p in 0..n {
        for q in 0..n {
            if p == q {
                s[p] = a2 * gram[(p, p)];
            } else {
                j[(p, q)] = a2 * gram[(p, q)];
            }
        }
    }
    let two_a = T::of(2.0) * a;
    let h = pick(&g, frame.active()).into_iter().map(|v| two_a * v).collect();
    Ok(ModifiedIsing {
        j,
        h,
        s,
        c: dot(&r, &r),
    })
}

/// Hamiltonian over the stacked spins `(q1, q2)` of a two-level nested
/// iteration, equal to the functional at `u + a1 q1 + a2 q2` for every state.
///
/// The cross-level coupling sits in the lower-left block of `J`.
pub fn nested_compose<T: Real>(
    sys: &LinearSystem<T>,
    frame: &NestedFrame<T>,
    functional: Functional,
) -> Result<ModifiedIsing<T>, IsingError> {
    let base = frame.first();
    check_frame(sys, base)?;
    let (a1, a2) = frame.scales();
    let m = base.n();
    let r = sys.residual(base.u())?;
    let (quad, lin, c, quad_factor, lin_factor) = match functional {
        Functional::Energy => {
            if !sys.is_spd() {
                return Err(IsingError::NotSpd);
            }
            let c = sys.energy(base.u())?;
            (
                active_block(sys, base.active()),
                pick(&r, base.active()),
                c,
                T::of(0.5),
                T::one(),
            )
        }
        Functional::LeastSquares => {
            let g = sys.matrix().matvec_transpose(&r);
            (
                active_gram(sys, base.active()),
                pick(&g, base.active()),
                dot(&r, &r),
                T::one(),
                T::of(2.0),
            )
        }
    };
    // both orderings of each cross pair land in the single lower block
    let cross = T::of(2.0) * quad_factor * a1 * a2;
    let mut j = DenseMatrix::zeros(2 * m, 2 * m);
    let mut s = vec![T::zero(); 2 * m];
    let mut h = vec![T::zero(); 2 * m];
    for p in 0..m {
        h[p] = lin_factor * a1 * lin[p];
        h[m + p] = lin_factor * a2 * lin[p];
        s[p] = quad_factor * a1 * a1 * quad[(p, p)];
        s[m + p] = quad_factor * a2 * a2 * quad[(p, p)];
        for q in 0..m {
            if p != q {
                j[(p, q)] = quad_factor * a1 * a1 * quad[(p, q)];
                j[(m + p, m + q)] = quad_factor * a2 * a2 * quad[(p, q)];
            }
            j[(m + p, q)] = cross * quad[(p, q)];
        }
    }
    Ok(ModifiedIsing { j, h, s, c })
}
