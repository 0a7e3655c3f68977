use serde::{Deserialize, Serialize};

use super::{IsingError, Spin};
use crate::fem::LinearSystem;
use crate::scalar::Real;

/// Neighborhood `u + delta + alpha (I - G) q` around the current iterate,
/// where `G` selects the Dirichlet dofs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SearchFrame<T> {
    pub(crate) u: Vec<T>,
    pub(crate) delta: Vec<T>,
    pub(crate) alpha: T,
    pub(crate) mask: Vec<bool>,
    pub(crate) active: Vec<usize>,
}

impl<T: Real> SearchFrame<T> {
    pub fn u(&self) -> &[T] {
        &self.u
    }

    pub fn delta(&self) -> &[T] {
        &self.delta
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    /// `true` on Dirichlet dofs (the diagonal of `G`).
    pub fn dirichlet_mask(&self) -> &[bool] {
        &self.mask
    }

    /// Global index of each spin.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    /// Number of spins.
    pub fn n(&self) -> usize {
        self.active.len()
    }

    /// Number of global dofs.
    pub fn dofs(&self) -> usize {
        self.u.len()
    }

    /// Diagonal of `D = alpha (I - G)`.
    pub fn d_diagonal(&self) -> Vec<T> {
        self.mask
            .iter()
            .map(|&g| if g { T::zero() } else { self.alpha })
            .collect()
    }

    /// `u + delta`, the centre of the spin neighborhood.
    pub fn center(&self) -> Vec<T> {
        self.u.iter().zip(&self.delta).map(|(&a, &b)| a + b).collect()
    }
}

/// Builds the frame for iterate `u`. Entries of `delta` on Dirichlet dofs are
/// ignored (the translation is masked like `D`).
pub fn build_frame<T: Real>(
    sys: &LinearSystem<T>,
    u: &[T],
    alpha: T,
    delta: &[T],
) -> Result<SearchFrame<T>, IsingError> {
    let n = sys.n();
    for len in [u.len(), delta.len()] {
        if len != n {
            return Err(IsingError::Dimension {
                expected: n,
                found: len,
            });
        }
    }
    if !(alpha > T::zero()) || !alpha.is_finite() {
        return Err(IsingError::NonPositiveScale);
    }
    let tol = T::of(1e-12);
    for (&k, &g) in sys.boundary().dirichlet() {
        if (u[k] - g).abs() > tol {
            return Err(IsingError::DirichletViolation {
                node: k,
                expected: g.as_f64(),
                found: u[k].as_f64(),
            });
        }
    }
    let mask = sys.boundary().dirichlet_mask(n);
    let mut uu = u.to_vec();
    let mut dd = delta.to_vec();
    for (k, &g) in mask.iter().enumerate() {
        if g {
            uu[k] = sys.boundary().dirichlet_value(k).unwrap_or(uu[k]);
            dd[k] = T::zero();
        }
    }
    Ok(SearchFrame {
        u: uu,
        delta: dd,
        alpha,
        active: (0..n).filter(|&k| !mask[k]).collect(),
        mask,
    })
}

/// `u + delta + D q`; Dirichlet entries come back bit-identical to `u`.
pub fn decode<T: Real>(frame: &SearchFrame<T>, q: &[Spin]) -> Result<Vec<T>, IsingError> {
    if q.len() != frame.n() {
        return Err(IsingError::Dimension {
            expected: frame.n(),
            found: q.len(),
        });
    }
    let mut out = frame.u.clone();
    for (&k, &s) in frame.active.iter().zip(q) {
        let s = if s > 0 { T::one() } else { -T::one() };
        out[k] = frame.u[k] + frame.delta[k] + frame.alpha * s;
    }
    Ok(out)
}

/// Grid realized by two stacked qubit levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NestedGrid {
    /// Equal level scales; per-dof offsets `{-2a, 0, 0, 2a}` for scales `(a, a)`.
    D3,
    /// Second scale halved; offsets `{-1.5a, -0.5a, 0.5a, 1.5a}` for `(a, a/2)`.
    D4,
}

/// Two search levels sharing the iterate `u` with zero translations.
/// Spins are stacked `(q_first, q_second)`.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedFrame<T> {
    first: SearchFrame<T>,
    second_alpha: T,
    grid: NestedGrid,
}

impl<T: Real> NestedFrame<T> {
    /// Checks the level-scale relation for `grid` to a relative 1e-12.
    pub fn new(first: SearchFrame<T>, second_alpha: T, grid: NestedGrid) -> Result<Self, IsingError> {
        if first.delta.iter().any(|&d| d != T::zero()) {
            return Err(IsingError::NonzeroTranslation);
        }
        if !(second_alpha > T::zero()) || !second_alpha.is_finite() {
            return Err(IsingError::NonPositiveScale);
        }
        let want = match grid {
            NestedGrid::D3 => first.alpha,
            NestedGrid::D4 => first.alpha / T::of(2.0),
        };
        if (second_alpha - want).abs() > T::of(1e-12) * want {
            return Err(IsingError::ScaleRelation {
                first: first.alpha.as_f64(),
                second: second_alpha.as_f64(),
                grid,
            });
        }
        Ok(Self {
            first,
            second_alpha,
            grid,
        })
    }

    /// Frame whose decoded points are `u + alpha * grid`: D3 offsets
    /// `{-alpha, 0, alpha}`, D4 offsets `alpha * {-1.5, -0.5, 0.5, 1.5}`.
    pub fn for_grid(
        sys: &LinearSystem<T>,
        u: &[T],
        alpha: T,
        grid: NestedGrid,
    ) -> Result<Self, IsingError> {
        let (a1, a2) = match grid {
            NestedGrid::D3 => (alpha / T::of(2.0), alpha / T::of(2.0)),
            NestedGrid::D4 => (alpha, alpha / T::of(2.0)),
        };
        let zeros = vec![T::zero(); u.len()];
        Self::new(build_frame(sys, u, a1, &zeros)?, a2, grid)
    }

    pub fn first(&self) -> &SearchFrame<T> {
        &self.first
    }

    pub fn scales(&self) -> (T, T) {
        (self.first.alpha, self.second_alpha)
    }

    pub fn grid(&self) -> NestedGrid {
        self.grid
    }

    /// Number of spins, twice the active dofs.
    pub fn n(&self) -> usize {
        2 * self.first.n()
    }

    pub fn decode(&self, q: &[Spin]) -> Result<Vec<T>, IsingError> {
        let m = self.first.n();
        if q.len() != 2 * m {
            return Err(IsingError::Dimension {
                expected: 2 * m,
                found: q.len(),
            });
        }
        let (a1, a2) = self.scales();
        let sign = |s: Spin| if s > 0 { T::one() } else { -T::one() };
        let mut out = self.first.u.clone();
        for (p, &k) in self.first.active.iter().enumerate() {
            out[k] = self.first.u[k] + a1 * sign(q[p]) + a2 * sign(q[m + p]);
        }
        Ok(out)
    }
}
