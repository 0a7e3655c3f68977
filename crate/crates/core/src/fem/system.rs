use super::{BoundarySpec, FemError};
use crate::linalg::{dot, norm2, CsrMatrix, DenseMatrix};
use crate::scalar::Real;

/// Assembled system `A u = b` subject to `u = u_g` on the Dirichlet nodes.
///
/// Dirichlet values are lifted into `b`: constrained rows keep only their
/// diagonal `d` with `b_g = d * u_g`, and the constrained columns of free rows
/// are moved to the right-hand side. The original values stay in
/// [`BoundarySpec`] so the search can collapse those dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem<T> {
    a: CsrMatrix<T>,
    b: Vec<T>,
    boundary: BoundarySpec<T>,
    spd: bool,
}

impl<T: Real> LinearSystem<T> {
    /// Builds a system, applying the Dirichlet lift. Lifting an already lifted
    /// system is a no-op.
    pub fn new(
        a: CsrMatrix<T>,
        b: Vec<T>,
        boundary: BoundarySpec<T>,
        spd: bool,
    ) -> Result<Self, FemError> {
        let n = a.nrows();
        if a.ncols() != n {
            return Err(FemError::Dimension {
                expected: n,
                found: a.ncols(),
            });
        }
        if b.len() != n {
            return Err(FemError::Dimension {
                expected: n,
                found: b.len(),
            });
        }
        if let Some(k) = b.iter().position(|v| !v.is_finite()) {
            return Err(FemError::NonFiniteForcing(k));
        }
        boundary.validate(n)?;
        let (a, b) = lift(&a, &b, &boundary)?;
        Ok(Self {
            a,
            b,
            boundary,
            spd,
        })
    }

    /// Like [`LinearSystem::new`] but decides the SPD flag by inspection
    /// (symmetry to 1e-12 relative and a successful Cholesky of the free block).
    pub fn detect(a: CsrMatrix<T>, b: Vec<T>, boundary: BoundarySpec<T>) -> Result<Self, FemError> {
        let mut sys = Self::new(a, b, boundary, false)?;
        sys.spd = sys.check_spd();
        Ok(sys)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.b.len()
    }

    pub fn matrix(&self) -> &CsrMatrix<T> {
        &self.a
    }

    pub fn rhs(&self) -> &[T] {
        &self.b
    }

    pub fn boundary(&self) -> &BoundarySpec<T> {
        &self.boundary
    }

    pub fn is_spd(&self) -> bool {
        self.spd
    }

    pub fn free_dofs(&self) -> Vec<usize> {
        self.boundary.free_nodes(self.n())
    }

    /// Zeros with the Dirichlet values in place.
    pub fn initial_guess(&self) -> Vec<T> {
        self.boundary.initial_guess(self.n())
    }

    fn check_dim(&self, u: &[T]) -> Result<(), FemError> {
        if u.len() != self.n() {
            return Err(FemError::Dimension {
                expected: self.n(),
                found: u.len(),
            });
        }
        Ok(())
    }

    /// `Psi(u) = A u - b`
    pub fn residual(&self, u: &[T]) -> Result<Vec<T>, FemError> {
        self.check_dim(u)?;
        Ok(self.a.residual(u, &self.b))
    }

    /// `1/2 u^T A u - u^T b`
    pub fn energy(&self, u: &[T]) -> Result<T, FemError> {
        self.check_dim(u)?;
        let au = self.a.matvec(u);
        Ok(T::of(0.5) * dot(u, &au) - dot(u, &self.b))
    }

    /// `||A u - b||_2^2`
    pub fn squared_residual(&self, u: &[T]) -> Result<T, FemError> {
        let r = self.residual(u)?;
        Ok(dot(&r, &r))
    }

    /// Dense copy of `A` restricted to the free dofs.
    pub fn free_block(&self) -> DenseMatrix<T> {
        let free = self.free_dofs();
        let mut pos = vec![usize::MAX; self.n()];
        for (k, &g) in free.iter().enumerate() {
            pos[g] = k;
        }
        let mut m = DenseMatrix::zeros(free.len(), free.len());
        for (k, &g) in free.iter().enumerate() {
            for (j, v) in self.a.row(g) {
                if pos[j] != usize::MAX {
                    m[(k, pos[j])] = v;
                }
            }
        }
        m
    }

    pub fn check_spd(&self) -> bool {
        self.a.is_symmetric(T::of(1e-12)) && self.free_block().cholesky().is_ok()
    }

    /// Dense direct solve on the free block; Dirichlet entries are copied from
    /// the boundary spec so they hold bit-exactly.
    pub fn direct_solve(&self) -> Result<Vec<T>, FemError> {
        let free = self.free_dofs();
        let block = self.free_block();
        let rhs: Vec<T> = free.iter().map(|&g| self.b[g]).collect();
        let xf = if self.spd {
            block.cholesky()?.solve(&rhs)
        } else {
            block.solve_lu(&rhs)?
        };
        let mut u = self.initial_guess();
        for (&g, v) in free.iter().zip(xf) {
            u[g] = v;
        }
        Ok(u)
    }
}

/// `||A u - b||_2`
pub fn residual_norm<T: Real>(sys: &LinearSystem<T>, u: &[T]) -> Result<T, FemError> {
    Ok(norm2(&sys.residual(u)?))
}

fn lift<T: Real>(
    a: &CsrMatrix<T>,
    b: &[T],
    boundary: &BoundarySpec<T>,
) -> Result<(CsrMatrix<T>, Vec<T>), FemError> {
    let n = a.nrows();
    let mut rhs = b.to_vec();
    let mut trip = Vec::with_capacity(a.nnz());
    for i in 0..n {
        let row_fixed = boundary.is_dirichlet(i);
        for (j, v) in a.row(i) {
            match (row_fixed, boundary.dirichlet_value(j)) {
                (true, _) => {}
                (false, Some(g)) => rhs[i] -= v * g,
                (false, None) => trip.push((i, j, v)),
            }
        }
    }
    for (&g, &value) in boundary.dirichlet() {
        let mut d = a.get(g, g);
        if d == T::zero() {
            d = T::one();
        }
        trip.push((g, g, d));
        rhs[g] = d * value;
    }
    Ok((CsrMatrix::from_triplets(n, n, &trip)?, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two() -> LinearSystem<f64> {
        let a = CsrMatrix::from_triplets(
            2,
            2,
            &[(0, 0, 2.0), (0, 1, -1.0), (1, 0, -1.0), (1, 1, 2.0)],
        )
        .unwrap();
        LinearSystem::new(a, vec![1.0, 1.0], BoundarySpec::new(), true).unwrap()
    }

    #[test]
    fn residual_norm_examples() {
        let sys = two_by_two();
        assert!((residual_norm(&sys, &[0.0, 0.0]).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let id = LinearSystem::new(CsrMatrix::identity(3), vec![0.0; 3], BoundarySpec::new(), true)
            .unwrap();
        assert_eq!(residual_norm(&id, &[1.0, 0.0, 0.0]).unwrap(), 1.0);
        let u = sys.direct_solve().unwrap();
        assert!(residual_norm(&sys, &u).unwrap() <= 1e-10 * 2f64.sqrt());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let sys = two_by_two();
        assert_eq!(
            residual_norm(&sys, &[0.0]),
            Err(FemError::Dimension {
                expected: 2,
                found: 1
            })
        );
    }

    #[test]
    fn lift_is_idempotent_and_consistent() {
        let a = CsrMatrix::from_triplets(
            3,
            3,
            &[
                (0, 0, 2.0),
                (0, 1, -1.0),
                (1, 0, -1.0),
                (1, 1, 2.0),
                (1, 2, -1.0),
                (2, 1, -1.0),
                (2, 2, 2.0),
            ],
        )
        .unwrap();
        let bc = BoundarySpec::from_dirichlet([(0, 1.0), (2, 3.0)]).unwrap();
        let sys = LinearSystem::new(a, vec![0.0; 3], bc.clone(), true).unwrap();
        let again =
            LinearSystem::new(sys.matrix().clone(), sys.rhs().to_vec(), bc, true).unwrap();
        assert_eq!(sys, again);
        let u: Vec<f64> = sys.direct_solve().unwrap();
        assert_eq!(u[0], 1.0);
        assert_eq!(u[2], 3.0);
        assert!((u[1] - 2.0).abs() < 1e-14);
        // folded rhs agrees with the boundary values
        assert!(residual_norm(&sys, &u).unwrap() < 1e-14);
        assert!(sys.check_spd());
    }

    #[test]
    fn detect_flags_nonsymmetric() {
        let a = CsrMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 1.0), (0, 0, 0.0)]).unwrap();
        let sys = LinearSystem::detect(a, vec![1.0, 2.0], BoundarySpec::new()).unwrap();
        assert!(!sys.is_spd());
        let u = sys.direct_solve().unwrap();
        assert_eq!(u, vec![2.0, 1.0]);
    }
}
