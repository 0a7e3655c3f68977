use serde::{Deserialize, Serialize};

use super::{BoundarySpec, FemError, LinearSystem, Mesh1D};
use crate::linalg::CsrMatrix;
use crate::scalar::Real;

/// Initial/boundary data for the five 1D wave benchmarks.
///
/// Cases 1-3 fix both ends. Cases 4 and 5 fix `x = 0` and leave `x = L`
/// free (zero slope), which makes `sin(pi x / 2L)` an exact mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WaveCase {
    Case1,
    Case2,
    Case3,
    Case4,
    Case5,
}

impl WaveCase {
    pub const ALL: [WaveCase; 5] = [
        Self::Case1,
        Self::Case2,
        Self::Case3,
        Self::Case4,
        Self::Case5,
    ];

    pub fn from_number(case: u32) -> Option<Self> {
        Self::ALL.get((case as usize).checked_sub(1)?).copied()
    }

    pub fn number(self) -> u32 {
        Self::ALL.iter().position(|&c| c == self).unwrap() as u32 + 1
    }

    /// Multiplier `k` of the initial shape `sin(k pi x / L)`.
    pub fn wavenumber(self) -> f64 {
        match self {
            Self::Case1 => 1.0,
            Self::Case2 => 2.0,
            Self::Case3 => 25.0,
            Self::Case4 => 0.5,
            Self::Case5 => 25.0,
        }
    }

    pub fn right_end_fixed(self) -> bool {
        matches!(self, Self::Case1 | Self::Case2 | Self::Case3)
    }
}

/// Semi-discrete `M u'' + c^2 K u = 0` on a uniform mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveProblem<T> {
    pub mesh: Mesh1D<T>,
    pub case: WaveCase,
    pub speed: T,
    stiffness: CsrMatrix<T>,
    mass: Vec<T>,
    fixed: Vec<usize>,
}

impl<T: Real> WaveProblem<T> {
    pub fn new(mesh: Mesh1D<T>, case: WaveCase, speed: T) -> Result<Self, FemError> {
        if !(speed > T::zero()) || !speed.is_finite() {
            return Err(FemError::InvalidParameter("wave speed must be positive".into()));
        }
        let n = mesh.node_count();
        let h = mesh.spacing();
        let k = T::one() / h;
        let mut trip = Vec::with_capacity(4 * mesh.element_count());
        let mut mass = vec![T::zero(); n];
        let half = h / T::of(2.0);
        for e in 0..mesh.element_count() {
            let (i, j) = (e, e + 1);
            trip.extend([(i, i, k), (i, j, -k), (j, i, -k), (j, j, k)]);
            mass[i] += half;
            mass[j] += half;
        }
        let stiffness = CsrMatrix::from_triplets(n, n, &trip)?;
        let mut fixed = vec![0];
        if case.right_end_fixed() {
            fixed.push(n - 1);
        }
        Ok(Self {
            mesh,
            case,
            speed,
            stiffness,
            mass,
            fixed,
        })
    }

    /// Laplacian stiffness (without the `c^2` factor).
    pub fn stiffness(&self) -> &CsrMatrix<T> {
        &self.stiffness
    }

    /// Row-sum lumped mass.
    pub fn mass(&self) -> &[T] {
        &self.mass
    }

    pub fn fixed_nodes(&self) -> &[usize] {
        &self.fixed
    }

    pub fn initial_displacement(&self) -> Vec<T> {
        let l = self.mesh.length();
        let k = T::of(self.case.wavenumber());
        let mut u: Vec<T> = self
            .mesh
            .coordinates()
            .into_iter()
            .map(|x| (k * T::PI() * x / l).sin())
            .collect();
        for &g in &self.fixed {
            u[g] = T::zero();
        }
        u
    }

    /// Rest state at `t = 0` with the consistent initial acceleration.
    pub fn initial_state(&self, dt: T) -> Result<NewmarkState<T>, FemError> {
        NewmarkState::initial(
            self.initial_displacement(),
            vec![T::zero(); self.mesh.node_count()],
            self.mass.clone(),
            &self.stiffness,
            self.speed,
            dt,
            self.fixed.clone(),
        )
    }

    /// `1/2 v^T M v + 1/2 c^2 u^T K u`
    pub fn energy(&self, state: &NewmarkState<T>) -> T {
        let ku = self.stiffness.matvec(&state.u);
        let mut e = T::zero();
        for i in 0..state.u.len() {
            e += self.mass[i] * state.v[i] * state.v[i] + self.speed * self.speed * state.u[i] * ku[i];
        }
        T::of(0.5) * e
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NewmarkError {
    #[error("invalid Newmark state: {0}")]
    InvalidState(String),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error("inner solve failed: {0}")]
    Solve(String),
}

/// Displacement, velocity and acceleration at time `time`, plus the fixed
/// integration data. Nodes in `fixed` have zero acceleration throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct NewmarkState<T> {
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub a: Vec<T>,
    pub dt: T,
    pub beta: T,
    pub gamma: T,
    pub mass: Vec<T>,
    pub speed: T,
    pub fixed: Vec<usize>,
    pub time: T,
}

impl<T: Real> NewmarkState<T> {
    /// Average-acceleration state with `a0` from `M a0 = -c^2 K u0` on the free nodes.
    pub fn initial(
        u: Vec<T>,
        v: Vec<T>,
        mass: Vec<T>,
        stiffness: &CsrMatrix<T>,
        speed: T,
        dt: T,
        fixed: Vec<usize>,
    ) -> Result<Self, FemError> {
        let ku = stiffness.matvec(&u);
        let mut a: Vec<T> = ku
            .iter()
            .zip(&mass)
            .map(|(&k, &m)| -speed * speed * k / m)
            .collect();
        for &g in &fixed {
            if g < a.len() {
                a[g] = T::zero();
            }
        }
        let state = Self {
            u,
            v,
            a,
            dt,
            beta: T::of(0.25),
            gamma: T::of(0.5),
            mass,
            speed,
            fixed,
            time: T::zero(),
        };
        state.validate().map_err(|e| match e {
            NewmarkError::Fem(f) => f,
            other => FemError::InvalidParameter(other.to_string()),
        })?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<(), NewmarkError> {
        let n = self.u.len();
        if self.v.len() != n || self.a.len() != n || self.mass.len() != n {
            return Err(NewmarkError::InvalidState("vector lengths differ".into()));
        }
        if self.mass.iter().any(|m| !(*m > T::zero())) {
            return Err(NewmarkError::InvalidState("mass must be strictly positive".into()));
        }
        let unit = |p: T| p > T::zero() && p <= T::one();
        if !unit(self.beta) || !unit(self.gamma) {
            return Err(NewmarkError::InvalidState("beta and gamma must lie in (0, 1]".into()));
        }
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(NewmarkError::InvalidState("time step must be positive".into()));
        }
        if let Some(&g) = self.fixed.iter().find(|&&g| g >= n) {
            return Err(FemError::BoundaryIndex { node: g, nodes: n }.into());
        }
        Ok(())
    }

    /// Predicted displacement `u + dt v + dt^2 (1/2 - beta) a`.
    pub fn predictor(&self) -> (Vec<T>, Vec<T>) {
        let dt = self.dt;
        let cu = dt * dt * (T::of(0.5) - self.beta);
        let cv = dt * (T::one() - self.gamma);
        let up = (0..self.u.len())
            .map(|i| self.u[i] + dt * self.v[i] + cu * self.a[i])
            .collect();
        let vp = (0..self.v.len()).map(|i| self.v[i] + cv * self.a[i]).collect();
        (up, vp)
    }

    /// `(M + beta dt^2 c^2 K) a_next = -c^2 K u_pred`, with `a = 0` on fixed nodes.
    pub fn effective_system(&self, stiffness: &CsrMatrix<T>) -> Result<LinearSystem<T>, NewmarkError> {
        self.validate()?;
        let n = self.u.len();
        if stiffness.nrows() != n || stiffness.ncols() != n {
            return Err(FemError::Dimension {
                expected: n,
                found: stiffness.nrows(),
            }
            .into());
        }
        let c2 = self.speed * self.speed;
        let m = CsrMatrix::from_triplets(
            n,
            n,
            &self.mass.iter().enumerate().map(|(i, &v)| (i, i, v)).collect::<Vec<_>>(),
        )
        .map_err(FemError::from)?;
        let a = m
            .linear_combination(T::one(), stiffness, self.beta * self.dt * self.dt * c2)
            .map_err(FemError::from)?;
        let (up, _) = self.predictor();
        let b: Vec<T> = stiffness.matvec(&up).into_iter().map(|k| -c2 * k).collect();
        let bc = BoundarySpec::from_dirichlet(self.fixed.iter().map(|&g| (g, T::zero())))?;
        Ok(LinearSystem::new(a, b, bc, true)?)
    }
}

/// One average-acceleration step. `solve` returns the new acceleration for the
/// effective system; any solver (direct or sampler-driven) fits.
pub fn newmark_step<T, F, E>(
    state: &NewmarkState<T>,
    stiffness: &CsrMatrix<T>,
    mut solve: F,
) -> Result<NewmarkState<T>, NewmarkError>
where
    T: Real,
    F: FnMut(&LinearSystem<T>) -> Result<Vec<T>, E>,
    E: std::fmt::Display,
{
    let sys = state.effective_system(stiffness)?;
    let a_next = solve(&sys).map_err(|e| NewmarkError::Solve(e.to_string()))?;
    if a_next.len() != state.u.len() {
        return Err(FemError::Dimension {
            expected: state.u.len(),
            found: a_next.len(),
        }
        .into());
    }
    let (up, vp) = state.predictor();
    let bdt2 = state.beta * state.dt * state.dt;
    let gdt = state.gamma * state.dt;
    let mut next = state.clone();
    for i in 0..a_next.len() {
        next.u[i] = up[i] + bdt2 * a_next[i];
        next.v[i] = vp[i] + gdt * a_next[i];
    }
    next.a = a_next;
    next.time = state.time + state.dt;
    Ok(next)
}
