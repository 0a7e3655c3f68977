use serde::{Deserialize, Serialize};

use super::{BoundarySpec, FemError, LinearSystem, Mesh1D, Mesh2D};
use crate::linalg::CsrMatrix;
use crate::scalar::Real;

/// Linear-element discretization of `u'' - f = 0` on a uniform 1D mesh.
///
/// `forcing` holds nodal samples of `f`; the load uses the linear interpolant
/// of `f` integrated exactly (consistent load). Neumann segments are single
/// end nodes contributing `-h` to the load.
pub fn assemble_poisson_1d<T: Real>(
    mesh: &Mesh1D<T>,
    forcing: &[T],
    boundary: BoundarySpec<T>,
) -> Result<LinearSystem<T>, FemError> {
    let n = mesh.node_count();
    if forcing.len() != n {
        return Err(FemError::ForcingLength {
            expected: n,
            found: forcing.len(),
        });
    }
    if let Some(k) = forcing.iter().position(|f| !f.is_finite()) {
        return Err(FemError::NonFiniteForcing(k));
    }
    boundary.validate(n)?;
    boundary.check_segment_shape(1)?;

    let h = mesh.spacing();
    let k = T::one() / h;
    let sixth = h / T::of(6.0);
    let two = T::of(2.0);
    let mut trip = Vec::with_capacity(4 * mesh.element_count());
    let mut b = vec![T::zero(); n];
    for e in 0..mesh.element_count() {
        let (i, j) = (e, e + 1);
        trip.push((i, i, k));
        trip.push((i, j, -k));
        trip.push((j, i, -k));
        trip.push((j, j, k));
        // weak form of u'' = f moves the load to the right with a minus sign
        b[i] -= sixth * (two * forcing[i] + forcing[j]);
        b[j] -= sixth * (forcing[i] + two * forcing[j]);
    }
    for seg in boundary.neumann() {
        b[seg.nodes[0]] -= seg.flux;
    }
    let a = CsrMatrix::from_triplets(n, n, &trip)?;
    LinearSystem::new(a, b, boundary, true)
}

/// Nodal samples of the ramp forcing `f(x) = -128 x / L + 64`.
pub fn ramp_forcing<T: Real>(mesh: &Mesh1D<T>) -> Vec<T> {
    let l = mesh.length();
    mesh.coordinates()
        .into_iter()
        .map(|x| T::of(-128.0) * x / l + T::of(64.0))
        .collect()
}

/// Exact solution of `u'' = -128 x / L + 64`, `u(0) = u(L) = 0`.
pub fn ramp_solution<T: Real>(x: T, length: T) -> T {
    let l = length;
    T::of(-64.0) / (T::of(3.0) * l) * x * x * x + T::of(32.0) * x * x - T::of(32.0) / T::of(3.0) * l * x
}

/// Bilinear-quadrilateral discretization of `kappa lap u - f = 0` with constant `f`.
///
/// Neumann segments are element edges `[a, b]` with flux `h`; each end node
/// receives `-h * edge_length / 2`.
pub fn assemble_poisson_2d<T: Real>(
    mesh: &Mesh2D<T>,
    forcing: T,
    boundary: BoundarySpec<T>,
    conductivity: T,
) -> Result<LinearSystem<T>, FemError> {
    let n = mesh.node_count();
    if !forcing.is_finite() {
        return Err(FemError::NonFiniteForcing(0));
    }
    if !(conductivity > T::zero()) || !conductivity.is_finite() {
        return Err(FemError::InvalidParameter(
            "conductivity must be positive".into(),
        ));
    }
    boundary.validate(n)?;
    boundary.check_segment_shape(2)?;

    // unit-square bilinear element stiffness, independent of the element size in 2D
    let stencil = [
        [4.0, -1.0, -2.0, -1.0],
        [-1.0, 4.0, -1.0, -2.0],
        [-2.0, -1.0, 4.0, -1.0],
        [-1.0, -2.0, -1.0, 4.0],
    ];
    let ke: Vec<Vec<T>> = stencil
        .iter()
        .map(|r| r.iter().map(|&v| conductivity * T::of(v) / T::of(6.0)).collect())
        .collect();
    let h = mesh.spacing();
    let nodal_load = forcing * h * h / T::of(4.0);

    let side = mesh.nodes_per_side();
    let mut trip = Vec::with_capacity(16 * mesh.element_count());
    let mut b = vec![T::zero(); n];
    for ej in 0..side - 1 {
        for ei in 0..side - 1 {
            let nodes = mesh.element_nodes(ei, ej);
            for (a, &p) in nodes.iter().enumerate() {
                b[p] -= nodal_load;
                for (c, &q) in nodes.iter().enumerate() {
                    trip.push((p, q, ke[a][c]));
                }
            }
        }
    }
    let half_edge = h / T::of(2.0);
    for seg in boundary.neumann() {
        for &p in &seg.nodes {
            b[p] -= seg.flux * half_edge;
        }
    }
    let a = CsrMatrix::from_triplets(n, n, &trip)?;
    LinearSystem::new(a, b, boundary, true)
}

/// The two 2D heat-conduction benchmarks on `(0, L)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Poisson2dCase {
    /// `g = 4x^2/L^2 - 4x/L` on `y = 0` and `y = L`, zero flux on the x faces, `f = 0.02`.
    ParabolicEdges,
    /// `g = 1` on `y = L`, `g = 0` on the other three sides, `f = 0`.
    HotLid,
}

impl Poisson2dCase {
    pub fn from_number(case: u32) -> Option<Self> {
        match case {
            1 => Some(Self::ParabolicEdges),
            2 => Some(Self::HotLid),
            _ => None,
        }
    }

    pub fn number(self) -> u32 {
        match self {
            Self::ParabolicEdges => 1,
            Self::HotLid => 2,
        }
    }

    pub fn forcing<T: Real>(self) -> T {
        match self {
            Self::ParabolicEdges => T::of(0.02),
            Self::HotLid => T::zero(),
        }
    }

    pub fn boundary<T: Real>(self, mesh: &Mesh2D<T>) -> BoundarySpec<T> {
        let side = mesh.nodes_per_side();
        let l = mesh.length();
        let mut bc = BoundarySpec::new();
        match self {
            Self::ParabolicEdges => {
                for i in 0..side {
                    let (x, _) = mesh.coordinate(mesh.node(i, 0));
                    let g = T::of(4.0) * x * x / (l * l) - T::of(4.0) * x / l;
                    bc.set_dirichlet(mesh.node(i, 0), g);
                    bc.set_dirichlet(mesh.node(i, side - 1), g);
                }
                for j in 0..side - 1 {
                    for i in [0, side - 1] {
                        let edge = vec![mesh.node(i, j), mesh.node(i, j + 1)];
                        if !edge.iter().all(|&p| bc.is_dirichlet(p)) {
                            bc.add_neumann(edge, T::zero());
                        }
                    }
                }
            }
            Self::HotLid => {
                for k in 0..side {
                    bc.set_dirichlet(mesh.node(k, 0), T::zero());
                    bc.set_dirichlet(mesh.node(0, k), T::zero());
                    bc.set_dirichlet(mesh.node(side - 1, k), T::zero());
                }
                // the lid value wins at the two top corners
                for i in 0..side {
                    bc.set_dirichlet(mesh.node(i, side - 1), T::one());
                }
            }
        }
        bc
    }

    pub fn assemble<T: Real>(self, mesh: &Mesh2D<T>) -> Result<LinearSystem<T>, FemError> {
        assemble_poisson_2d(mesh, self.forcing(), self.boundary(mesh), T::one())
    }
}
