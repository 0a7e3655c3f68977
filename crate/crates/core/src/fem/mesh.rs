use serde::{Deserialize, Serialize};

use super::FemError;
use crate::scalar::Real;

/// Uniform mesh of `(0, L)` with linear elements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Mesh1D<T> {
    length: T,
    nodes: usize,
}

impl<T: Real> Mesh1D<T> {
    pub fn new(length: T, nodes: usize) -> Result<Self, FemError> {
        if nodes < 2 {
            return Err(FemError::TooFewNodes(nodes));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(FemError::InvalidLength);
        }
        Ok(Self { length, nodes })
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn element_count(&self) -> usize {
        self.nodes - 1
    }

    pub fn spacing(&self) -> T {
        self.length / T::of_usize(self.nodes - 1)
    }

    pub fn coordinate(&self, i: usize) -> T {
        if i + 1 == self.nodes {
            // exact right end regardless of rounding in i*h
            self.length
        } else {
            T::of_usize(i) * self.spacing()
        }
    }

    pub fn coordinates(&self) -> Vec<T> {
        (0..self.nodes).map(|i| self.coordinate(i)).collect()
    }

    pub fn last_node(&self) -> usize {
        self.nodes - 1
    }
}

/// Structured `n x n` grid of bilinear quadrilaterals on `(0, L)^2`.
///
/// Node `(i, j)` (x index `i`, y index `j`) has global index `j * n + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Mesh2D<T> {
    length: T,
    per_side: usize,
}

impl<T: Real> Mesh2D<T> {
    pub fn new(length: T, nodes_per_side: usize) -> Result<Self, FemError> {
        if nodes_per_side < 2 {
            return Err(FemError::TooFewNodes(nodes_per_side));
        }
        if !(length > T::zero()) || !length.is_finite() {
            return Err(FemError::InvalidLength);
        }
        Ok(Self {
            length,
            per_side: nodes_per_side,
        })
    }

    pub fn length(&self) -> T {
        self.length
    }

    pub fn nodes_per_side(&self) -> usize {
        self.per_side
    }

    pub fn node_count(&self) -> usize {
        self.per_side * self.per_side
    }

    pub fn element_count(&self) -> usize {
        (self.per_side - 1) * (self.per_side - 1)
    }

    pub fn spacing(&self) -> T {
        self.length / T::of_usize(self.per_side - 1)
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        j * self.per_side + i
    }

    fn axis(&self, i: usize) -> T {
        if i + 1 == self.per_side {
            self.length
        } else {
            T::of_usize(i) * self.spacing()
        }
    }

    pub fn coordinate(&self, node: usize) -> (T, T) {
        let (i, j) = (node % self.per_side, node / self.per_side);
        (self.axis(i), self.axis(j))
    }

    /// Corner nodes of element `(ei, ej)` in counter-clockwise order.
    pub fn element_nodes(&self, ei: usize, ej: usize) -> [usize; 4] {
        [
            self.node(ei, ej),
            self.node(ei + 1, ej),
            self.node(ei + 1, ej + 1),
            self.node(ei, ej + 1),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_geometry() {
        let m = Mesh1D::new(2.0, 5).unwrap();
        assert_eq!(m.spacing(), 0.5);
        assert_eq!(m.coordinates(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(m.element_count(), 4);
        assert_eq!(Mesh1D::new(1.0, 1), Err(FemError::TooFewNodes(1)));
        assert_eq!(Mesh1D::new(0.0, 3), Err(FemError::InvalidLength));
    }

    #[test]
    fn two_dimensional_counts() {
        let m = Mesh2D::new(1.0, 15).unwrap();
        assert_eq!(m.element_count(), 14 * 14);
        assert_eq!(m.node_count(), 225);
        assert_eq!(m.coordinate(m.node(14, 0)), (1.0, 0.0));
        assert_eq!(m.element_nodes(0, 0), [0, 1, 16, 15]);
    }
}
