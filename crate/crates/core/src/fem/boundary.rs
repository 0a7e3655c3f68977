use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::FemError;
use crate::scalar::Real;

/// A piece of the natural boundary carrying a prescribed flux `h`, with the
/// convention `-(kappa grad u) . n = h`.
///
/// In 1D a segment is a single end node; in 2D it is an element edge given
/// by its two end nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct NeumannSegment<T> {
    pub nodes: Vec<usize>,
    pub flux: T,
}

/// Prescribed values `u_g` on the Dirichlet nodes plus natural flux segments.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BoundarySpec<T> {
    dirichlet: BTreeMap<usize, T>,
    neumann: Vec<NeumannSegment<T>>,
}

impl<T: Real> BoundarySpec<T> {
    pub fn new() -> Self {
        Self {
            dirichlet: BTreeMap::new(),
            neumann: Vec::new(),
        }
    }

    /// Builds a Dirichlet-only spec; repeated nodes are an error.
    pub fn from_dirichlet<I>(pairs: I) -> Result<Self, FemError>
    where
        I: IntoIterator<Item = (usize, T)>,
    {
        let mut spec = Self::new();
        for (node, value) in pairs {
            spec.add_dirichlet(node, value)?;
        }
        Ok(spec)
    }

    /// Homogeneous Dirichlet condition at both ends of a 1D mesh with `nodes` nodes.
    pub fn fixed_ends(nodes: usize) -> Self {
        let mut spec = Self::new();
        spec.dirichlet.insert(0, T::zero());
        spec.dirichlet.insert(nodes - 1, T::zero());
        spec
    }

    pub fn add_dirichlet(&mut self, node: usize, value: T) -> Result<(), FemError> {
        if !value.is_finite() {
            return Err(FemError::NonFiniteDirichlet(node));
        }
        if self.dirichlet.insert(node, value).is_some() {
            return Err(FemError::DuplicateDirichlet(node));
        }
        Ok(())
    }

    /// Sets the value, replacing an earlier one.
    pub fn set_dirichlet(&mut self, node: usize, value: T) {
        self.dirichlet.insert(node, value);
    }

    pub fn add_neumann(&mut self, nodes: Vec<usize>, flux: T) {
        self.neumann.push(NeumannSegment { nodes, flux });
    }

    pub fn dirichlet(&self) -> &BTreeMap<usize, T> {
        &self.dirichlet
    }

    pub fn neumann(&self) -> &[NeumannSegment<T>] {
        &self.neumann
    }

    #[inline]
    pub fn is_dirichlet(&self, node: usize) -> bool {
        self.dirichlet.contains_key(&node)
    }

    pub fn dirichlet_value(&self, node: usize) -> Option<T> {
        self.dirichlet.get(&node).copied()
    }

    /// Diagonal of the boundary selector: `true` on Dirichlet nodes.
    pub fn dirichlet_mask(&self, nodes: usize) -> Vec<bool> {
        let mut mask = vec![false; nodes];
        for &k in self.dirichlet.keys() {
            if k < nodes {
                mask[k] = true;
            }
        }
        mask
    }

    /// Nodes not constrained by a Dirichlet condition, ascending.
    pub fn free_nodes(&self, nodes: usize) -> Vec<usize> {
        (0..nodes).filter(|k| !self.is_dirichlet(*k)).collect()
    }

    /// Vector with the prescribed values on Dirichlet nodes and zero elsewhere.
    pub fn initial_guess(&self, nodes: usize) -> Vec<T> {
        let mut u = vec![T::zero(); nodes];
        for (&k, &v) in &self.dirichlet {
            u[k] = v;
        }
        u
    }

    pub fn validate(&self, nodes: usize) -> Result<(), FemError> {
        for (&k, &v) in &self.dirichlet {
            if k >= nodes {
                return Err(FemError::BoundaryIndex { node: k, nodes });
            }
            if !v.is_finite() {
                return Err(FemError::NonFiniteDirichlet(k));
            }
        }
        for (idx, seg) in self.neumann.iter().enumerate() {
            if let Some(&bad) = seg.nodes.iter().find(|&&k| k >= nodes) {
                return Err(FemError::BoundaryIndex { node: bad, nodes });
            }
            if !seg.flux.is_finite() {
                return Err(FemError::InvalidParameter(format!(
                    "Neumann flux of segment {idx} is not finite"
                )));
            }
            if seg.nodes.iter().all(|&k| self.is_dirichlet(k)) {
                return Err(FemError::NeumannOnDirichlet(idx));
            }
        }
        Ok(())
    }

    pub(crate) fn check_segment_shape(&self, expected: usize) -> Result<(), FemError> {
        for (index, seg) in self.neumann.iter().enumerate() {
            if seg.nodes.len() != expected {
                return Err(FemError::NeumannShape {
                    index,
                    expected,
                    found: seg.nodes.len(),
                });
            }
        }
        Ok(())
    }
}
