//! Positive spanning sets built from qubit grids and their cosine measures.

mod measure;
mod span;

pub use measure::{
    cm_d3_closed_form, cosine_measure, d3_lower_bound, first_d3_bound_violation, inner_max,
    minimizer_witness_d3, CosineMeasureReport, MeasureOptions,
};
pub use span::{is_positive_spanning, Combination, SpanCertificate, SpanMethod};

use serde::{Deserialize, Serialize};

/// Grids of this many vectors or more are not enumerated.
pub const MAX_SET_SIZE: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetKind {
    /// `{+-e_i}`
    Dplus,
    /// `{-1, +1}^N`
    D2,
    /// `{-1, 0, +1}^N`, zero vector included
    D3,
    /// Nested ladder `{-1.5, -0.5, 0.5, 1.5}^N`
    D4,
    /// Literal radix-4 digits minus one, `{-1, 0, 1, 2}^N`
    D4Radix,
    Custom,
}

impl SetKind {
    /// Per-component values of a grid kind, in radix digit order.
    pub fn levels(self) -> Option<&'static [f64]> {
        match self {
            SetKind::D2 => Some(&[-1.0, 1.0]),
            SetKind::D3 => Some(&[-1.0, 0.0, 1.0]),
            SetKind::D4 => Some(&[-1.5, -0.5, 0.5, 1.5]),
            SetKind::D4Radix => Some(&[-1.0, 0.0, 1.0, 2.0]),
            SetKind::Dplus | SetKind::Custom => None,
        }
    }
}

impl std::str::FromStr for SetKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dplus" | "d+" => Ok(SetKind::Dplus),
            "d2" => Ok(SetKind::D2),
            "d3" => Ok(SetKind::D3),
            "d4" => Ok(SetKind::D4),
            "d4radix" | "d4-radix" => Ok(SetKind::D4Radix),
            other => Err(format!("unknown set kind {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpanningError {
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("{kind:?} in dimension {n} reaches the {max}-vector cap")]
    TooLarge { kind: SetKind, n: usize, max: usize },
    #[error("vector {index} has length {found}, expected {expected}")]
    Dimension { index: usize, expected: usize, found: usize },
    #[error("set has no nonzero vectors")]
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanningSet {
    pub dim: usize,
    pub kind: SetKind,
    pub vectors: Vec<Vec<f64>>,
}

impl SpanningSet {
    pub fn custom(dim: usize, vectors: Vec<Vec<f64>>) -> Result<Self, SpanningError> {
        if dim == 0 {
            return Err(SpanningError::ZeroDimension);
        }
        if let Some((index, v)) = vectors.iter().enumerate().find(|(_, v)| v.len() != dim) {
            return Err(SpanningError::Dimension { index, expected: dim, found: v.len() });
        }
        Ok(Self { dim, kind: SetKind::Custom, vectors })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn nonzero(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.vectors.iter().filter(|v| v.iter().any(|&x| x != 0.0))
    }
}

/// Number of vectors of `kind` in dimension `n`, `None` on overflow.
pub fn set_size(kind: SetKind, n: usize) -> Option<usize> {
    match kind {
        SetKind::Dplus => n.checked_mul(2),
        SetKind::Custom => Some(0),
        grid => grid.levels()?.len().checked_pow(u32::try_from(n).ok()?),
    }
}

/// Builds the set of `kind` in dimension `n`. Grid vectors are listed in
/// radix order with component 0 as the most significant digit.
pub fn generate(kind: SetKind, n: usize) -> Result<SpanningSet, SpanningError> {
    if n == 0 {
        return Err(SpanningError::ZeroDimension);
    }
    let vectors = match kind {
        SetKind::Dplus => (0..n)
            .flat_map(|i| {
                [1.0, -1.0].map(|s| {
                    let mut e = vec![0.0; n];
                    e[i] = s;
                    e
                })
            })
            .collect(),
        SetKind::Custom => Vec::new(),
        grid => {
            let levels = grid.levels().expect("grid kind");
            let d = levels.len();
            let size = set_size(kind, n)
                .filter(|&s| s < MAX_SET_SIZE)
                .ok_or(SpanningError::TooLarge { kind, n, max: MAX_SET_SIZE })?;
            (0..size)
                .map(|mut k| {
                    let mut v = vec![0.0; n];
                    for slot in v.iter_mut().rev() {
                        *slot = levels[k % d];
                        k /= d;
                    }
                    v
                })
                .collect()
        }
    };
    Ok(SpanningSet { dim: n, kind, vectors })
}
