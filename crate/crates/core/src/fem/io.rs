use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{BoundarySpec, FemError, LinearSystem};
use crate::linalg::CsrMatrix;
use crate::scalar::Real;

/// JSON form of a linear system. All indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct SystemFile<T> {
    pub n: usize,
    pub triplets: Vec<(usize, usize, T)>,
    pub b: Vec<T>,
    #[serde(default)]
    pub dirichlet: Vec<(usize, T)>,
    /// Missing means "detect".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spd: Option<bool>,
}

impl<T: Real> SystemFile<T> {
    pub fn from_system(sys: &LinearSystem<T>) -> Self {
        Self {
            n: sys.n(),
            triplets: sys.matrix().triplets(),
            b: sys.rhs().to_vec(),
            dirichlet: sys
                .boundary()
                .dirichlet()
                .iter()
                .map(|(&k, &v)| (k, v))
                .collect(),
            spd: Some(sys.is_spd()),
        }
    }

    pub fn into_system(self) -> Result<LinearSystem<T>, FemError> {
        let a = CsrMatrix::from_triplets(self.n, self.n, &self.triplets)?;
        let bc = BoundarySpec::from_dirichlet(self.dirichlet)?;
        match self.spd {
            Some(flag) => LinearSystem::new(a, self.b, bc, flag),
            None => LinearSystem::detect(a, self.b, bc),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, FemError> {
        serde_json::from_str(text).map_err(|e| FemError::InvalidParameter(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("system serializes")
    }
}

/// Writes `a` in Matrix Market coordinate format (1-based, as the format requires).
pub fn write_matrix_market<T: Real, W: Write>(a: &CsrMatrix<T>, mut out: W) -> std::io::Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(out, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
    for (i, j, v) in a.triplets() {
        writeln!(out, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    Ok(())
}

/// Reads a real or integer coordinate matrix, general or symmetric.
pub fn read_matrix_market<T: Real, R: BufRead>(input: R) -> Result<CsrMatrix<T>, FemError> {
    let bad = |msg: String| FemError::MatrixMarket(msg);
    let mut lines = input.lines();
    let header = lines
        .next()
        .ok_or_else(|| bad("empty input".into()))?
        .map_err(|e| bad(e.to_string()))?;
    let fields: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if fields.len() < 5 || fields[0] != "%%matrixmarket" || fields[1] != "matrix" {
        return Err(bad(format!("bad header: {header}")));
    }
    if fields[2] != "coordinate" {
        return Err(bad(format!("unsupported layout {}", fields[2])));
    }
    if fields[3] != "real" && fields[3] != "integer" {
        return Err(bad(format!("unsupported field {}", fields[3])));
    }
    let symmetric = match fields[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => return Err(bad(format!("unsupported symmetry {other}"))),
    };

    let mut size: Option<(usize, usize, usize)> = None;
    let mut trip = Vec::new();
    for (lineno, line) in lines.enumerate() {
        let line = line.map_err(|e| bad(e.to_string()))?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                let p: Result<Vec<usize>, _> = parts.iter().map(|s| s.parse()).collect();
                match p.as_deref() {
                    Ok([r, c, nnz]) => size = Some((*r, *c, *nnz)),
                    _ => return Err(bad(format!("bad size line: {t}"))),
                }
            }
            Some((r, c, _)) => {
                if parts.len() != 3 {
                    return Err(bad(format!("line {}: expected 3 fields", lineno + 2)));
                }
                let i: usize = parts[0].parse().map_err(|_| bad(format!("bad row index {}", parts[0])))?;
                let j: usize = parts[1].parse().map_err(|_| bad(format!("bad column index {}", parts[1])))?;
                let v: f64 = parts[2].parse().map_err(|_| bad(format!("bad value {}", parts[2])))?;
                if i == 0 || j == 0 || i > r || j > c {
                    return Err(bad(format!("entry ({i}, {j}) out of range")));
                }
                trip.push((i - 1, j - 1, T::of(v)));
                if symmetric && i != j {
                    trip.push((j - 1, i - 1, T::of(v)));
                }
            }
        }
    }
    let (r, c, nnz) = size.ok_or_else(|| bad("missing size line".into()))?;
    let stored = if symmetric {
        trip.iter().filter(|(i, j, _)| i <= j).count()
    } else {
        trip.len()
    };
    if stored != nnz {
        return Err(bad(format!("expected {nnz} entries, found {stored}")));
    }
    Ok(CsrMatrix::from_triplets(r, c, &trip)?)
}
