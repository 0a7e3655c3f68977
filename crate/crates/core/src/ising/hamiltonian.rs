use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::IsingError;
use crate::linalg::DenseMatrix;
use crate::scalar::Real;

/// A spin value, `-1` or `+1`.
pub type Spin = i8;

/// `E(q) = q^T J q + q^T h + q^T S q + c`, with `J` hollow and `S` diagonal.
///
/// Because `q_k^2 = 1` the `S` term is the constant `sum(S)`; it is kept so
/// that `E` equals the mapped functional exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct ModifiedIsing<T> {
    pub j: DenseMatrix<T>,
    pub h: Vec<T>,
    pub s: Vec<T>,
    pub c: T,
}

impl<T: Real> ModifiedIsing<T> {
    pub fn new(j: DenseMatrix<T>, h: Vec<T>, s: Vec<T>, c: T) -> Result<Self, IsingError> {
        let n = h.len();
        for len in [j.nrows(), j.ncols(), s.len()] {
            if len != n {
                return Err(IsingError::Dimension {
                    expected: n,
                    found: len,
                });
            }
        }
        let mut j = j;
        for k in 0..n {
            j[(k, k)] = T::zero();
        }
        Ok(Self { j, h, s, c })
    }

    /// The Hamiltonian over zero spins.
    pub fn empty(c: T) -> Self {
        Self {
            j: DenseMatrix::zeros(0, 0),
            h: Vec::new(),
            s: Vec::new(),
            c,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn trace_s(&self) -> T {
        self.s.iter().copied().sum()
    }

    pub fn energy(&self, q: &[Spin]) -> T {
        energy(self, q)
    }
}

/// `q^T J q + q^T h + sum(S) + c`. Panics if `q` has the wrong length.
pub fn energy<T: Real>(m: &ModifiedIsing<T>, q: &[Spin]) -> T {
    assert_eq!(q.len(), m.n(), "spin vector length");
    let mut e = m.trace_s() + m.c;
    for (i, &qi) in q.iter().enumerate() {
        let qi: T = spin(qi);
        let row = m.j.row(i);
        let mut acc = m.h[i];
        for (k, &qk) in q.iter().enumerate() {
            acc += row[k] * spin(qk);
        }
        e += qi * acc;
    }
    e
}

#[inline]
fn spin<T: Real>(q: Spin) -> T {
    if q > 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Standard form `sum_{i<j} J_ij q_i q_j + h^T q + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct StandardIsing<T> {
    j: DenseMatrix<T>,
    h: Vec<T>,
    offset: T,
}

impl<T: Real> StandardIsing<T> {
    /// `j` must be strictly upper triangular.
    pub fn new(j: DenseMatrix<T>, h: Vec<T>, offset: T) -> Result<Self, IsingError> {
        let n = h.len();
        for len in [j.nrows(), j.ncols()] {
            if len != n {
                return Err(IsingError::Dimension {
                    expected: n,
                    found: len,
                });
            }
        }
        for row in 0..n {
            for col in 0..=row {
                if j[(row, col)] != T::zero() {
                    return Err(IsingError::NotUpperTriangular { row, col });
                }
            }
        }
        Ok(Self { j, h, offset })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn couplings(&self) -> &DenseMatrix<T> {
        &self.j
    }

    pub fn biases(&self) -> &[T] {
        &self.h
    }

    pub fn offset(&self) -> T {
        self.offset
    }

    /// Nonzero couplings `(i, j, J_ij)` with `i < j`.
    pub fn edges(&self) -> Vec<(usize, usize, T)> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            for (k, &v) in self.j.row(i).iter().enumerate().skip(i + 1) {
                if v != T::zero() {
                    out.push((i, k, v));
                }
            }
        }
        out
    }

    /// Symmetric adjacency lists built from the nonzero couplings.
    pub fn neighbors(&self) -> Vec<Vec<(usize, T)>> {
        let mut adj = vec![Vec::new(); self.n()];
        for (i, k, v) in self.edges() {
            adj[i].push((k, v));
            adj[k].push((i, v));
        }
        adj
    }

    /// `sum_{i<j} J_ij q_i q_j + h^T q + offset`. Panics on a length mismatch.
    pub fn energy(&self, q: &[Spin]) -> T {
        assert_eq!(q.len(), self.n(), "spin vector length");
        let mut e = self.offset;
        for (i, &qi) in q.iter().enumerate() {
            let qi: T = spin(qi);
            let mut acc = self.h[i];
            for (k, &v) in self.j.row(i).iter().enumerate().skip(i + 1) {
                acc += v * spin::<T>(q[k]);
            }
            e += qi * acc;
        }
        e
    }

    /// Energy without the offset.
    pub fn spin_energy(&self, q: &[Spin]) -> T {
        self.energy(q) - self.offset
    }

    pub fn max_abs_bias(&self) -> T {
        self.h.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    pub fn max_abs_coupling(&self) -> T {
        self.j.max_abs()
    }

    pub fn in_range(&self, h_limit: T, j_limit: T) -> bool {
        self.max_abs_bias() <= h_limit && self.max_abs_coupling() <= j_limit
    }

    /// Divides every term by `factor` so all biases and couplings lie in
    /// `[-1, 1]`; the original energy is `factor * scaled energy`.
    pub fn rescaled(&self) -> (Self, T) {
        let mut factor = self.max_abs_bias().max(self.max_abs_coupling());
        if factor == T::zero() {
            factor = T::one();
        }
        let mut j = self.j.clone();
        for i in 0..self.n() {
            for v in j.row_mut(i) {
                *v /= factor;
            }
        }
        let scaled = Self {
            j,
            h: self.h.iter().map(|&v| v / factor).collect(),
            offset: self.offset / factor,
        };
        (scaled, factor)
    }

    /// `{linear: {"i": h_i}, quadratic: {"i,j": J_ij}, offset}`
    pub fn to_json(&self) -> Value {
        let linear: Map<String, Value> = self
            .h
            .iter()
            .enumerate()
            .map(|(i, v)| (i.to_string(), Value::from(v.as_f64())))
            .collect();
        let quadratic: Map<String, Value> = self
            .edges()
            .into_iter()
            .map(|(i, k, v)| (format!("{i},{k}"), Value::from(v.as_f64())))
            .collect();
        serde_json::json!({
            "linear": linear,
            "quadratic": quadratic,
            "offset": self.offset.as_f64(),
        })
    }

    pub fn from_json(value: &Value) -> Result<Self, IsingError> {
        let bad = |m: &str| IsingError::Json(m.to_string());
        let num = |v: &Value| v.as_f64().ok_or_else(|| bad("expected a number"));
        let linear = value
            .get("linear")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("missing linear"))?;
        let empty = Map::new();
        let quadratic = match value.get("quadratic") {
            Some(q) => q.as_object().ok_or_else(|| bad("quadratic must be an object"))?,
            None => &empty,
        };
        let mut lin = Vec::with_capacity(linear.len());
        for (k, v) in linear {
            let i: usize = k.parse().map_err(|_| bad("bad linear key"))?;
            lin.push((i, num(v)?));
        }
        let mut quad = Vec::with_capacity(quadratic.len());
        for (k, v) in quadratic {
            let (a, b) = k.split_once(',').ok_or_else(|| bad("bad quadratic key"))?;
            let a: usize = a.trim().parse().map_err(|_| bad("bad quadratic key"))?;
            let b: usize = b.trim().parse().map_err(|_| bad("bad quadratic key"))?;
            if a == b {
                return Err(bad("self coupling"));
            }
            quad.push((a.min(b), a.max(b), num(v)?));
        }
        let n = lin
            .iter()
            .map(|p| p.0 + 1)
            .chain(quad.iter().map(|p| p.1 + 1))
            .max()
            .unwrap_or(0);
        let mut h = vec![T::zero(); n];
        for (i, v) in lin {
            h[i] = T::of(v);
        }
        let mut j = DenseMatrix::zeros(n, n);
        for (a, b, v) in quad {
            j[(a, b)] += T::of(v);
        }
        let offset = match value.get("offset") {
            Some(v) => num(v)?,
            None => 0.0,
        };
        Self::new(j, h, T::of(offset))
    }
}

/// Folds `J` into strictly upper form. `offset = trace(S) + c`, so the
/// standard energy equals the modified one for every spin vector.
pub fn to_standard<T: Real>(m: &ModifiedIsing<T>) -> StandardIsing<T> {
    let n = m.n();
    let mut j = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for k in i + 1..n {
            j[(i, k)] = m.j[(i, k)] + m.j[(k, i)];
        }
    }
    StandardIsing {
        j,
        h: m.h.clone(),
        offset: m.trace_s() + m.c,
    }
}

/// Spin state `index` of `2^n`; spin 0 is the most significant bit and `-1` sorts first.
pub fn spin_vector(index: u64, n: usize) -> Vec<Spin> {
    (0..n)
        .map(|k| if (index >> (n - 1 - k)) & 1 == 1 { 1 } else { -1 })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> ModifiedIsing<f64> {
        let j = DenseMatrix::from_rows(&[vec![0.0, -0.5], vec![-0.5, 0.0]]).unwrap();
        ModifiedIsing::new(j, vec![-1.0, -1.0], vec![1.0, 1.0], 0.0).unwrap()
    }

    #[test]
    fn energy_examples() {
        let m = example();
        assert_eq!(m.energy(&[1, 1]), -1.0);
        let z = ModifiedIsing::new(DenseMatrix::zeros(3, 3), vec![0.0; 3], vec![0.5, 1.0, 2.0], 0.25)
            .unwrap();
        assert_eq!(z.energy(&[1, 1, 1]), 3.75);
    }

    #[test]
    fn flip_difference_is_twice_linear_term() {
        let m = example();
        for q in [[1i8, -1], [-1, -1], [1, 1]] {
            let nq = [-q[0], -q[1]];
            let lin: f64 = q.iter().zip(&m.h).map(|(&s, &h)| s as f64 * h).sum();
            assert!((m.energy(&q) - m.energy(&nq) - 2.0 * lin).abs() < 1e-15);
        }
    }

    #[test]
    fn standard_form_folds_lower_triangle() {
        let s = to_standard(&example());
        assert_eq!(s.couplings()[(0, 1)], -1.0);
        assert_eq!(s.couplings()[(1, 0)], 0.0);
        assert_eq!(s.offset(), 2.0);
        for idx in 0..4 {
            let q = spin_vector(idx, 2);
            assert_eq!(s.energy(&q), example().energy(&q));
        }
    }

    #[test]
    fn zero_couplings_reduce_to_linear() {
        let m = ModifiedIsing::new(DenseMatrix::zeros(2, 2), vec![0.5, -2.0], vec![0.0; 2], 0.0).unwrap();
        let s = to_standard(&m);
        assert!(s.edges().is_empty());
        assert_eq!(s.spin_energy(&[1, -1]), 2.5);
    }

    #[test]
    fn modified_constructor_clears_diagonal() {
        let j = DenseMatrix::from_rows(&[vec![3.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let m = ModifiedIsing::new(j, vec![0.0; 2], vec![0.0; 2], 0.0).unwrap();
        assert_eq!(m.j.diagonal(), vec![0.0, 0.0]);
        assert!(ModifiedIsing::new(DenseMatrix::zeros(2, 2), vec![0.0; 3], vec![0.0; 3], 0.0).is_err());
    }

    #[test]
    fn standard_rejects_lower_entries() {
        let j = DenseMatrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(
            StandardIsing::new(j, vec![0.0; 2], 0.0),
            Err(IsingError::NotUpperTriangular { row: 1, col: 0 })
        );
    }

    #[test]
    fn json_round_trip() {
        let s = to_standard(&example());
        let v = s.to_json();
        assert_eq!(v["quadratic"]["0,1"], -1.0);
        assert_eq!(v["offset"], 2.0);
        let back = StandardIsing::<f64>::from_json(&v).unwrap();
        assert_eq!(back, s);
        assert!(StandardIsing::<f64>::from_json(&serde_json::json!({"quadratic": {}})).is_err());
    }

    #[test]
    fn rescale_fits_unit_range() {
        let j = DenseMatrix::from_rows(&[vec![0.0, 8.0], vec![0.0, 0.0]]).unwrap();
        let s = StandardIsing::new(j, vec![-4.0, 2.0], 1.0).unwrap();
        let (r, f) = s.rescaled();
        assert_eq!(f, 8.0);
        assert!(r.in_range(1.0, 1.0));
        for idx in 0..4 {
            let q = spin_vector(idx, 2);
            assert_eq!(f * r.energy(&q), s.energy(&q));
        }
    }

    #[test]
    fn spin_vector_order() {
        assert_eq!(spin_vector(0, 3), vec![-1, -1, -1]);
        assert_eq!(spin_vector(1, 3), vec![-1, -1, 1]);
        assert_eq!(spin_vector(4, 3), vec![1, -1, -1]);
    }
}
