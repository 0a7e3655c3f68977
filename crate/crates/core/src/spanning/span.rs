use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::SpanningSet;
use crate::linalg::nnls;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanMethod {
    /// A set vector is a positive multiple of the target.
    Direct,
    /// Two vectors that agree in the target component and cancel elsewhere.
    Pair,
    Nnls,
}

/// Nonnegative combination `(index, coefficient)` reproducing one target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Combination {
    pub target: Vec<f64>,
    pub method: SpanMethod,
    pub terms: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpanCertificate {
    pub spanning: bool,
    /// Targets `e_0, -e_0, e_1, ...` that were reproduced.
    pub combinations: Vec<Combination>,
    /// First target that is not in the positive span.
    pub missing: Option<Vec<f64>>,
}

fn key(v: &[f64]) -> Vec<u64> {
    // +0.0 and -0.0 must hash alike
    v.iter().map(|&x| (x + 0.0).to_bits()).collect()
}

fn direct(set: &SpanningSet, i: usize, s: f64) -> Option<Combination> {
    set.vectors.iter().enumerate().find_map(|(k, v)| {
        let ok = v[i] * s > 0.0 && v.iter().enumerate().all(|(j, &x)| j == i || x == 0.0);
        ok.then(|| Combination {
            target: unit(set.dim, i, s),
            method: SpanMethod::Direct,
            terms: vec![(k, 1.0 / v[i].abs())],
        })
    })
}

fn pair(set: &SpanningSet, index: &HashMap<Vec<u64>, usize>, i: usize, s: f64) -> Option<Combination> {
    set.vectors.iter().enumerate().find_map(|(a, v)| {
        if v[i] * s <= 0.0 {
            return None;
        }
        let mirror: Vec<f64> = v.iter().enumerate().map(|(j, &x)| if j == i { x } else { -x }).collect();
        let b = *index.get(&key(&mirror))?;
        let c = 0.5 / v[i].abs();
        Some(Combination {
            target: unit(set.dim, i, s),
            method: SpanMethod::Pair,
            terms: vec![(a, c), (b, c)],
        })
    })
}

fn by_nnls(set: &SpanningSet, i: usize, s: f64) -> Option<Combination> {
    let target = unit(set.dim, i, s);
    let sol = nnls(&set.vectors, &target);
    (sol.residual <= 1e-9).then(|| Combination {
        target,
        method: SpanMethod::Nnls,
        terms: sol
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0.0)
            .map(|(k, &c)| (k, c))
            .collect(),
    })
}

fn unit(n: usize, i: usize, s: f64) -> Vec<f64> {
    let mut e = vec![0.0; n];
    e[i] = s;
    e
}

/// The set positively spans `R^N` iff every `+-e_i` is a nonnegative
/// combination of its vectors. Intended for `N <= 12`.
pub fn is_positive_spanning(set: &SpanningSet) -> SpanCertificate {
    let index: HashMap<Vec<u64>, usize> = set.vectors.iter().enumerate().map(|(k, v)| (key(v), k)).collect();
    let mut combinations = Vec::with_capacity(2 * set.dim);
    for i in 0..set.dim {
        for s in [1.0, -1.0] {
            let found = direct(set, i, s)
                .or_else(|| pair(set, &index, i, s))
                .or_else(|| by_nnls(set, i, s));
            match found {
                Some(c) => combinations.push(c),
                None => {
                    return SpanCertificate {
                        spanning: false,
                        combinations,
                        missing: Some(unit(set.dim, i, s)),
                    }
                }
            }
        }
    }
    SpanCertificate { spanning: true, combinations, missing: None }
}
