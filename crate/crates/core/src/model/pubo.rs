use std::collections::BTreeMap;

use super::{check_len, BinaryObjective, QuboProblem};
use crate::error::{check_finite, Error, Result};

/// Multilinear polynomial objective `Σ q_{i1..ik} x_i1 ... x_ik + offset`.
///
/// Keys are stored sorted non-decreasing; coefficients given for permutations
/// of the same index multiset are merged at construction. Repeated indices
/// are allowed in a key and behave as `x_i^2 = x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct PuboProblem {
    n: usize,
    terms: BTreeMap<Vec<usize>, f64>,
    offset: f64,
}

impl PuboProblem {
    pub fn new(n: usize, terms: impl IntoIterator<Item = (Vec<usize>, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("PUBO needs at least one variable".into()));
        }
        let mut raw: Vec<(Vec<usize>, Vec<usize>, f64)> = Vec::new();
        for (key, coef) in terms {
            if key.is_empty() {
                return Err(Error::InvalidArgument(
                    "empty monomial; use the offset for constants".into(),
                ));
            }
            if let Some(&index) = key.iter().find(|&&i| i >= n) {
                return Err(Error::IndexOutOfRange { index, len: n });
            }
            check_finite([coef], "PUBO coefficient")?;
            let mut sorted = key.clone();
            sorted.sort_unstable();
            raw.push((sorted, key, coef));
        }
        // Merge in (sorted key, original key) order so the result does not
        // depend on input ordering.
        raw.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
        let mut merged = BTreeMap::new();
        for (sorted, _, coef) in raw {
            *merged.entry(sorted).or_insert(0.0) += coef;
        }
        Ok(Self {
            n,
            terms: merged,
            offset: 0.0,
        })
    }

    pub fn with_offset(mut self, offset: f64) -> Result<Self> {
        check_finite([offset], "offset")?;
        self.offset = offset;
        Ok(self)
    }

    /// Degree-2 polynomial with the same cost as `qubo` on every input.
    pub fn from_qubo(qubo: &QuboProblem) -> Self {
        let n = qubo.n();
        let mut terms = BTreeMap::new();
        for i in 0..n {
            if qubo.linear()[i] != 0.0 {
                terms.insert(vec![i], qubo.linear()[i]);
            }
            if qubo.q(i, i) != 0.0 {
                terms.insert(vec![i, i], qubo.q(i, i));
            }
            for j in i + 1..n {
                let v = qubo.q(i, j) + qubo.q(j, i);
                if v != 0.0 {
                    terms.insert(vec![i, j], v);
                }
            }
        }
        Self {
            n,
            terms,
            offset: qubo.offset(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest monomial length, counting repeated indices.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.terms
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn evaluate(&self, x: &[bool]) -> Result<f64> {
        check_len(x, self.n)?;
        Ok(self.cost_with(|i| x[i]))
    }

    fn cost_with(&self, bit: impl Fn(usize) -> bool) -> f64 {
        let mut acc = 0.0;
        for (key, coef) in &self.terms {
            if key.iter().all(|&i| bit(i)) {
                acc += coef;
            }
        }
        acc + self.offset
    }

    pub(crate) fn add_term(&mut self, mut key: Vec<usize>, coef: f64) {
        key.sort_unstable();
        *self.terms.entry(key).or_insert(0.0) += coef;
    }

    pub(crate) fn add_offset(&mut self, coef: f64) {
        self.offset += coef;
    }

    pub(crate) fn extended(&self, extra: usize) -> Self {
        Self {
            n: self.n + extra,
            terms: self.terms.clone(),
            offset: self.offset,
        }
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {k}")));
        }
        Ok(Self {
            n: self.n,
            terms: self.terms.iter().map(|(key, v)| (key.clone(), v / k)).collect(),
            offset: self.offset / k,
        })
    }
}

impl BinaryObjective for PuboProblem {
    fn num_vars(&self) -> usize {
        self.n
    }

    fn cost_of_index(&self, z: u64) -> f64 {
        self.cost_with(|i| (z >> i) & 1 == 1)
    }
}
