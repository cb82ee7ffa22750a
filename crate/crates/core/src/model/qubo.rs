use serde::{Deserialize, Serialize};

use super::{check_len, BinaryObjective};
use crate::error::{check_finite, Error, Result};

/// Quadratic objective `x^T Q x + c^T x + offset` over binary `x`.
///
/// `Q` is stored symmetrized. The offset is zero for problems built from a
/// matrix and vector; penalties with constant parts (e.g. `(1 - x_i)(1 - x_j)`)
/// accumulate into it so the penalized cost stays exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboProblem {
    n: usize,
    /// Row-major `n x n`.
    q: Vec<f64>,
    c: Vec<f64>,
    offset: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl QuboProblem {
    /// Builds a problem from a raw square matrix, storing `(Q + Q^T) / 2`.
    pub fn new(q_raw: &[Vec<f64>], c: &[f64]) -> Result<Self> {
        let n = q_raw.len();
        if n == 0 {
            return Err(Error::InvalidArgument("QUBO needs at least one variable".into()));
        }
        if let Some(row) = q_raw.iter().find(|row| row.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "Q is not square: row of length {} in a {n}-row matrix",
                row.len()
            )));
        }
        if c.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "c has length {}, Q is {n}x{n}",
                c.len()
            )));
        }
        check_finite(q_raw.iter().flatten().copied(), "Q")?;
        check_finite(c.iter().copied(), "c")?;

        let mut q = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                q[i * n + j] = (q_raw[i][j] + q_raw[j][i]) / 2.0;
            }
        }
        Ok(Self {
            n,
            q,
            c: c.to_vec(),
            offset: 0.0,
            labels: None,
        })
    }

    /// All-zero problem on `n` variables.
    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(&vec![vec![0.0; n]; n], &vec![0.0; n])
    }

    pub fn with_offset(mut self, offset: f64) -> Result<Self> {
        check_finite([offset], "offset")?;
        self.offset = offset;
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for {} variables",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self, i: usize, j: usize) -> f64 {
        self.q[i * self.n + j]
    }

    /// Symmetric matrix as rows.
    pub fn q_matrix(&self) -> Vec<Vec<f64>> {
        self.q.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn linear(&self) -> &[f64] {
        &self.c
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// `Σ_ij Q_ij x_i x_j + Σ_i c_i x_i + offset`.
    pub fn evaluate(&self, x: &[bool]) -> Result<f64> {
        check_len(x, self.n)?;
        Ok(self.cost_with(|i| x[i]))
    }

    // Summation order: quadratic part row by row, then linear, then offset.
    fn cost_with(&self, bit: impl Fn(usize) -> bool) -> f64 {
        let set: Vec<usize> = (0..self.n).filter(|&i| bit(i)).collect();
        let mut acc = 0.0;
        for &i in &set {
            let row = &self.q[i * self.n..(i + 1) * self.n];
            for &j in &set {
                acc += row[j];
            }
        }
        for &i in &set {
            acc += self.c[i];
        }
        acc + self.offset
    }

    /// Adds `coef * x_i x_j` keeping `Q` symmetric. `i == j` adds to the diagonal.
    pub(crate) fn add_pair(&mut self, i: usize, j: usize, coef: f64) {
        let n = self.n;
        if i == j {
            self.q[i * n + i] += coef;
        } else {
            self.q[i * n + j] += coef / 2.0;
            self.q[j * n + i] += coef / 2.0;
        }
    }

    pub(crate) fn add_linear(&mut self, i: usize, coef: f64) {
        self.c[i] += coef;
    }

    pub(crate) fn add_offset(&mut self, coef: f64) {
        self.offset += coef;
    }

    /// Same problem on `n + extra` variables, the new ones with zero coefficients.
    pub(crate) fn extended(&self, extra: usize) -> Self {
        let n = self.n + extra;
        let mut q = vec![0.0; n * n];
        for i in 0..self.n {
            q[i * n..i * n + self.n].copy_from_slice(&self.q[i * self.n..(i + 1) * self.n]);
        }
        let mut c = self.c.clone();
        c.resize(n, 0.0);
        let labels = self.labels.as_ref().map(|l| {
            let mut l = l.clone();
            l.extend((self.n..n).map(|i| format!("slack{i}")));
            l
        });
        Self {
            n,
            q,
            c,
            offset: self.offset,
            labels,
        }
    }

    /// Divides every coefficient by `k > 0`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {k}")));
        }
        Ok(Self {
            n: self.n,
            q: self.q.iter().map(|v| v / k).collect(),
            c: self.c.iter().map(|v| v / k).collect(),
            offset: self.offset / k,
            labels: self.labels.clone(),
        })
    }
}

impl BinaryObjective for QuboProblem {
    fn num_vars(&self) -> usize {
        self.n
    }

    fn cost_of_index(&self, z: u64) -> f64 {
        self.cost_with(|i| (z >> i) & 1 == 1)
    }
}
