//! Constraint penalties.
//!
//! Each constraint kind maps to a quadratic penalty `P(x)` that is added to
//! the objective with a positive weight. Kinds 1 to 6 are exact: the penalty
//! is zero exactly on feasible assignments (for the slack encoding, for some
//! setting of the slack bits) and positive elsewhere.
//!
//! [`ConstraintKind::UnbalancedInequality`] is **inexact**. The total penalty
//! `p1 (Σ w_i x_i - W) + p2 (Σ w_i x_i - W)^2` is negative for some feasible
//! assignments, nonzero for most of them, and can vanish on an infeasible
//! one when `p1 > p2`-style cancellations happen. It avoids slack variables
//! at the cost of exactness; [`ConstraintSpec::inexactness_witness`]
//! produces a concrete counterexample for a given instance.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{PuboProblem, QuboProblem};
use crate::error::{check_finite, Error, Result};

/// Default weights for the unbalanced penalty. They are arbitrary starting
/// values, not tuned for any instance.
pub const DEFAULT_UNBALANCED_P1: f64 = 0.96;
pub const DEFAULT_UNBALANCED_P2: f64 = 0.0371;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConstraintKind {
    /// `x_i + x_j <= 1`, penalty `x_i x_j`.
    AtMostOnePair,
    /// `x_i + x_j >= 1`, penalty `(1 - x_i)(1 - x_j)`.
    AtLeastOnePair,
    /// `x_i = x_j`, penalty `x_i (1 - x_j) + (1 - x_i) x_j`.
    EqualPair,
    /// `Σ_{i∈I} x_i <= 1`, penalty `Σ_{i≠j∈I} x_i x_j`.
    AtMostOneSet,
    /// `Σ_{i∈I} x_i = W`, penalty `(Σ x_i - W)^2`.
    ExactSum,
    /// `Σ w_i x_i <= W` with non-negative integer data, penalty
    /// `(W - Σ w_i x_i - Σ_l 2^l s_l)^2` over `ceil(log2(W + 1))` new slack bits.
    SlackInequality,
    /// `Σ w_i x_i <= W` with real data, penalty `p1 P1 + p2 P1^2`, `P1 = Σ w_i x_i - W`.
    UnbalancedInequality,
}

impl ConstraintKind {
    pub fn is_exact(self) -> bool {
        self != ConstraintKind::UnbalancedInequality
    }
}

/// A constraint together with its penalty weight(s).
///
/// `indices` refer to problem variables. `weights` and `bound` are used by
/// the kinds that need them; `p2` only by the unbalanced penalty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSpec {
    pub kind: ConstraintKind,
    pub indices: Vec<usize>,
    #[serde(default)]
    pub weights: Vec<f64>,
    #[serde(default)]
    pub bound: f64,
    pub p1: f64,
    #[serde(default)]
    pub p2: f64,
}

/// A penalized problem plus metadata about the encoding.
#[derive(Debug, Clone, PartialEq)]
pub struct Penalized<P> {
    pub problem: P,
    /// False for the unbalanced penalty.
    pub exact: bool,
    /// Variables appended for slack bits (empty range when none).
    pub slack_vars: Range<usize>,
}

/// `Σ pairs + Σ lin + constant`, with pairs keyed `i <= j` holding the full
/// coefficient of `x_i x_j`.
#[derive(Debug, Default)]
struct QuadForm {
    pairs: BTreeMap<(usize, usize), f64>,
    lin: BTreeMap<usize, f64>,
    constant: f64,
}

impl QuadForm {
    fn pair(&mut self, i: usize, j: usize, coef: f64) {
        let key = if i <= j { (i, j) } else { (j, i) };
        *self.pairs.entry(key).or_insert(0.0) += coef;
    }

    fn lin(&mut self, i: usize, coef: f64) {
        *self.lin.entry(i).or_insert(0.0) += coef;
    }

    /// Adds `weight * (Σ a_v x_v + b)^2`, expanded without using `x^2 = x`.
    fn square(&mut self, affine: &[(usize, f64)], b: f64, weight: f64) {
        for (u, &(i, ai)) in affine.iter().enumerate() {
            self.pair(i, i, weight * ai * ai);
            for &(j, aj) in &affine[u + 1..] {
                self.pair(i, j, weight * 2.0 * ai * aj);
            }
            self.lin(i, weight * 2.0 * ai * b);
        }
        self.constant += weight * b * b;
    }
}

impl ConstraintSpec {
    pub fn new(kind: ConstraintKind, indices: Vec<usize>, p1: f64) -> Self {
        Self {
            kind,
            indices,
            weights: Vec::new(),
            bound: 0.0,
            p1,
            p2: 0.0,
        }
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Self {
        self.weights = weights;
        self
    }

    pub fn with_bound(mut self, bound: f64) -> Self {
        self.bound = bound;
        self
    }

    pub fn with_p2(mut self, p2: f64) -> Self {
        self.p2 = p2;
        self
    }

    /// Unbalanced inequality with the default (arbitrary) weights.
    pub fn unbalanced(indices: Vec<usize>, weights: Vec<f64>, bound: f64) -> Self {
        Self::new(ConstraintKind::UnbalancedInequality, indices, DEFAULT_UNBALANCED_P1)
            .with_weights(weights)
            .with_bound(bound)
            .with_p2(DEFAULT_UNBALANCED_P2)
    }

    /// Number of slack bits the encoding appends.
    pub fn slack_count(&self) -> usize {
        match self.kind {
            ConstraintKind::SlackInequality => {
                let w = self.bound as u64;
                (u64::BITS - w.leading_zeros()) as usize
            }
            _ => 0,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        use ConstraintKind::*;
        if let Some(&index) = self.indices.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index, len: n });
        }
        let mut sorted = self.indices.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != self.indices.len() {
            return Err(Error::InvalidArgument("constraint indices must be distinct".into()));
        }
        if self.indices.is_empty() {
            return Err(Error::InvalidArgument("constraint has no variables".into()));
        }
        check_finite(self.weights.iter().copied().chain([self.bound]), "constraint data")?;
        if !(self.p1 > 0.0 && self.p1.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "penalty weight must be positive, got {}",
                self.p1
            )));
        }
        match self.kind {
            AtMostOnePair | AtLeastOnePair | EqualPair if self.indices.len() != 2 => {
                Err(Error::InvalidArgument(format!(
                    "{:?} takes exactly two variables",
                    self.kind
                )))
            }
            SlackInequality | UnbalancedInequality if self.weights.len() != self.indices.len() => {
                Err(Error::DimensionMismatch(format!(
                    "{} weights for {} variables",
                    self.weights.len(),
                    self.indices.len()
                )))
            }
            SlackInequality => {
                let integral = |v: f64| v.fract() == 0.0 && v >= 0.0;
                if !self.weights.iter().all(|&w| integral(w)) || !integral(self.bound) {
                    Err(Error::InvalidArgument(
                        "slack encoding needs non-negative integer weights and bound".into(),
                    ))
                } else {
                    Ok(())
                }
            }
            UnbalancedInequality if !(self.p2 > 0.0 && self.p2.is_finite()) => {
                Err(Error::InvalidArgument(format!(
                    "penalty weight p2 must be positive, got {}",
                    self.p2
                )))
            }
            _ => Ok(()),
        }
    }

    /// Whether `x` (problem variables, slack excluded) satisfies the constraint.
    pub fn is_satisfied(&self, x: &[bool]) -> bool {
        use ConstraintKind::*;
        let bit = |i: usize| x[i];
        let count = || self.indices.iter().filter(|&&i| bit(i)).count() as f64;
        let weighted = || -> f64 {
            self.indices
                .iter()
                .zip(&self.weights)
                .filter(|(&i, _)| bit(i))
                .map(|(_, w)| w)
                .sum()
        };
        match self.kind {
            AtMostOnePair | AtMostOneSet => count() <= 1.0,
            AtLeastOnePair => count() >= 1.0,
            EqualPair => bit(self.indices[0]) == bit(self.indices[1]),
            ExactSum => count() == self.bound,
            SlackInequality | UnbalancedInequality => weighted() <= self.bound,
        }
    }

    /// Weighted penalty value computed directly from the constraint formula.
    ///
    /// `slack` holds the slack bits (least significant first) and is only
    /// read by the slack encoding.
    pub fn weighted_penalty(&self, x: &[bool], slack: &[bool]) -> f64 {
        use ConstraintKind::*;
        let v = |i: usize| if x[i] { 1.0 } else { 0.0 };
        let (i, j) = (self.indices[0], *self.indices.get(1).unwrap_or(&self.indices[0]));
        let weighted: f64 = self
            .indices
            .iter()
            .zip(&self.weights)
            .map(|(&i, w)| w * v(i))
            .sum();
        match self.kind {
            AtMostOnePair => self.p1 * v(i) * v(j),
            AtLeastOnePair => self.p1 * (1.0 - v(i)) * (1.0 - v(j)),
            EqualPair => self.p1 * (v(i) * (1.0 - v(j)) + (1.0 - v(i)) * v(j)),
            AtMostOneSet => {
                let mut acc = 0.0;
                for &a in &self.indices {
                    for &b in &self.indices {
                        if a != b {
                            acc += v(a) * v(b);
                        }
                    }
                }
                self.p1 * acc
            }
            ExactSum => {
                let s: f64 = self.indices.iter().map(|&i| v(i)).sum();
                self.p1 * (s - self.bound).powi(2)
            }
            SlackInequality => {
                let s: f64 = slack
                    .iter()
                    .enumerate()
                    .map(|(l, &b)| if b { (1u64 << l) as f64 } else { 0.0 })
                    .sum();
                self.p1 * (self.bound - weighted - s).powi(2)
            }
            UnbalancedInequality => {
                let p = weighted - self.bound;
                self.p1 * p + self.p2 * p * p
            }
        }
    }

    /// Smallest penalty over all slack settings (the penalty itself for
    /// encodings without slack).
    pub fn min_penalty(&self, x: &[bool]) -> f64 {
        let m = self.slack_count();
        (0..1u64 << m)
            .map(|s| {
                let slack: Vec<bool> = (0..m).map(|l| (s >> l) & 1 == 1).collect();
                self.weighted_penalty(x, &slack)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Searches assignments of the constrained variables for one where the
    /// penalty is not exact: zero or negative although violated, or nonzero
    /// although satisfied. Returns `(assignment over n vars, penalty, satisfied)`.
    ///
    /// Variables outside `indices` are held at zero. Requires at most 20
    /// constrained variables.
    pub fn inexactness_witness(&self, n: usize) -> Option<(Vec<bool>, f64, bool)> {
        let k = self.indices.len().min(20);
        for local in 0..1u64 << k {
            let mut x = vec![false; n];
            for (l, &i) in self.indices.iter().take(k).enumerate() {
                x[i] = (local >> l) & 1 == 1;
            }
            let penalty = self.min_penalty(&x);
            let satisfied = self.is_satisfied(&x);
            let exact = if satisfied { penalty == 0.0 } else { penalty > 0.0 };
            if !exact {
                return Some((x, penalty, satisfied));
            }
        }
        None
    }

    /// Penalty polynomial over `n + slack_count()` variables, weights included.
    fn quad_form(&self, n: usize) -> QuadForm {
        use ConstraintKind::*;
        let mut f = QuadForm::default();
        let p = self.p1;
        match self.kind {
            AtMostOnePair => f.pair(self.indices[0], self.indices[1], p),
            AtLeastOnePair => {
                let (i, j) = (self.indices[0], self.indices[1]);
                f.pair(i, j, p);
                f.lin(i, -p);
                f.lin(j, -p);
                f.constant += p;
            }
            EqualPair => {
                let (i, j) = (self.indices[0], self.indices[1]);
                f.lin(i, p);
                f.lin(j, p);
                f.pair(i, j, -2.0 * p);
            }
            AtMostOneSet => {
                for (u, &i) in self.indices.iter().enumerate() {
                    for &j in &self.indices[u + 1..] {
                        f.pair(i, j, 2.0 * p);
                    }
                }
            }
            ExactSum => {
                let affine: Vec<(usize, f64)> = self.indices.iter().map(|&i| (i, 1.0)).collect();
                f.square(&affine, -self.bound, p);
            }
            SlackInequality => {
                // (W - Σ w x - Σ 2^l s)^2 = (Σ w x + Σ 2^l s - W)^2
                let mut affine: Vec<(usize, f64)> =
                    self.indices.iter().copied().zip(self.weights.iter().copied()).collect();
                affine.extend((0..self.slack_count()).map(|l| (n + l, (1u64 << l) as f64)));
                f.square(&affine, -self.bound, p);
            }
            UnbalancedInequality => {
                let affine: Vec<(usize, f64)> =
                    self.indices.iter().copied().zip(self.weights.iter().copied()).collect();
                for &(i, w) in &affine {
                    f.lin(i, p * w);
                }
                f.constant -= p * self.bound;
                f.square(&affine, -self.bound, self.p2);
            }
        }
        f
    }

    /// Adds this penalty to a QUBO, appending slack variables if needed.
    pub fn apply_to_qubo(&self, problem: &QuboProblem) -> Result<Penalized<QuboProblem>> {
        let n = problem.n();
        self.validate(n)?;
        let m = self.slack_count();
        let mut out = problem.extended(m);
        let form = self.quad_form(n);
        for (&(i, j), &v) in &form.pairs {
            out.add_pair(i, j, v);
        }
        for (&i, &v) in &form.lin {
            out.add_linear(i, v);
        }
        out.add_offset(form.constant);
        Ok(Penalized {
            problem: out,
            exact: self.kind.is_exact(),
            slack_vars: n..n + m,
        })
    }

    /// Adds this penalty to a PUBO, appending slack variables if needed.
    pub fn apply_to_pubo(&self, problem: &PuboProblem) -> Result<Penalized<PuboProblem>> {
        let n = problem.n();
        self.validate(n)?;
        let m = self.slack_count();
        let mut out = problem.extended(m);
        let form = self.quad_form(n);
        for (&(i, j), &v) in &form.pairs {
            if i == j {
                out.add_term(vec![i], v);
            } else {
                out.add_term(vec![i, j], v);
            }
        }
        for (&i, &v) in &form.lin {
            out.add_term(vec![i], v);
        }
        out.add_offset(form.constant);
        Ok(Penalized {
            problem: out,
            exact: self.kind.is_exact(),
            slack_vars: n..n + m,
        })
    }
}
