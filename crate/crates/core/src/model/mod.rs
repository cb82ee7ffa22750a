//! Binary optimization problems and their classical oracles.
//!
//! Assignments are indexed by an integer `z` whose bit `i` is the value of
//! variable `i` (variable 0 is the least-significant bit). The textual form
//! produced by [`format_bits`] is ordinary binary, so variable 0 is the
//! right-most character.

mod brute;
mod file;
mod penalty;
mod problems;
mod pubo;
mod qubo;

pub use brute::{BruteForce, BruteForceResult, DEFAULT_BRUTE_FORCE_CAP};
pub use file::{PenaltyEntry, ProblemFile, PuboTermEntry};
pub use penalty::{ConstraintKind, ConstraintSpec, Penalized};
pub use problems::{build_knapsack, build_maxcut, knapsack_feasible};
pub use pubo::PuboProblem;
pub use qubo::QuboProblem;

use crate::error::{Error, Result};
use crate::ising::SpinHamiltonian;

/// A cost function over `n` binary variables that can be evaluated on an
/// assignment index.
pub trait BinaryObjective: Sync {
    fn num_vars(&self) -> usize;

    /// Cost of the assignment whose bit `i` is `x_i`. Requires `num_vars() <= 64`.
    fn cost_of_index(&self, z: u64) -> f64;
}

/// Either kind of problem, as loaded from a problem file.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    Qubo(QuboProblem),
    Pubo(PuboProblem),
}

impl Problem {
    pub fn num_vars(&self) -> usize {
        match self {
            Problem::Qubo(p) => p.n(),
            Problem::Pubo(p) => p.n(),
        }
    }

    pub fn evaluate(&self, x: &[bool]) -> Result<f64> {
        match self {
            Problem::Qubo(p) => p.evaluate(x),
            Problem::Pubo(p) => p.evaluate(x),
        }
    }

    pub fn to_spin(&self) -> SpinHamiltonian {
        match self {
            Problem::Qubo(p) => SpinHamiltonian::from_qubo(p),
            Problem::Pubo(p) => SpinHamiltonian::from_pubo(p),
        }
    }

    pub fn apply_penalty(&self, spec: &ConstraintSpec) -> Result<Penalized<Problem>> {
        match self {
            Problem::Qubo(p) => {
                let out = spec.apply_to_qubo(p)?;
                Ok(Penalized {
                    problem: Problem::Qubo(out.problem),
                    exact: out.exact,
                    slack_vars: out.slack_vars,
                })
            }
            Problem::Pubo(p) => {
                let out = spec.apply_to_pubo(p)?;
                Ok(Penalized {
                    problem: Problem::Pubo(out.problem),
                    exact: out.exact,
                    slack_vars: out.slack_vars,
                })
            }
        }
    }
}

impl BinaryObjective for Problem {
    fn num_vars(&self) -> usize {
        Problem::num_vars(self)
    }

    fn cost_of_index(&self, z: u64) -> f64 {
        match self {
            Problem::Qubo(p) => p.cost_of_index(z),
            Problem::Pubo(p) => p.cost_of_index(z),
        }
    }
}

/// Bits of `z` as a vector, variable 0 first.
pub fn bits_of(z: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| (z >> i) & 1 == 1).collect()
}

/// Inverse of [`bits_of`].
pub fn index_of(bits: &[bool]) -> Result<u64> {
    if bits.len() > 64 {
        return Err(Error::TooLarge {
            size: bits.len(),
            cap: 64,
        });
    }
    Ok(bits
        .iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i)))
}

/// Binary string of `z` with `n` digits, variable 0 right-most.
pub fn format_bits(z: u64, n: usize) -> String {
    (0..n)
        .rev()
        .map(|i| if (z >> i) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Parses the output of [`format_bits`].
pub fn parse_bits(s: &str) -> Result<u64> {
    if s.is_empty() || s.len() > 64 {
        return Err(Error::Parse(format!("invalid bit string {s:?}")));
    }
    s.chars().try_fold(0u64, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::Parse(format!("invalid bit string {s:?}"))),
    })
}

pub(crate) fn check_len(x: &[bool], n: usize) -> Result<()> {
    if x.len() == n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch(format!(
            "assignment has {} bits, problem has {n} variables",
            x.len()
        )))
    }
}
