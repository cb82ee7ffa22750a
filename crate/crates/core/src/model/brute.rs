use rayon::prelude::*;
use serde::Serialize;

use super::{format_bits, BinaryObjective};
use crate::error::{Error, Result};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 22;

const CHUNK: u64 = 1 << 14;

/// Exhaustive minimizer over all `2^n` assignments.
#[derive(Debug, Clone)]
pub struct BruteForce {
    pub cap: usize,
    /// Keep the cost of every assignment in the result.
    pub keep_table: bool,
    /// Assignments within this distance of the minimum count as optimal.
    /// Zero means exact ties only.
    pub tolerance: f64,
}

impl Default for BruteForce {
    fn default() -> Self {
        Self {
            cap: DEFAULT_BRUTE_FORCE_CAP,
            keep_table: false,
            tolerance: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BruteForceResult {
    pub n: usize,
    /// Lowest-index member of `optimum_set`.
    pub best_assignment: u64,
    pub best_cost: f64,
    /// Ascending assignment indices.
    pub optimum_set: Vec<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub full_table: Option<Vec<f64>>,
}

impl BruteForceResult {
    pub fn best_bits(&self) -> String {
        format_bits(self.best_assignment, self.n)
    }

    pub fn optimum_bits(&self) -> Vec<String> {
        self.optimum_set.iter().map(|&z| format_bits(z, self.n)).collect()
    }

    pub fn is_optimal(&self, z: u64) -> bool {
        self.optimum_set.binary_search(&z).is_ok()
    }
}

impl BruteForce {
    pub fn with_cap(cap: usize) -> Self {
        Self {
            cap,
            ..Self::default()
        }
    }

    pub fn solve<P: BinaryObjective + ?Sized>(&self, problem: &P) -> Result<BruteForceResult> {
        let n = problem.num_vars();
        if n > self.cap.min(63) {
            return Err(Error::TooLarge {
                size: n,
                cap: self.cap.min(63),
            });
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidArgument("tolerance must be non-negative".into()));
        }
        let total = 1u64 << n;
        let chunks = total.div_ceil(CHUNK);

        // Per chunk: minimum and the indices attaining it. Chunks are reduced
        // in index order, so the outcome does not depend on scheduling.
        let partial: Vec<(f64, Vec<u64>, Vec<f64>)> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = c * CHUNK;
                let hi = (lo + CHUNK).min(total);
                let mut best = f64::INFINITY;
                let mut arg = Vec::new();
                let mut table = Vec::new();
                for z in lo..hi {
                    let v = problem.cost_of_index(z);
                    if self.keep_table || self.tolerance > 0.0 {
                        table.push(v);
                    }
                    if v < best {
                        best = v;
                        arg.clear();
                        arg.push(z);
                    } else if v == best {
                        arg.push(z);
                    }
                }
                (best, arg, table)
            })
            .collect();

        let best_cost = partial.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        if !best_cost.is_finite() {
            return Err(Error::NonFinite("objective has no finite minimum".into()));
        }
        let optimum_set: Vec<u64> = if self.tolerance > 0.0 {
            partial
                .iter()
                .enumerate()
                .flat_map(|(c, p)| {
                    let lo = c as u64 * CHUNK;
                    p.2.iter()
                        .enumerate()
                        .filter(|(_, &v)| v <= best_cost + self.tolerance)
                        .map(move |(k, _)| lo + k as u64)
                })
                .collect()
        } else {
            partial
                .iter()
                .filter(|p| p.0 == best_cost)
                .flat_map(|p| p.1.iter().copied())
                .collect()
        };
        let full_table = self
            .keep_table
            .then(|| partial.into_iter().flat_map(|p| p.2).collect());
        Ok(BruteForceResult {
            n,
            best_assignment: optimum_set[0],
            best_cost,
            optimum_set,
            full_table,
        })
    }
}
