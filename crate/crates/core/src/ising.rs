//! Diagonal spin Hamiltonians `Σ a_{i1..ik} s_i1 ... s_ik + constant`.
//!
//! Binary variables map to spins by `s = 2x - 1`. In the computational basis
//! bit value 0 carries `s = +1`, so the diagonal entry at index `z` uses
//! `s_i = 1 - 2 z_i`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::model::{PuboProblem, QuboProblem};
use crate::sim::MAX_QUBITS;

/// Degree limit for the closed-form PUBO conversion, which enumerates all
/// orderings of every monomial.
pub const CLOSED_FORM_MAX_DEGREE: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpinJson", into = "SpinJson")]
pub struct SpinHamiltonian {
    n: usize,
    /// Strictly increasing index tuples, nonzero coefficients.
    terms: BTreeMap<Vec<usize>, f64>,
    /// Shift dropped from the operator, kept for reporting in problem units.
    constant: f64,
}

#[derive(Serialize, Deserialize)]
struct SpinTermJson {
    idx: Vec<usize>,
    coef: f64,
}

#[derive(Serialize, Deserialize)]
struct SpinJson {
    n: usize,
    terms: Vec<SpinTermJson>,
    constant: f64,
}

impl TryFrom<SpinJson> for SpinHamiltonian {
    type Error = Error;

    fn try_from(j: SpinJson) -> Result<Self> {
        SpinHamiltonian::new(j.n, j.terms.into_iter().map(|t| (t.idx, t.coef)), j.constant)
    }
}

impl From<SpinHamiltonian> for SpinJson {
    fn from(h: SpinHamiltonian) -> Self {
        SpinJson {
            n: h.n,
            terms: h
                .terms
                .into_iter()
                .map(|(idx, coef)| SpinTermJson { idx, coef })
                .collect(),
            constant: h.constant,
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Calls `f` on every ordering of `items` (repeated values give repeated orderings).
fn for_each_permutation(items: &mut [usize], k: usize, f: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        for_each_permutation(items, k + 1, f);
        items.swap(k, i);
    }
}

/// Indices that appear an odd number of times, sorted (`s^2 = 1`).
fn odd_support(tuple: &[usize]) -> Vec<usize> {
    let mut sorted = tuple.to_vec();
    sorted.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(sorted[i]);
        }
        i = j;
    }
    out
}

impl SpinHamiltonian {
    /// Builds from arbitrary-order index lists. Indices within a term must be
    /// distinct; duplicate terms are merged and zero coefficients dropped.
    pub fn new(
        n: usize,
        terms: impl IntoIterator<Item = (Vec<usize>, f64)>,
        constant: f64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("Hamiltonian needs at least one qubit".into()));
        }
        check_finite([constant], "Hamiltonian constant")?;
        let mut map = BTreeMap::new();
        for (mut idx, coef) in terms {
            check_finite([coef], "Hamiltonian coefficient")?;
            if idx.is_empty() {
                return Err(Error::InvalidArgument("empty spin term; use the constant".into()));
            }
            idx.sort_unstable();
            if idx.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!("repeated index in spin term {idx:?}")));
            }
            if let Some(&index) = idx.last().filter(|&&i| i >= n) {
                return Err(Error::IndexOutOfRange { index, len: n });
            }
            *map.entry(idx).or_insert(0.0) += coef;
        }
        Ok(Self::from_parts(n, map, constant))
    }

    fn from_parts(n: usize, mut terms: BTreeMap<Vec<usize>, f64>, constant: f64) -> Self {
        terms.retain(|_, v| *v != 0.0);
        Self { n, terms, constant }
    }

    /// Spin form of a QUBO: `a_ij = Q_ij / 2` for `i < j`,
    /// `b_i = (c_i + Σ_j Q_ij) / 2`, and the diagonal `Q_ii / 4` folded into
    /// the constant along with `Σ_ij Q_ij / 4 + Σ_i c_i / 2 + offset`.
    pub fn from_qubo(p: &QuboProblem) -> Self {
        let n = p.n();
        let c = p.linear();
        let mut terms = BTreeMap::new();
        let mut constant = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += p.q(i, j);
                constant += p.q(i, j) / 4.0;
            }
            constant += p.q(i, i) / 4.0;
            constant += c[i] / 2.0;
            terms.insert(vec![i], (c[i] + row) / 2.0);
            for j in i + 1..n {
                terms.insert(vec![i, j], p.q(i, j) / 2.0);
            }
        }
        constant += p.offset();
        Self::from_parts(n, terms, constant)
    }

    /// Spin form of a PUBO by expanding `Π_{i∈D} (s_i + 1) / 2` over the
    /// distinct indices `D` of each monomial.
    pub fn from_pubo(p: &PuboProblem) -> Self {
        let mut terms: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        let mut constant = p.offset();
        for (key, &coef) in p.terms() {
            let mut distinct = key.clone();
            distinct.dedup();
            let d = distinct.len();
            let share = coef / (1u64 << d) as f64;
            constant += share;
            for mask in 1u64..1 << d {
                let subset: Vec<usize> = (0..d)
                    .filter(|&b| (mask >> b) & 1 == 1)
                    .map(|b| distinct[b])
                    .collect();
                *terms.entry(subset).or_insert(0.0) += share;
            }
        }
        Self::from_parts(p.n(), terms, constant)
    }

    /// Spin form of a PUBO by collecting coefficients column-wise.
    ///
    /// Each monomial of length `m` is spread evenly over all its orderings
    /// (the symmetric coefficient tensor), scaled by `2^-m`, and every
    /// ordered tuple `T` contributes `C(m, k) q'(T)` to the degree-`k` spin
    /// coefficient indexed by the prefix `T[..k]`. Prefixes with repeated
    /// indices reduce through `s^2 = 1`. Agrees with [`Self::from_pubo`] up to
    /// rounding.
    pub fn from_pubo_closed_form(p: &PuboProblem) -> Result<Self> {
        if p.degree() > CLOSED_FORM_MAX_DEGREE {
            return Err(Error::TooLarge {
                size: p.degree(),
                cap: CLOSED_FORM_MAX_DEGREE,
            });
        }
        let mut terms: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
        let mut constant = p.offset();
        for (key, &coef) in p.terms() {
            let m = key.len();
            let orderings: f64 = (1..=m).map(|v| v as f64).product();
            let q_prime = coef / orderings / (1u64 << m) as f64;
            // The `+1` in every factor leaves the bare tensor entry as a constant.
            constant += coef / (1u64 << m) as f64;
            let mut items = key.clone();
            for_each_permutation(&mut items, 0, &mut |tuple| {
                for k in 1..=m {
                    let f = binomial(m, k) * q_prime;
                    let support = odd_support(&tuple[..k]);
                    if support.is_empty() {
                        constant += f;
                    } else {
                        *terms.entry(support).or_insert(0.0) += f;
                    }
                }
            });
        }
        Ok(Self::from_parts(p.n(), terms, constant))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Vec<usize>, f64> {
        &self.terms
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_linear_term(&self) -> bool {
        self.terms.keys().any(|k| k.len() == 1)
    }

    pub fn has_odd_degree_term(&self) -> bool {
        self.terms.keys().any(|k| k.len() % 2 == 1)
    }

    pub fn all_even_degrees(&self) -> bool {
        !self.has_odd_degree_term()
    }

    /// Terms as `(bit mask, coefficient)` pairs in map order.
    pub fn term_masks(&self) -> Vec<(u64, f64)> {
        self.terms
            .iter()
            .map(|(idx, &c)| (idx.iter().fold(0u64, |m, &i| m | 1 << i), c))
            .collect()
    }

    /// `Σ a Π s` without the constant. Spins must be ±1.
    pub fn evaluate(&self, s: &[i8]) -> Result<f64> {
        if s.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "{} spins for {} qubits",
                s.len(),
                self.n
            )));
        }
        if let Some(bad) = s.iter().find(|&&v| v != 1 && v != -1) {
            return Err(Error::InvalidArgument(format!("spin value {bad} is not ±1")));
        }
        let mut acc = 0.0;
        for (idx, coef) in &self.terms {
            let sign: i8 = idx.iter().map(|&i| s[i]).product();
            acc += coef * f64::from(sign);
        }
        Ok(acc)
    }

    /// Energy of basis state `z`, bit 0 meaning `s = +1`. Same summation
    /// order as [`Self::evaluate`].
    pub fn energy_of_index(&self, z: u64) -> f64 {
        let mut acc = 0.0;
        for (idx, coef) in &self.terms {
            let parity = idx.iter().filter(|&&i| (z >> i) & 1 == 1).count() % 2;
            acc += if parity == 0 { *coef } else { -coef };
        }
        acc
    }

    /// Diagonal of the operator in the computational basis.
    pub fn diagonalize(&self) -> Result<Vec<f64>> {
        if self.n > MAX_QUBITS {
            return Err(Error::TooLarge {
                size: self.n,
                cap: MAX_QUBITS,
            });
        }
        let masks = self.term_masks();
        let mut out = vec![0.0; 1usize << self.n];
        out.par_chunks_mut(1 << 12).enumerate().for_each(|(c, chunk)| {
            let base = (c as u64) << 12;
            // Terms outermost: each entry accumulates in map order.
            for &(mask, coef) in &masks {
                for (k, e) in chunk.iter_mut().enumerate() {
                    let z = base + k as u64;
                    *e += if (z & mask).count_ones() % 2 == 0 { coef } else { -coef };
                }
            }
        });
        Ok(out)
    }

    /// Largest absolute coefficient over the operator terms.
    pub fn scaling_factor(&self) -> Result<f64> {
        let k = self.terms.values().fold(0.0f64, |m, v| m.max(v.abs()));
        if k > 0.0 {
            Ok(k)
        } else {
            Err(Error::ZeroHamiltonian)
        }
    }

    /// Divides every coefficient, and the constant, by `k > 0`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {k}")));
        }
        Ok(Self {
            n: self.n,
            terms: self.terms.iter().map(|(i, v)| (i.clone(), v / k)).collect(),
            constant: self.constant / k,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{bits_of, build_knapsack, build_maxcut, BinaryObjective};

    fn spins(z: u64, n: usize) -> Vec<i8> {
        // s = 2x - 1 with x the variable value
        bits_of(z, n).iter().map(|&b| if b { 1 } else { -1 }).collect()
    }

    #[test]
    fn maxcut_coefficients() {
        let g = build_maxcut(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let h = SpinHamiltonian::from_qubo(&g);
        assert!(!h.has_linear_term());
        for (idx, &a) in h.terms() {
            assert_eq!(idx.len(), 2);
            assert_eq!(a, 0.5);
        }
        assert_eq!(h.terms().len(), 4);
        assert_eq!(h.scaling_factor().unwrap(), 0.5);
        let s = h.scaled(0.5).unwrap();
        assert!(s.terms().values().all(|&v| v == 1.0));
    }

    #[test]
    fn linear_only_qubo() {
        let p = QuboProblem::new(&[vec![0.0, 0.0], vec![0.0, 0.0]], &[1.0, 0.0]).unwrap();
        let h = SpinHamiltonian::from_qubo(&p);
        assert_eq!(h.terms().len(), 1);
        assert_eq!(h.terms()[&vec![0]], 0.5);
        assert_eq!(h.constant(), 0.5);
    }

    #[test]
    fn knapsack_scale() {
        let p = build_knapsack(&[4.0, 4.0], &[4.0, 3.0], 5.0, 1.0, 1.0).unwrap();
        let h = SpinHamiltonian::from_qubo(&p);
        // a01 = 12/2; b = ((-40 + 28)/2, (-31 + 21)/2)
        assert_eq!(h.terms()[&vec![0, 1]], 6.0);
        assert_eq!(h.terms()[&vec![0]], -6.0);
        assert_eq!(h.terms()[&vec![1]], -5.0);
        assert_eq!(h.scaling_factor().unwrap(), 6.0);
    }

    #[test]
    fn qubo_round_trip_small() {
        let p = QuboProblem::new(
            &[vec![1.0, -2.0, 0.5], vec![0.0, 3.0, 1.0], vec![2.0, 0.0, -1.0]],
            &[0.25, -1.0, 2.0],
        )
        .unwrap();
        let h = SpinHamiltonian::from_qubo(&p);
        for z in 0..8 {
            let lhs = h.evaluate(&spins(z, 3)).unwrap() + h.constant();
            assert!((lhs - p.cost_of_index(z)).abs() < 1e-12);
        }
    }

    #[test]
    fn cubic_expansion() {
        let q = 2.4;
        let p = PuboProblem::new(3, [(vec![0, 1, 2], q)]).unwrap();
        let h = SpinHamiltonian::from_pubo(&p);
        assert_eq!(h.terms().len(), 7);
        assert!(h.terms().values().all(|&v| v == q / 8.0));
        assert_eq!(h.constant(), q / 8.0);
        let c = SpinHamiltonian::from_pubo_closed_form(&p).unwrap();
        for (idx, v) in h.terms() {
            assert!((c.terms()[idx] - v).abs() < 1e-15);
        }
        assert!((c.constant() - h.constant()).abs() < 1e-15);
    }

    #[test]
    fn linear_pubo() {
        let p = PuboProblem::new(2, [(vec![0], 3.0), (vec![1], -1.0)]).unwrap();
        let h = SpinHamiltonian::from_pubo(&p);
        assert_eq!(h.terms()[&vec![0]], 1.5);
        assert_eq!(h.terms()[&vec![1]], -0.5);
        assert_eq!(h.constant(), 1.0);
    }

    #[test]
    fn repeated_index_closed_form() {
        let p = PuboProblem::new(3, [(vec![0, 0, 1], 1.0), (vec![1, 2, 2, 2], -2.0)]).unwrap();
        let a = SpinHamiltonian::from_pubo(&p);
        let b = SpinHamiltonian::from_pubo_closed_form(&p).unwrap();
        for z in 0..8 {
            let x = bits_of(z, 3);
            let s = spins(z, 3);
            let want = p.evaluate(&x).unwrap();
            assert!((a.evaluate(&s).unwrap() + a.constant() - want).abs() < 1e-12);
            assert!((b.evaluate(&s).unwrap() + b.constant() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn diagonal_conventions() {
        let h = SpinHamiltonian::new(1, [(vec![0], 1.5)], 0.0).unwrap();
        assert_eq!(h.diagonalize().unwrap(), vec![1.5, -1.5]);
        let h = SpinHamiltonian::new(2, [(vec![0, 1], 2.0)], 0.0).unwrap();
        assert_eq!(h.diagonalize().unwrap(), vec![2.0, -2.0, -2.0, 2.0]);
        let h = SpinHamiltonian::new(2, [(vec![0, 1], 1.0)], 0.0).unwrap();
        assert_eq!(h.evaluate(&[-1, 1]).unwrap(), -1.0);
    }

    #[test]
    fn errors() {
        let zero = SpinHamiltonian::new(2, [], 1.0).unwrap();
        assert_eq!(zero.scaling_factor(), Err(Error::ZeroHamiltonian));
        assert_eq!(zero.evaluate(&[1, 1]).unwrap(), 0.0);
        assert!(zero.evaluate(&[1, 0]).is_err());
        assert!(zero.scaled(0.0).is_err());
        assert!(SpinHamiltonian::new(2, [(vec![0, 0], 1.0)], 0.0).is_err());
        assert!(SpinHamiltonian::new(2, [(vec![2], 1.0)], 0.0).is_err());
    }

    #[test]
    fn json_shape() {
        let h = SpinHamiltonian::new(3, [(vec![2, 0], 1.5), (vec![1], -1.0)], 0.25).unwrap();
        let v: serde_json::Value = serde_json::to_value(&h).unwrap();
        assert_eq!(v["n"], 3);
        assert_eq!(v["constant"], 0.25);
        assert_eq!(v["terms"][0]["idx"], serde_json::json!([0, 2]));
        let back: SpinHamiltonian = serde_json::from_value(v).unwrap();
        assert_eq!(back, h);
    }
}
