//! Builders for the two worked problem families.

use super::QuboProblem;
use crate::error::{check_finite, Error, Result};

/// Max Cut as a minimization: each edge contributes `-(x_i + x_j - 2 x_i x_j)`,
/// so the cost of a labeling is minus the number of cut edges.
pub fn build_maxcut(vertices: usize, edges: &[(usize, usize)]) -> Result<QuboProblem> {
    if vertices == 0 {
        return Err(Error::InvalidArgument("graph has no vertices".into()));
    }
    let mut q = vec![vec![0.0; vertices]; vertices];
    let mut c = vec![0.0; vertices];
    for &(i, j) in edges {
        for v in [i, j] {
            if v >= vertices {
                return Err(Error::IndexOutOfRange {
                    index: v,
                    len: vertices,
                });
            }
        }
        if i == j {
            return Err(Error::InvalidArgument(format!("self-loop on vertex {i}")));
        }
        // 2 x_i x_j split over the two symmetric entries.
        q[i][j] += 1.0;
        q[j][i] += 1.0;
        c[i] -= 1.0;
        c[j] -= 1.0;
    }
    QuboProblem::new(&q, &c)
}

/// Knapsack with the linear-plus-quadratic (unbalanced) capacity penalty:
///
/// `-Σ v_i x_i + p1 (Σ w_i x_i - W) + p2 (Σ w_i x_i - W)^2`
///
/// with the constants `-p1 W` and `p2 W^2` dropped, giving
/// `Q_ij = p2 w_i w_j` and `c_i = -v_i + p1 w_i - 2 p2 W w_i`.
///
/// The penalty is inexact: for poorly chosen `p1`, `p2` the minimizer can be
/// infeasible. Check candidates with [`knapsack_feasible`].
pub fn build_knapsack(values: &[f64], weights: &[f64], capacity: f64, p1: f64, p2: f64) -> Result<QuboProblem> {
    if values.len() != weights.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} values, {} weights",
            values.len(),
            weights.len()
        )));
    }
    if values.is_empty() {
        return Err(Error::InvalidArgument("knapsack has no items".into()));
    }
    check_finite(values.iter().chain(weights).copied().chain([capacity, p1, p2]), "knapsack data")?;
    if values.iter().chain(weights).any(|&v| v <= 0.0) {
        return Err(Error::InvalidArgument("values and weights must be positive".into()));
    }
    if p1 <= 0.0 || p2 <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "penalty weights must be positive, got p1={p1}, p2={p2}"
        )));
    }
    let n = values.len();
    let q: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| p2 * weights[i] * weights[j]).collect())
        .collect();
    let c: Vec<f64> = (0..n)
        .map(|i| -values[i] + p1 * weights[i] - 2.0 * p2 * capacity * weights[i])
        .collect();
    QuboProblem::new(&q, &c)
}

/// Whether the selected items fit in the knapsack.
pub fn knapsack_feasible(weights: &[f64], capacity: f64, x: &[bool]) -> bool {
    let total: f64 = weights.iter().zip(x).filter(|(_, &b)| b).map(|(w, _)| w).sum();
    total <= capacity
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{bits_of, parse_bits, BinaryObjective};

    fn square() -> QuboProblem {
        build_maxcut(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn maxcut_counts_cut_edges() {
        let g = square();
        assert_eq!(g.cost_of_index(parse_bits("0101").unwrap()), -4.0);
        assert_eq!(g.cost_of_index(0), 0.0);
        let edge = build_maxcut(2, &[(0, 1)]).unwrap();
        assert_eq!(edge.evaluate(&[true, false]).unwrap(), -1.0);
    }

    #[test]
    fn maxcut_rejects_bad_edges() {
        assert!(build_maxcut(2, &[(1, 1)]).is_err());
        assert!(matches!(build_maxcut(2, &[(0, 2)]), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn knapsack_coefficients() {
        let k = build_knapsack(&[4.0], &[4.0], 5.0, 1.0, 1.0).unwrap();
        assert_eq!(k.q_matrix(), vec![vec![16.0]]);
        assert_eq!(k.linear(), &[-40.0]);

        let k = build_knapsack(&[4.0, 4.0], &[4.0, 3.0], 5.0, 1.0, 1.0).unwrap();
        assert_eq!(k.q_matrix(), vec![vec![16.0, 12.0], vec![12.0, 9.0]]);
        assert_eq!(k.linear(), &[-40.0, -31.0]);
    }

    #[test]
    fn knapsack_rejects_bad_input() {
        assert!(build_knapsack(&[4.0], &[4.0], 5.0, 1.0, 0.0).is_err());
        assert!(build_knapsack(&[4.0], &[4.0, 1.0], 5.0, 1.0, 1.0).is_err());
        assert!(build_knapsack(&[-1.0], &[4.0], 5.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn knapsack_differs_from_penalized_objective_by_constant() {
        let (v, w, cap, p1, p2) = ([4.0, 4.0, 2.0], [4.0, 3.0, 1.0], 5.0, 0.7, 1.3);
        let k = build_knapsack(&v, &w, cap, p1, p2).unwrap();
        let direct = |x: &[bool]| {
            let value: f64 = v.iter().zip(x).filter(|(_, &b)| b).map(|(a, _)| a).sum();
            let weight: f64 = w.iter().zip(x).filter(|(_, &b)| b).map(|(a, _)| a).sum();
            let p = weight - cap;
            -value + p1 * p + p2 * p * p
        };
        let shift = k.cost_of_index(0) - direct(&bits_of(0, 3));
        for z in 0..8 {
            let x = bits_of(z, 3);
            assert!((k.evaluate(&x).unwrap() - direct(&x) - shift).abs() < 1e-12);
        }
        assert!((shift - (p1 * cap - p2 * cap * cap)).abs() < 1e-12);
    }
}
