use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::QaoaCircuitSpec;

/// Box the angles can be restricted to without losing any energy value.
///
/// `β` is always limited to `[0, π]`: the energy is symmetric under
/// `(β, γ) -> (-β, -γ)` and `π`-periodic in each `β_i` up to a global spin
/// flip, which only leaves the energy invariant when every term has even
/// degree. So with any odd-degree term (a linear term, for a QUBO) `γ` keeps
/// its full period `[-π, π]` and the volume shrinks by `2^p`; with only
/// even-degree terms `γ` also fits in `[0, π]` and the volume shrinks by
/// `2^{2p}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamDomain {
    pub beta: (f64, f64),
    pub gamma: (f64, f64),
    /// True when `γ` is restricted to `[0, π]`.
    pub fully_restricted: bool,
    pub p: usize,
    /// Base-2 logarithm of the volume reduction.
    pub reduction_log2: usize,
}

impl ParamDomain {
    pub fn reduction_factor(&self) -> f64 {
        2f64.powi(self.reduction_log2 as i32)
    }

    pub fn contains(&self, beta: f64, gamma: f64) -> bool {
        (self.beta.0..=self.beta.1).contains(&beta) && (self.gamma.0..=self.gamma.1).contains(&gamma)
    }
}

pub fn restricted_domain(spec: &QaoaCircuitSpec, p: usize) -> ParamDomain {
    let full = spec.hamiltonian().all_even_degrees();
    ParamDomain {
        beta: (0.0, PI),
        gamma: if full { (0.0, PI) } else { (-PI, PI) },
        fully_restricted: full,
        p,
        reduction_log2: if full { 2 * p } else { p },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::SpinHamiltonian;
    use crate::model::{build_knapsack, build_maxcut};
    use crate::qaoa::{build_circuit, CircuitOptions};

    #[test]
    fn maxcut_is_fully_restricted() {
        let h = SpinHamiltonian::from_qubo(&build_maxcut(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap());
        let d = build_circuit(&h, CircuitOptions::default()).unwrap().domain(2);
        assert_eq!(d.gamma, (0.0, PI));
        assert_eq!(d.reduction_factor(), 16.0);
    }

    #[test]
    fn knapsack_keeps_gamma_sign() {
        let q = build_knapsack(&[4.0, 4.0, 2.0], &[4.0, 3.0, 1.0], 5.0, 1.0, 1.0).unwrap();
        let d = build_circuit(&SpinHamiltonian::from_qubo(&q), CircuitOptions::default())
            .unwrap()
            .domain(3);
        assert_eq!(d.gamma, (-PI, PI));
        assert_eq!(d.reduction_factor(), 8.0);
    }

    #[test]
    fn even_pubo_is_fully_restricted() {
        let h = SpinHamiltonian::new(4, [(vec![0, 1], 0.5), (vec![0, 1, 2, 3], -1.0)], 0.0).unwrap();
        assert!(build_circuit(&h, CircuitOptions::default()).unwrap().domain(1).fully_restricted);
    }
}
