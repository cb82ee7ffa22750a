//! First-order Trotterization of the interpolating evolution
//! `H(t) = (1 - t) H_i + t H_f`, `t ∈ [0, 1]`, with `H_i = -Σ σ_x`.
//!
//! The product `X_p ... X_1`, `X_k = e^{-i(1-t_k)Δt H_i} e^{-i t_k Δt H_f}`,
//! `Δt = 1/p`, `t_k = kΔt`, is assembled with the statevector kernels. The
//! reference is a fine time-ordered product of exact exponentials of `H(t)`
//! sampled at slice midpoints, built from dense Pauli matrices.

use super::dense::{expm_hermitian, kernel_unitary, mixer_hamiltonian, spectral_norm, spin_operator, CMatrix};
use crate::error::{Error, Result};
use crate::ising::SpinHamiltonian;

pub const TROTTER_MAX_QUBITS: usize = 8;
pub const DEFAULT_REFERENCE_STEPS: usize = 4096;

fn check(h: &SpinHamiltonian, steps: usize) -> Result<()> {
    if h.n() > TROTTER_MAX_QUBITS {
        return Err(Error::TooLarge {
            size: h.n(),
            cap: TROTTER_MAX_QUBITS,
        });
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("need at least one time step".into()));
    }
    Ok(())
}

/// `X_p ... X_1` as a dense unitary.
pub fn trotter_product(h: &SpinHamiltonian, p: usize) -> Result<CMatrix> {
    check(h, p)?;
    let energies = h.diagonalize()?;
    let dt = 1.0 / p as f64;
    kernel_unitary(h.n(), |s| {
        for k in 1..=p {
            let t = k as f64 * dt;
            // e^{-i tΔt H_f}: diagonal phase with γ/2 = tΔt
            s.apply_diagonal_phase(&energies, 2.0 * t * dt)?;
            // e^{-i(1-t)Δt H_i} = Π_q e^{+i(1-t)Δt σ_x} = Π_q R_x(-2(1-t)Δt)
            for q in 0..h.n() {
                s.apply_rx(q, -2.0 * (1.0 - t) * dt)?;
            }
        }
        Ok(())
    })
}

/// Time-ordered product of `exp(-i δ H(t_j + δ/2))` over `steps` slices.
pub fn trotter_reference(h: &SpinHamiltonian, steps: usize) -> Result<CMatrix> {
    check(h, steps)?;
    let hi = mixer_hamiltonian(h.n());
    let hf = spin_operator(h);
    let dim = 1usize << h.n();
    let delta = 1.0 / steps as f64;
    let mut u = CMatrix::identity(dim, dim);
    for j in 0..steps {
        let t = (j as f64 + 0.5) * delta;
        let ht = &hi * (1.0 - t) + &hf * t;
        u = expm_hermitian(&ht, delta) * u;
    }
    Ok(u)
}

/// Spectral-norm distance between the `p`-step product and the reference.
pub fn trotter_error(h: &SpinHamiltonian, p: usize, steps_exact: usize) -> Result<f64> {
    let approx = trotter_product(h, p)?;
    let exact = trotter_reference(h, steps_exact)?;
    Ok(spectral_norm(&(approx - exact)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commuting_case_is_a_riemann_sum_error() {
        // With H_f = 0 every factor commutes and the only error is
        // Σ_k (1 - t_k)Δt = (p - 1)/(2p) against ∫(1 - t)dt = 1/2, a phase
        // mismatch of 1/(2p) per unit mixer eigenvalue (max n).
        let n = 2;
        let h = SpinHamiltonian::new(n, [], 0.0).unwrap();
        for p in [1, 4, 16] {
            let err = trotter_error(&h, p, 64).unwrap();
            let want = 2.0 * (n as f64 / (4.0 * p as f64)).sin();
            assert!((err - want).abs() < 1e-10, "p={p}: {err} vs {want}");
        }
    }

    #[test]
    fn error_shrinks_with_p() {
        let h = SpinHamiltonian::new(2, [(vec![0, 1], 0.8), (vec![0], -0.3)], 0.0).unwrap();
        let e4 = trotter_error(&h, 4, 512).unwrap();
        let e8 = trotter_error(&h, 8, 512).unwrap();
        assert!(e8 < e4);
    }

    #[test]
    fn rejects_large_registers() {
        let h = SpinHamiltonian::new(9, [(vec![0], 1.0)], 0.0).unwrap();
        assert!(trotter_error(&h, 2, 8).is_err());
    }
}
