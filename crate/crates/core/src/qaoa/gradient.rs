//! Gradients of the exact energy with respect to `[β_1..β_p, γ_1..γ_p]`.
//!
//! The two-point shift rule is exact for a single gate `e^{-iθ/2 P}` with a
//! Pauli word `P`. `β_l` drives `n` such gates and `γ_l` drives one gate per
//! Hamiltonian term with angle `γ_l a_t`, so the derivative is the sum of
//! per-gate shifts:
//!
//! `∂E/∂β_l = Σ_q [E(R_x^q +π/2) - E(R_x^q -π/2)] / 2`,
//! `∂E/∂γ_l = Σ_t a_t [E(R_{Z^k}^t +π/2) - E(R_{Z^k}^t -π/2)] / 2`,
//!
//! where the extra rotation is spliced in right after the half-layer holding
//! that gate. All gates of a half-layer commute, so the position inside it
//! does not matter.

use std::f64::consts::FRAC_PI_2;

use rayon::prelude::*;

use super::{QaoaCircuitSpec, QaoaParams};
use crate::error::Result;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;

enum Shift<'a> {
    Mixer(usize),
    Term(&'a [usize]),
}

fn shifted_energy(spec: &QaoaCircuitSpec, params: &QaoaParams, layer: usize, shift: &Shift, angle: f64) -> Result<f64> {
    let state = spec.run_with(params, |l, after_mixer, s| {
        if l != layer {
            return Ok(());
        }
        match (shift, after_mixer) {
            (Shift::Mixer(q), true) => s.apply_rx(*q, angle),
            (Shift::Term(qubits), false) => s.apply_rzk(qubits, angle),
            _ => Ok(()),
        }
    })?;
    state.expectation_diagonal(spec.energies())
}

fn shift_derivative(spec: &QaoaCircuitSpec, params: &QaoaParams, layer: usize, shift: &Shift) -> Result<f64> {
    let plus = shifted_energy(spec, params, layer, shift, FRAC_PI_2)?;
    let minus = shifted_energy(spec, params, layer, shift, -FRAC_PI_2)?;
    Ok((plus - minus) / 2.0)
}

/// Exact gradient by per-gate parameter shifts (`4p` groups, `2(n + T)p` runs).
pub fn parameter_shift_gradient(spec: &QaoaCircuitSpec, params: &QaoaParams) -> Result<Vec<f64>> {
    let p = params.p();
    let terms: Vec<(&[usize], f64)> = spec
        .hamiltonian()
        .terms()
        .iter()
        .map(|(k, &a)| (k.as_slice(), a))
        .collect();
    (0..2 * p)
        .into_par_iter()
        .map(|i| {
            if i < p {
                (0..spec.n()).try_fold(0.0, |acc, q| {
                    Ok(acc + shift_derivative(spec, params, i, &Shift::Mixer(q))?)
                })
            } else {
                terms.iter().try_fold(0.0, |acc, &(idx, a)| {
                    Ok(acc + a * shift_derivative(spec, params, i - p, &Shift::Term(idx))?)
                })
            }
        })
        .collect()
}

/// Central differences with step `h`.
pub fn finite_difference_gradient(spec: &QaoaCircuitSpec, params: &QaoaParams, h: f64) -> Result<Vec<f64>> {
    let flat = params.to_flat();
    (0..flat.len())
        .into_par_iter()
        .map(|i| {
            let mut up = flat.clone();
            let mut down = flat.clone();
            up[i] += h;
            down[i] -= h;
            let e_up = spec.energy(&QaoaParams::from_flat(&up)?)?;
            let e_down = spec.energy(&QaoaParams::from_flat(&down)?)?;
            Ok((e_up - e_down) / (2.0 * h))
        })
        .collect()
}

/// `max_i |a_i - b_i| / max_i |b_i|`: error relative to the size of the
/// reference gradient. Returns the absolute error when the reference is zero.
pub fn max_relative_error(a: &[f64], reference: &[f64]) -> f64 {
    let diff = a
        .iter()
        .zip(reference)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let scale = reference.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::SpinHamiltonian;
    use crate::qaoa::{build_circuit, CircuitOptions, LayerOrder};

    fn spec(order: LayerOrder) -> QaoaCircuitSpec {
        let h = SpinHamiltonian::new(
            3,
            [(vec![0, 1], 0.7), (vec![1, 2], -1.3), (vec![0], 0.4), (vec![0, 1, 2], 0.9)],
            0.0,
        )
        .unwrap();
        build_circuit(
            &h,
            CircuitOptions {
                layer_order: order,
                ..CircuitOptions::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn shift_matches_differences() {
        for order in [LayerOrder::UfThenUi, LayerOrder::UiThenUf] {
            let s = spec(order);
            let p = QaoaParams::new(vec![0.3, -1.2], vec![0.8, 2.1]).unwrap();
            let g = parameter_shift_gradient(&s, &p).unwrap();
            let fd = finite_difference_gradient(&s, &p, FD_STEP).unwrap();
            assert!(max_relative_error(&g, &fd) < 1e-7, "{g:?} vs {fd:?}");
        }
    }

    #[test]
    fn eigenstate_gradient_vanishes() {
        // At the origin the state is |+>^n, an eigenstate of every R_x, and a
        // diagonal phase alone never changes the energy.
        let h = SpinHamiltonian::new(2, [(vec![0, 1], 1.0)], 0.0).unwrap();
        let s = build_circuit(&h, CircuitOptions::default()).unwrap();
        let g = parameter_shift_gradient(&s, &QaoaParams::zeros(1).unwrap()).unwrap();
        assert!(g.iter().all(|v| v.abs() < 1e-14), "{g:?}");
    }
}
