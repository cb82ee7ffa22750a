//! QAOA circuits on diagonal spin Hamiltonians.
//!
//! A layer with angles `(β, γ)` applies `U_f(γ) = Π_t R_{Z^k}(γ a_t)` over the
//! (scaled) Hamiltonian terms and `U_i(β) = Π_q R_x(β)` on every qubit, by
//! default in that order. The circuit starts from `|+>^n` and applies layers
//! `1..=p` in time order.
//!
//! A measured basis index `z` maps back to the binary assignment
//! `x = NOT z` because bit 0 carries spin `+1`, i.e. `x = 1`; see
//! [`decode_assignment`].

mod domain;
mod gradient;
mod landscape;

pub use domain::{restricted_domain, ParamDomain};
pub use gradient::{finite_difference_gradient, max_relative_error, parameter_shift_gradient, FD_STEP};
pub use landscape::{landscape_scan, LandscapeGrid};

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Error, Result};
use crate::ising::SpinHamiltonian;
use crate::sim::{Histogram, StateVector, MAX_QUBITS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl QaoaParams {
    pub fn new(beta: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if beta.is_empty() || beta.len() != gamma.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} betas and {} gammas",
                beta.len(),
                gamma.len()
            )));
        }
        check_finite(beta.iter().chain(&gamma).copied(), "QAOA angles")?;
        Ok(Self { beta, gamma })
    }

    pub fn zeros(p: usize) -> Result<Self> {
        Self::new(vec![0.0; p], vec![0.0; p])
    }

    /// From `[β_1..β_p, γ_1..γ_p]`.
    pub fn from_flat(flat: &[f64]) -> Result<Self> {
        if flat.len() % 2 != 0 {
            return Err(Error::DimensionMismatch(format!(
                "odd parameter vector length {}",
                flat.len()
            )));
        }
        let p = flat.len() / 2;
        Self::new(flat[..p].to_vec(), flat[p..].to_vec())
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.beta.iter().chain(&self.gamma).copied().collect()
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    pub fn negated(&self) -> Self {
        Self {
            beta: self.beta.iter().map(|v| -v).collect(),
            gamma: self.gamma.iter().map(|v| -v).collect(),
        }
    }

    /// Appends a layer with `β = γ = 0`.
    pub fn with_zero_layer(&self) -> Self {
        let mut out = self.clone();
        out.beta.push(0.0);
        out.gamma.push(0.0);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LayerOrder {
    #[default]
    UfThenUi,
    UiThenUf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Execution {
    /// `U_f` as one diagonal phase from the precomputed spectrum.
    #[default]
    FastDiagonal,
    /// `U_f` as `R_z`, CNOT-`R_z`-CNOT and CNOT-ladder gates per term.
    GateDecomposed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitOptions {
    /// Divide the Hamiltonian by its largest absolute coefficient.
    pub scale: bool,
    pub layer_order: LayerOrder,
    pub execution: Execution,
}

impl Default for CircuitOptions {
    fn default() -> Self {
        Self {
            scale: true,
            layer_order: LayerOrder::default(),
            execution: Execution::default(),
        }
    }
}

/// Energies in the three units a run reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `<H_f>` of the Hamiltonian the circuit uses.
    pub scaled: f64,
    /// `scaled * k_scale`.
    pub unscaled: f64,
    /// `unscaled + dropped constant`: the expected objective value.
    pub objective: f64,
}

/// Sample-mean estimate of the energy.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotEstimate {
    pub mean: f64,
    /// Standard error from the sample variance.
    pub stderr: f64,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QaoaCircuitSpec {
    raw: SpinHamiltonian,
    hamiltonian: SpinHamiltonian,
    k_scale: f64,
    layer_order: LayerOrder,
    execution: Execution,
    energies: Vec<f64>,
}

/// Binary assignment index for measured basis index `z`.
pub fn decode_assignment(z: u64, n: usize) -> u64 {
    !z & ((1u64 << n) - 1)
}

/// Basis index whose measurement decodes to assignment `x`.
pub fn encode_assignment(x: u64, n: usize) -> u64 {
    decode_assignment(x, n)
}

pub fn build_circuit(h_raw: &SpinHamiltonian, options: CircuitOptions) -> Result<QaoaCircuitSpec> {
    if h_raw.n() > MAX_QUBITS {
        return Err(Error::TooLarge {
            size: h_raw.n(),
            cap: MAX_QUBITS,
        });
    }
    let k = h_raw.scaling_factor()?;
    let (hamiltonian, k_scale) = if options.scale {
        (h_raw.scaled(k)?, k)
    } else {
        (h_raw.clone(), 1.0)
    };
    let energies = hamiltonian.diagonalize()?;
    Ok(QaoaCircuitSpec {
        raw: h_raw.clone(),
        hamiltonian,
        k_scale,
        layer_order: options.layer_order,
        execution: options.execution,
        energies,
    })
}

impl QaoaCircuitSpec {
    pub fn n(&self) -> usize {
        self.hamiltonian.n()
    }

    /// Hamiltonian used by the circuit (scaled unless disabled).
    pub fn hamiltonian(&self) -> &SpinHamiltonian {
        &self.hamiltonian
    }

    pub fn raw_hamiltonian(&self) -> &SpinHamiltonian {
        &self.raw
    }

    pub fn k_scale(&self) -> f64 {
        self.k_scale
    }

    pub fn layer_order(&self) -> LayerOrder {
        self.layer_order
    }

    pub fn execution(&self) -> Execution {
        self.execution
    }

    /// Diagonal of the circuit Hamiltonian.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn with_execution(&self, execution: Execution) -> Self {
        Self {
            execution,
            ..self.clone()
        }
    }

    pub fn with_layer_order(&self, layer_order: LayerOrder) -> Self {
        Self {
            layer_order,
            ..self.clone()
        }
    }

    pub fn domain(&self, p: usize) -> ParamDomain {
        restricted_domain(self, p)
    }

    pub(crate) fn apply_cost(&self, state: &mut StateVector, gamma: f64) -> Result<()> {
        match self.execution {
            Execution::FastDiagonal => state.apply_diagonal_phase(&self.energies, gamma),
            Execution::GateDecomposed => {
                for (idx, &a) in self.hamiltonian.terms() {
                    let theta = gamma * a;
                    match idx.as_slice() {
                        [q] => state.apply_rz(*q, theta)?,
                        [i, j] => state.apply_rzz_decomposed(*i, *j, theta)?,
                        qubits => state.apply_rzk_ladder(qubits, theta)?,
                    }
                }
                Ok(())
            }
        }
    }

    pub(crate) fn apply_mixer(&self, state: &mut StateVector, beta: f64) -> Result<()> {
        for q in 0..self.n() {
            state.apply_rx(q, beta)?;
        }
        Ok(())
    }

    /// Runs the circuit, calling `hook(layer, after_mixer, state)` after each
    /// half-layer. Used by the gradient to splice in shifted gates.
    pub(crate) fn run_with(
        &self,
        params: &QaoaParams,
        mut hook: impl FnMut(usize, bool, &mut StateVector) -> Result<()>,
    ) -> Result<StateVector> {
        let mut state = StateVector::plus(self.n())?;
        for l in 0..params.p() {
            let (b, g) = (params.beta[l], params.gamma[l]);
            match self.layer_order {
                LayerOrder::UfThenUi => {
                    self.apply_cost(&mut state, g)?;
                    hook(l, false, &mut state)?;
                    self.apply_mixer(&mut state, b)?;
                    hook(l, true, &mut state)?;
                }
                LayerOrder::UiThenUf => {
                    self.apply_mixer(&mut state, b)?;
                    hook(l, true, &mut state)?;
                    self.apply_cost(&mut state, g)?;
                    hook(l, false, &mut state)?;
                }
            }
        }
        Ok(state)
    }

    pub fn run(&self, params: &QaoaParams) -> Result<StateVector> {
        self.run_with(params, |_, _, _| Ok(()))
    }

    /// Exact `<H_f>` on the circuit Hamiltonian.
    pub fn energy(&self, params: &QaoaParams) -> Result<f64> {
        self.run(params)?.expectation_diagonal(&self.energies)
    }

    pub fn report(&self, scaled: f64) -> EnergyReport {
        let unscaled = scaled * self.k_scale;
        EnergyReport {
            scaled,
            unscaled,
            objective: unscaled + self.raw.constant(),
        }
    }

    pub fn energy_report(&self, params: &QaoaParams) -> Result<EnergyReport> {
        Ok(self.report(self.energy(params)?))
    }

    /// Objective value of measured basis index `z` in problem units.
    pub fn objective_of_measurement(&self, z: u64) -> f64 {
        self.energies[z as usize] * self.k_scale + self.raw.constant()
    }

    /// Monte-Carlo energy from `shots` samples of the final state.
    pub fn shot_energy(&self, params: &QaoaParams, shots: u64, seed: u64) -> Result<ShotEstimate> {
        let state = self.run(params)?;
        let histogram = state.sample(shots, seed)?;
        let total = shots as f64;
        let mut mean = 0.0;
        for (&z, &c) in &histogram {
            mean += self.energies[z as usize] * c as f64;
        }
        mean /= total;
        let mut var = 0.0;
        for (&z, &c) in &histogram {
            var += (self.energies[z as usize] - mean).powi(2) * c as f64;
        }
        let stderr = if shots > 1 {
            (var / (total - 1.0) / total).sqrt()
        } else {
            f64::INFINITY
        };
        Ok(ShotEstimate {
            mean,
            stderr,
            histogram,
        })
    }
}
