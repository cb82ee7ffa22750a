//! Classical outer loop over the QAOA angles.
//!
//! Every restart owns a ChaCha8 generator seeded with `seed` on stream
//! `restart`, used first to draw the initial angles and then for SPSA
//! perturbations and shot sampling, so a run is a pure function of
//! `(spec, config)`. Restarts run in parallel and are aggregated by index.

mod gd;
mod spsa;
mod squash;

pub use gd::optimize_gd;
pub use spsa::{calibrate_a0, optimize_spsa};
pub use squash::{init_params, sigma_2pi, sigma_pi, squash_jacobian, squash_params, unsquash_params, Squash};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::format_bits;
use crate::qaoa::{
    decode_assignment, finite_difference_gradient, parameter_shift_gradient, EnergyReport, ParamDomain,
    QaoaCircuitSpec, QaoaParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    #[default]
    Spsa,
    GradientDescent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GradientMethod {
    /// Exact per-gate parameter shifts.
    #[default]
    ParameterShift,
    /// Central differences with `GdConfig::fd_step`.
    FiniteDifference,
}

/// SPSA gains `a_k = a0 / (A + k + 1)^alpha` and `c_k = c0 / (k + 1)^gamma_decay`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpsaConfig {
    /// Calibrated from `calibration_probes` gradient probes when absent.
    pub a0: Option<f64>,
    pub c0: f64,
    /// Defaults to a tenth of `max_iters` when absent.
    pub big_a: Option<f64>,
    pub alpha: f64,
    pub gamma_decay: f64,
    /// Size of the first step the calibration aims for.
    pub target_step: f64,
    pub calibration_probes: usize,
}

impl Default for SpsaConfig {
    fn default() -> Self {
        Self {
            a0: None,
            c0: 0.2,
            big_a: None,
            alpha: 0.602,
            gamma_decay: 0.101,
            target_step: 2.0 * std::f64::consts::PI / 10.0,
            calibration_probes: 25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GdConfig {
    pub learning_rate: f64,
    pub gradient: GradientMethod,
    pub fd_step: f64,
}

impl Default for GdConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            gradient: GradientMethod::default(),
            fd_step: crate::qaoa::FD_STEP,
        }
    }
}

/// Stop when the best energy improved by less than `rel_tol * |best|` over
/// the last `window` iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub window: usize,
    pub rel_tol: f64,
}

impl Default for Plateau {
    fn default() -> Self {
        Self {
            window: 50,
            rel_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub method: Method,
    pub max_iters: usize,
    pub restarts: usize,
    pub seed: u64,
    pub spsa: SpsaConfig,
    pub gd: GdConfig,
    pub squash: Squash,
    /// 0 for exact expectations.
    pub shots: u64,
    pub plateau: Option<Plateau>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            method: Method::Spsa,
            max_iters: 2000,
            restarts: 10,
            seed: 0,
            spsa: SpsaConfig::default(),
            gd: GdConfig::default(),
            squash: Squash::None,
            shots: 0,
            plateau: None,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("need at least one restart".into()));
        }
        let s = &self.spsa;
        let positive = [s.c0, s.alpha, s.gamma_decay, s.target_step, self.gd.fd_step];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0))
            || s.a0.is_some_and(|a| !(a.is_finite() && a > 0.0))
            || s.big_a.is_some_and(|a| !(a.is_finite() && a >= 0.0))
        {
            return Err(Error::InvalidArgument("optimizer gains must be positive".into()));
        }
        if !(self.gd.learning_rate.is_finite() && self.gd.learning_rate >= 0.0) {
            return Err(Error::InvalidArgument("learning rate must be non-negative".into()));
        }
        if self.method == Method::GradientDescent && self.shots != 0 {
            return Err(Error::InvalidArgument(
                "gradient descent needs exact expectations (shots = 0)".into(),
            ));
        }
        Ok(())
    }
}

/// One outcome of the final state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    /// Measured basis index.
    pub z: u64,
    /// Measured bits, qubit 0 right-most.
    pub bits: String,
    /// Decoded binary assignment, variable 0 right-most.
    pub assignment: String,
    pub probability: f64,
    /// Shot count, absent in exact mode.
    pub count: Option<u64>,
    /// Objective value of the assignment in problem units.
    pub objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartRecord {
    pub restart: usize,
    pub initial_params: QaoaParams,
    pub final_params: QaoaParams,
    /// Exact scaled energy at the initial angles.
    pub initial_energy: f64,
    /// Exact scaled energy at the returned angles.
    pub final_energy: f64,
    /// Energy seen by the optimizer after each iteration.
    pub trace: Vec<f64>,
    pub stopped_on_plateau: bool,
    /// SPSA step gain actually used.
    pub a0: Option<f64>,
    /// Most likely (exact) or most frequent (shots) outcome, lowest index on ties.
    pub argmax: Outcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: OptimizerConfig,
    pub p: usize,
    pub domain: ParamDomain,
    pub restarts: Vec<RestartRecord>,
    pub best_restart: usize,
    pub best_params: QaoaParams,
    pub best_energy: EnergyReport,
    /// Outcome with the highest probability or count in the best restart.
    pub best: Outcome,
    /// Final-state outcomes of the best restart, most likely first; at most
    /// [`MAX_REPORTED_OUTCOMES`] entries.
    pub histogram: Vec<Outcome>,
}

pub const MAX_REPORTED_OUTCOMES: usize = 4096;

/// Energy as a function of the optimizer's coordinates.
pub(crate) struct Objective<'a> {
    pub spec: &'a QaoaCircuitSpec,
    pub squash: Squash,
    pub full: bool,
    pub shots: u64,
}

impl Objective<'_> {
    pub fn params(&self, x: &[f64]) -> Result<QaoaParams> {
        match self.squash {
            Squash::None => QaoaParams::from_flat(x),
            Squash::Tanh => squash_params(x, self.full),
        }
    }

    pub fn to_coords(&self, params: &QaoaParams) -> Vec<f64> {
        match self.squash {
            Squash::None => params.to_flat(),
            Squash::Tanh => unsquash_params(params, self.full),
        }
    }

    pub fn exact(&self, x: &[f64]) -> Result<f64> {
        let e = self.spec.energy(&self.params(x)?)?;
        if e.is_finite() {
            Ok(e)
        } else {
            Err(Error::Divergence(format!("energy is {e} at {x:?}")))
        }
    }

    /// Exact energy, or a shot estimate seeded from `rng`.
    pub fn value(&self, x: &[f64], rng: &mut ChaCha8Rng) -> Result<f64> {
        if self.shots == 0 {
            return self.exact(x);
        }
        let est = self.spec.shot_energy(&self.params(x)?, self.shots, rng.next_u64())?;
        if est.mean.is_finite() {
            Ok(est.mean)
        } else {
            Err(Error::Divergence(format!("energy estimate is {} at {x:?}", est.mean)))
        }
    }

    pub fn gradient(&self, x: &[f64], gd: &GdConfig) -> Result<Vec<f64>> {
        let params = self.params(x)?;
        let mut g = match gd.gradient {
            GradientMethod::ParameterShift => parameter_shift_gradient(self.spec, &params)?,
            GradientMethod::FiniteDifference => finite_difference_gradient(self.spec, &params, gd.fd_step)?,
        };
        if self.squash == Squash::Tanh {
            for (gi, j) in g.iter_mut().zip(squash_jacobian(x, self.full)) {
                *gi *= j;
            }
        }
        if g.iter().all(|v| v.is_finite()) {
            Ok(g)
        } else {
            Err(Error::Divergence(format!("gradient is {g:?} at {x:?}")))
        }
    }
}

/// Result of one optimizer run in its own coordinates.
pub(crate) struct Trajectory {
    pub x: Vec<f64>,
    pub trace: Vec<f64>,
    pub stopped_on_plateau: bool,
    pub a0: Option<f64>,
}

/// Tracks the best iterate and the plateau rule.
pub(crate) struct Progress {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    best_history: Vec<f64>,
    plateau: Option<Plateau>,
}

impl Progress {
    pub fn new(x: Vec<f64>, f: f64, plateau: Option<Plateau>) -> Self {
        Self {
            best_x: x,
            best_f: f,
            best_history: vec![f],
            plateau,
        }
    }

    /// Records an iterate; returns true when the plateau rule fires.
    pub fn record(&mut self, x: &[f64], f: f64) -> bool {
        if f < self.best_f {
            self.best_f = f;
            self.best_x = x.to_vec();
        }
        self.best_history.push(self.best_f);
        match self.plateau {
            Some(p) if self.best_history.len() > p.window => {
                let old = self.best_history[self.best_history.len() - 1 - p.window];
                old - self.best_f <= p.rel_tol * self.best_f.abs().max(f64::MIN_POSITIVE)
            }
            _ => false,
        }
    }
}

pub(crate) fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

fn outcome(spec: &QaoaCircuitSpec, z: u64, probability: f64, count: Option<u64>) -> Outcome {
    let n = spec.n();
    Outcome {
        z,
        bits: format_bits(z, n),
        assignment: format_bits(decode_assignment(z, n), n),
        probability,
        count,
        objective: spec.objective_of_measurement(z),
    }
}

/// Outcomes of the state at `params`, most likely first (ties: lowest index).
/// With `shots > 0` they come from a sampled histogram, otherwise from the
/// exact probabilities.
fn final_outcomes(spec: &QaoaCircuitSpec, params: &QaoaParams, shots: u64, rng: &mut ChaCha8Rng) -> Result<Vec<Outcome>> {
    let state = spec.run(params)?;
    let mut out: Vec<Outcome> = if shots == 0 {
        state
            .probabilities()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(z, &p)| outcome(spec, z as u64, p, None))
            .collect()
    } else {
        state
            .sample(shots, rng.next_u64())?
            .into_iter()
            .map(|(z, c)| outcome(spec, z, c as f64 / shots as f64, Some(c)))
            .collect()
    };
    out.sort_by(|a, b| {
        let (ka, kb) = (a.count.unwrap_or(0), b.count.unwrap_or(0));
        kb.cmp(&ka)
            .then(b.probability.total_cmp(&a.probability))
            .then(a.z.cmp(&b.z))
    });
    out.truncate(MAX_REPORTED_OUTCOMES);
    Ok(out)
}

/// Runs one restart from `initial` (angles), returning its record and final outcomes.
fn run_restart(
    spec: &QaoaCircuitSpec,
    config: &OptimizerConfig,
    domain: &ParamDomain,
    restart: usize,
    initial: Option<&QaoaParams>,
) -> Result<(RestartRecord, Vec<Outcome>)> {
    let mut rng = restart_rng(config.seed, restart);
    let initial_params = match initial {
        Some(p) => p.clone(),
        None => init_params(&mut rng, domain),
    };
    let objective = Objective {
        spec,
        squash: config.squash,
        full: domain.fully_restricted,
        shots: config.shots,
    };
    let x0 = objective.to_coords(&initial_params);
    let traj = match config.method {
        Method::Spsa => spsa::run(&objective, config, x0, &mut rng)?,
        Method::GradientDescent => gd::run(&objective, config, x0)?,
    };
    let final_params = objective.params(&traj.x)?;
    let initial_energy = spec.energy(&initial_params)?;
    let final_energy = spec.energy(&final_params)?;
    let outcomes = final_outcomes(spec, &final_params, config.shots, &mut rng)?;
    let record = RestartRecord {
        restart,
        initial_params,
        final_params,
        initial_energy,
        final_energy,
        trace: traj.trace,
        stopped_on_plateau: traj.stopped_on_plateau,
        a0: traj.a0,
        argmax: outcomes[0].clone(),
    };
    Ok((record, outcomes))
}

/// Optimizes `p`-layer angles with `config.restarts` random starts.
pub fn optimize(spec: &QaoaCircuitSpec, p: usize, config: &OptimizerConfig) -> Result<RunRecord> {
    optimize_impl(spec, p, config, None)
}

/// Single run starting at `initial` instead of a random draw.
pub fn optimize_from(spec: &QaoaCircuitSpec, initial: &QaoaParams, config: &OptimizerConfig) -> Result<RunRecord> {
    let config = OptimizerConfig {
        restarts: 1,
        ..config.clone()
    };
    optimize_impl(spec, initial.p(), &config, Some(initial))
}

fn optimize_impl(
    spec: &QaoaCircuitSpec,
    p: usize,
    config: &OptimizerConfig,
    initial: Option<&QaoaParams>,
) -> Result<RunRecord> {
    config.validate()?;
    if p == 0 {
        return Err(Error::InvalidArgument("need at least one layer".into()));
    }
    let domain = spec.domain(p);
    let runs: Vec<(RestartRecord, Vec<Outcome>)> = (0..config.restarts)
        .into_par_iter()
        .map(|r| run_restart(spec, config, &domain, r, initial))
        .collect::<Result<_>>()?;
    let best_restart = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.final_energy.total_cmp(&b.1 .0.final_energy).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let (restarts, mut outcomes): (Vec<RestartRecord>, Vec<Vec<Outcome>>) = runs.into_iter().unzip();
    let best = &restarts[best_restart];
    Ok(RunRecord {
        config: config.clone(),
        p,
        domain,
        best_params: best.final_params.clone(),
        best_energy: spec.report(best.final_energy),
        best: best.argmax.clone(),
        histogram: std::mem::take(&mut outcomes[best_restart]),
        best_restart,
        restarts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::SpinHamiltonian;
    use crate::model::build_maxcut;
    use crate::qaoa::{build_circuit, CircuitOptions};

    fn square() -> QaoaCircuitSpec {
        let h = SpinHamiltonian::from_qubo(&build_maxcut(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap());
        build_circuit(&h, CircuitOptions::default()).unwrap()
    }

    #[test]
    fn deterministic_and_best_of() {
        let cfg = OptimizerConfig {
            max_iters: 60,
            restarts: 3,
            seed: 11,
            ..OptimizerConfig::default()
        };
        let spec = square();
        let a = optimize(&spec, 2, &cfg).unwrap();
        let b = optimize(&spec, 2, &cfg).unwrap();
        assert_eq!(a, b);
        let min = a.restarts.iter().map(|r| r.final_energy).fold(f64::INFINITY, f64::min);
        assert_eq!(a.best_energy.scaled, min);
        assert!(a.restarts.iter().all(|r| r.trace.len() <= 60));
    }

    #[test]
    fn zero_iterations_keep_initial_params() {
        let cfg = OptimizerConfig {
            max_iters: 0,
            restarts: 2,
            ..OptimizerConfig::default()
        };
        let r = optimize(&square(), 1, &cfg).unwrap();
        for rr in &r.restarts {
            assert_eq!(rr.initial_params, rr.final_params);
            assert!(rr.trace.is_empty());
        }
    }

    #[test]
    fn restarts_differ() {
        let cfg = OptimizerConfig {
            max_iters: 0,
            restarts: 2,
            ..OptimizerConfig::default()
        };
        let r = optimize(&square(), 2, &cfg).unwrap();
        assert_ne!(r.restarts[0].initial_params, r.restarts[1].initial_params);
    }

    #[test]
    fn outcomes_sorted_with_lowest_index_ties() {
        // Uniform state: all outcomes tie, so the lowest index comes first.
        let spec = square();
        let mut rng = restart_rng(0, 0);
        let out = final_outcomes(&spec, &QaoaParams::zeros(1).unwrap(), 0, &mut rng).unwrap();
        assert_eq!(out.len(), 16);
        assert!(out.windows(2).all(|w| w[0].z < w[1].z));
    }

    #[test]
    fn plateau_rule() {
        let mut p = Progress::new(vec![0.0], 1.0, Some(Plateau { window: 2, rel_tol: 1e-6 }));
        assert!(!p.record(&[0.0], 0.5));
        assert!(!p.record(&[0.0], 0.4));
        assert!(!p.record(&[0.0], 0.4));
        assert!(p.record(&[0.0], 0.4));
    }

    #[test]
    fn gd_rejects_shots() {
        let cfg = OptimizerConfig {
            method: Method::GradientDescent,
            shots: 100,
            ..OptimizerConfig::default()
        };
        assert!(optimize(&square(), 1, &cfg).is_err());
    }
}
