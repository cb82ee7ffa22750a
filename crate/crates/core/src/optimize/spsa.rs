//! Simultaneous perturbation stochastic approximation.
//!
//! Each step draws a Rademacher vector `Δ`, evaluates the energy at
//! `x ± c_k Δ`, and moves by `-a_k ĝ` with `ĝ_i = (y+ - y-) / (2 c_k Δ_i)`.
//! In exact mode the returned point is the best iterate seen; with shots,
//! where iterate values are noisy, it is the last one.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{optimize, Method, Objective, OptimizerConfig, Progress, RunRecord, Trajectory};
use crate::error::Result;
use crate::qaoa::QaoaCircuitSpec;

fn rademacher(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
}

fn shifted(x: &[f64], delta: &[f64], c: f64) -> Vec<f64> {
    x.iter().zip(delta).map(|(xi, di)| xi + c * di).collect()
}

/// Step gain that makes the first update about `target_step` long in
/// Euclidean norm, from the mean gradient-estimate magnitude over
/// `calibration_probes` probes at `x`.
pub fn calibrate_a0(
    objective_at: &mut dyn FnMut(&[f64], &mut ChaCha8Rng) -> Result<f64>,
    x: &[f64],
    config: &OptimizerConfig,
    big_a: f64,
    rng: &mut ChaCha8Rng,
) -> Result<f64> {
    let s = &config.spsa;
    let probes = s.calibration_probes.max(1);
    let mut magnitude = 0.0;
    for _ in 0..probes {
        let delta = rademacher(rng, x.len());
        let up = objective_at(&shifted(x, &delta, s.c0), rng)?;
        let down = objective_at(&shifted(x, &delta, -s.c0), rng)?;
        magnitude += ((up - down) / (2.0 * s.c0)).abs();
    }
    magnitude /= probes as f64;
    // Every coordinate moves by a_0 |ĝ|, so the norm picks up sqrt(d).
    let scale = (big_a + 1.0).powf(s.alpha) / (x.len().max(1) as f64).sqrt();
    Ok(if magnitude > 0.0 {
        s.target_step * scale / magnitude
    } else {
        s.target_step * scale
    })
}

pub(crate) fn run(objective: &Objective, config: &OptimizerConfig, mut x: Vec<f64>, rng: &mut ChaCha8Rng) -> Result<Trajectory> {
    let s = &config.spsa;
    let big_a = s.big_a.unwrap_or(0.1 * config.max_iters as f64);
    let a0 = match s.a0 {
        Some(a) => a,
        None => calibrate_a0(&mut |p, r| objective.value(p, r), &x, config, big_a, rng)?,
    };
    let exact = objective.shots == 0;
    let mut progress = Progress::new(x.clone(), objective.value(&x, rng)?, config.plateau);
    let mut trace = Vec::with_capacity(config.max_iters);
    let mut stopped = false;
    for k in 0..config.max_iters {
        let ak = a0 / (big_a + k as f64 + 1.0).powf(s.alpha);
        let ck = s.c0 / (k as f64 + 1.0).powf(s.gamma_decay);
        let delta = rademacher(rng, x.len());
        let up = objective.value(&shifted(&x, &delta, ck), rng)?;
        let down = objective.value(&shifted(&x, &delta, -ck), rng)?;
        let diff = (up - down) / (2.0 * ck);
        for (xi, di) in x.iter_mut().zip(&delta) {
            *xi -= ak * diff / di;
        }
        let f = objective.value(&x, rng)?;
        trace.push(f);
        if progress.record(&x, f) {
            stopped = true;
            break;
        }
    }
    Ok(Trajectory {
        x: if exact { progress.best_x } else { x },
        trace,
        stopped_on_plateau: stopped,
        a0: Some(a0),
    })
}

/// [`optimize`] with SPSA.
pub fn optimize_spsa(spec: &QaoaCircuitSpec, p: usize, config: &OptimizerConfig) -> Result<RunRecord> {
    optimize(
        spec,
        p,
        &OptimizerConfig {
            method: Method::Spsa,
            ..config.clone()
        },
    )
}
