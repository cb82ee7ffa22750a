//! Fixed-step gradient descent on the exact energy.

use super::{optimize, Method, Objective, OptimizerConfig, Progress, RunRecord, Trajectory};
use crate::error::Result;
use crate::qaoa::QaoaCircuitSpec;

pub(crate) fn run(objective: &Objective, config: &OptimizerConfig, mut x: Vec<f64>) -> Result<Trajectory> {
    let lr = config.gd.learning_rate;
    let mut progress = Progress::new(x.clone(), objective.exact(&x)?, config.plateau);
    let mut trace = Vec::with_capacity(config.max_iters);
    let mut stopped = false;
    for _ in 0..config.max_iters {
        let g = objective.gradient(&x, &config.gd)?;
        for (xi, gi) in x.iter_mut().zip(&g) {
            *xi -= lr * gi;
        }
        let f = objective.exact(&x)?;
        trace.push(f);
        if progress.record(&x, f) {
            stopped = true;
            break;
        }
    }
    // The descent is not monotone; the last iterate is returned as is.
    Ok(Trajectory {
        x,
        trace,
        stopped_on_plateau: stopped,
        a0: None,
    })
}

/// [`optimize`] with gradient descent.
pub fn optimize_gd(spec: &QaoaCircuitSpec, p: usize, config: &OptimizerConfig) -> Result<RunRecord> {
    optimize(
        spec,
        p,
        &OptimizerConfig {
            method: Method::GradientDescent,
            ..config.clone()
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::SpinHamiltonian;
    use crate::optimize::GdConfig;
    use crate::qaoa::{build_circuit, landscape_scan, parameter_shift_gradient, CircuitOptions};
    use std::f64::consts::PI;

    fn single_qubit() -> QaoaCircuitSpec {
        let h = SpinHamiltonian::new(1, [(vec![0], 0.8)], 0.0).unwrap();
        build_circuit(&h, CircuitOptions::default()).unwrap()
    }

    #[test]
    fn zero_rate_freezes() {
        let cfg = OptimizerConfig {
            method: Method::GradientDescent,
            max_iters: 5,
            restarts: 1,
            gd: GdConfig {
                learning_rate: 0.0,
                ..GdConfig::default()
            },
            ..OptimizerConfig::default()
        };
        let r = optimize_gd(&single_qubit(), 1, &cfg).unwrap();
        assert_eq!(r.restarts[0].initial_params, r.restarts[0].final_params);
    }

    #[test]
    fn single_qubit_reaches_ground_energy() {
        let cfg = OptimizerConfig {
            method: Method::GradientDescent,
            max_iters: 400,
            restarts: 1,
            seed: 2,
            gd: GdConfig {
                learning_rate: 0.3,
                ..GdConfig::default()
            },
            ..OptimizerConfig::default()
        };
        let spec = single_qubit();
        let r = optimize_gd(&spec, 1, &cfg).unwrap();
        // scaled Hamiltonian is s0, ground energy -1
        let e = r.best_energy.scaled;
        assert!(e >= -1.0 - 1e-12);
        let grid = landscape_scan(&spec, 101, (-PI, PI), (-PI, PI), "s0").unwrap();
        let grid_min = grid.values.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        assert!((e - grid_min).abs() < 1e-3, "{e} vs grid {grid_min}");
        let g = parameter_shift_gradient(&spec, &r.best_params).unwrap();
        assert!(g.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-3, "{g:?}");
    }
}
