//! Bounded reparametrization of the angles and random initialization.

use std::f64::consts::PI;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, Result};
use crate::qaoa::{ParamDomain, QaoaParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Squash {
    /// Optimize the angles directly.
    #[default]
    None,
    /// Optimize unbounded variables mapped through `σ_π` / `σ_2π`.
    Tanh,
}

/// `σ_π(x) = π/2 (tanh x + 1)`, onto `(0, π)`.
pub fn sigma_pi(x: f64) -> f64 {
    PI / 2.0 * (x.tanh() + 1.0)
}

/// `σ_2π(x) = π tanh x`, onto `(-π, π)`.
pub fn sigma_2pi(x: f64) -> f64 {
    PI * x.tanh()
}

fn d_sigma_pi(x: f64) -> f64 {
    PI / 2.0 / x.cosh().powi(2)
}

fn d_sigma_2pi(x: f64) -> f64 {
    PI / x.cosh().powi(2)
}

// Keeps inverse images finite at the closed ends of the box.
const EDGE: f64 = 1e-12;

fn inv_sigma_pi(v: f64) -> f64 {
    (2.0 * v / PI - 1.0).clamp(-1.0 + EDGE, 1.0 - EDGE).atanh()
}

fn inv_sigma_2pi(v: f64) -> f64 {
    (v / PI).clamp(-1.0 + EDGE, 1.0 - EDGE).atanh()
}

/// Maps `[u_β..., u_γ...]` to angles: `σ_π` on every `β`, and on `γ` either
/// `σ_π` (fully restricted domain) or `σ_2π`.
pub fn squash_params(raw: &[f64], fully_restricted: bool) -> Result<QaoaParams> {
    check_finite(raw.iter().copied(), "raw parameters")?;
    let p = raw.len() / 2;
    let beta = raw[..p].iter().map(|&x| sigma_pi(x)).collect();
    let gamma = raw[p..]
        .iter()
        .map(|&x| if fully_restricted { sigma_pi(x) } else { sigma_2pi(x) })
        .collect();
    QaoaParams::new(beta, gamma)
}

/// Inverse of [`squash_params`], clamped just inside the open image.
pub fn unsquash_params(params: &QaoaParams, fully_restricted: bool) -> Vec<f64> {
    params
        .beta
        .iter()
        .map(|&b| inv_sigma_pi(b))
        .chain(params.gamma.iter().map(|&g| {
            if fully_restricted {
                inv_sigma_pi(g)
            } else {
                inv_sigma_2pi(g)
            }
        }))
        .collect()
}

/// `d angle_i / d raw_i` for the chain rule.
pub fn squash_jacobian(raw: &[f64], fully_restricted: bool) -> Vec<f64> {
    let p = raw.len() / 2;
    raw.iter()
        .enumerate()
        .map(|(i, &x)| {
            if i < p || fully_restricted {
                d_sigma_pi(x)
            } else {
                d_sigma_2pi(x)
            }
        })
        .collect()
}

/// Uniform draws inside the domain box.
pub fn init_params(rng: &mut ChaCha8Rng, domain: &ParamDomain) -> QaoaParams {
    let p = domain.p;
    let beta: Vec<f64> = (0..p).map(|_| rng.random_range(domain.beta.0..domain.beta.1)).collect();
    let gamma: Vec<f64> = (0..p).map(|_| rng.random_range(domain.gamma.0..domain.gamma.1)).collect();
    QaoaParams::new(beta, gamma).expect("draws are finite")
}
