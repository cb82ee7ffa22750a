use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use super::{QaoaCircuitSpec, QaoaParams};
use crate::error::{Error, Result};

/// Single-layer energy on a `β x γ` grid; `values[i][j]` is at
/// `(beta_axis[i], gamma_axis[j])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LandscapeGrid {
    pub beta_axis: Vec<f64>,
    pub gamma_axis: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub problem_id: String,
    pub scaled: bool,
}

fn axis(range: (f64, f64), resolution: usize) -> Vec<f64> {
    let (lo, hi) = range;
    (0..resolution)
        .map(|i| lo + (hi - lo) * i as f64 / (resolution - 1) as f64)
        .collect()
}

/// Grid offset `s` with `axis[i + s] = axis[i] + π`, if the spacing divides `π`.
fn pi_offset(axis: &[f64]) -> Option<usize> {
    let step = axis[1] - axis[0];
    let s = (PI / step).round();
    (s >= 1.0 && (s * step - PI).abs() < 1e-9 && (s as usize) < axis.len()).then_some(s as usize)
}

/// Whether `axis[len-1-i] = -axis[i]` for all `i`.
fn mirrored(axis: &[f64]) -> bool {
    axis.iter().zip(axis.iter().rev()).all(|(a, b)| (a + b).abs() < 1e-12)
}

pub fn landscape_scan(
    spec: &QaoaCircuitSpec,
    resolution: usize,
    beta_range: (f64, f64),
    gamma_range: (f64, f64),
    problem_id: &str,
) -> Result<LandscapeGrid> {
    if resolution < 2 {
        return Err(Error::InvalidArgument("resolution must be at least 2".into()));
    }
    if !(beta_range.0 < beta_range.1 && gamma_range.0 < gamma_range.1) {
        return Err(Error::InvalidArgument("empty scan range".into()));
    }
    let beta_axis = axis(beta_range, resolution);
    let gamma_axis = axis(gamma_range, resolution);
    let values = beta_axis
        .par_iter()
        .map(|&b| {
            gamma_axis
                .iter()
                .map(|&g| spec.energy(&QaoaParams::new(vec![b], vec![g])?))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LandscapeGrid {
        beta_axis,
        gamma_axis,
        values,
        problem_id: problem_id.to_string(),
        scaled: spec.k_scale() != 1.0 || spec.hamiltonian() != spec.raw_hamiltonian(),
    })
}

impl LandscapeGrid {
    /// Header `beta\gamma,γ_1,...`, then one row `β_i,v_i1,...` per β.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("beta\\gamma");
        for g in &self.gamma_axis {
            write!(out, ",{g}").unwrap();
        }
        out.push('\n');
        for (b, row) in self.beta_axis.iter().zip(&self.values) {
            write!(out, "{b}").unwrap();
            for v in row {
                write!(out, ",{v}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    pub fn value_at_origin(&self) -> Option<f64> {
        let i = self.beta_axis.iter().position(|&b| b.abs() < 1e-12)?;
        let j = self.gamma_axis.iter().position(|&g| g.abs() < 1e-12)?;
        Some(self.values[i][j])
    }

    /// `max |v(-β, -γ) - v(β, γ)|` over the grid; `None` if the axes are not
    /// symmetric about zero.
    pub fn point_symmetry_violation(&self) -> Option<f64> {
        if !mirrored(&self.beta_axis) || !mirrored(&self.gamma_axis) {
            return None;
        }
        let (nb, ng) = (self.beta_axis.len(), self.gamma_axis.len());
        let mut worst = 0.0f64;
        for i in 0..nb {
            for j in 0..ng {
                worst = worst.max((self.values[i][j] - self.values[nb - 1 - i][ng - 1 - j]).abs());
            }
        }
        Some(worst)
    }

    /// `max |v(β + π, γ) - v(β, γ)|` over node pairs both on the grid; `None`
    /// if the β spacing does not divide `π`.
    pub fn beta_shift_violation(&self) -> Option<f64> {
        let s = pi_offset(&self.beta_axis)?;
        let mut worst = 0.0f64;
        for i in 0..self.beta_axis.len() - s {
            for (a, b) in self.values[i].iter().zip(&self.values[i + s]) {
                worst = worst.max((a - b).abs());
            }
        }
        Some(worst)
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.values.len() != other.values.len() || self.gamma_axis.len() != other.gamma_axis.len() {
            return Err(Error::DimensionMismatch("grids differ in shape".into()));
        }
        Ok(self
            .values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
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
    fn small_grid_shape_and_csv() {
        let g = landscape_scan(&square(), 2, (-PI, PI), (-PI, PI), "square").unwrap();
        assert_eq!(g.values.len(), 2);
        assert_eq!(g.values[0].len(), 2);
        let csv = g.to_csv();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("beta\\gamma,"));
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn maxcut_grid_symmetries() {
        let spec = square();
        let g = landscape_scan(&spec, 17, (-PI, PI), (-PI, PI), "square").unwrap();
        assert_eq!(g.value_at_origin().unwrap(), spec.energy(&QaoaParams::zeros(1).unwrap()).unwrap());
        assert!(g.point_symmetry_violation().unwrap() < 1e-10);
        assert!(g.beta_shift_violation().unwrap() < 1e-10);
    }

    #[test]
    fn rejects_degenerate_requests() {
        assert!(landscape_scan(&square(), 1, (-PI, PI), (-PI, PI), "x").is_err());
        assert!(landscape_scan(&square(), 3, (1.0, 1.0), (-PI, PI), "x").is_err());
    }
}
