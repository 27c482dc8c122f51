//! Circular kernel density estimation with the von Mises kernel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circkernel::{wrap, Angle, Concentration, VonMisesKernel};
use crate::error::{Error, Result};
use crate::stats;

/// A non-empty sample of angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircularSample {
    angles: Vec<Angle>,
}

impl CircularSample {
    pub fn new(angles: Vec<Angle>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(CircularSample { angles })
    }

    pub fn from_radians(raw: &[f64]) -> Result<Self> {
        let angles = raw.iter().map(|&r| wrap(r)).collect::<Result<Vec<_>>>()?;
        Self::new(angles)
    }

    pub fn angles(&self) -> &[Angle] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn radians(&self) -> Vec<f64> {
        self.angles.iter().map(|a| a.radians()).collect()
    }

    /// Rotates every observation by `delta` radians.
    pub fn rotated(&self, delta: f64) -> Result<Self> {
        let angles = self
            .angles
            .iter()
            .map(|a| a.rotate(delta))
            .collect::<Result<Vec<_>>>()?;
        Ok(CircularSample { angles })
    }
}

/// `f(theta; nu) = (1/n) sum_i K(theta - Theta_i)`.
pub fn density_estimate(sample: &CircularSample, theta: Angle, nu: Concentration) -> f64 {
    let k = VonMisesKernel::new(nu);
    estimate_with(&k, sample.angles(), theta.radians())
}

/// Derivative of the density estimate, `(1/n) sum_i K'(theta - Theta_i)`.
pub fn density_deriv(sample: &CircularSample, theta: Angle, nu: Concentration) -> f64 {
    let k = VonMisesKernel::new(nu);
    deriv_with(&k, sample.angles(), theta.radians())
}

/// Standard deviation of the derivative estimator:
/// `sqrt(s^2(K'(theta - Theta_1), ..., K'(theta - Theta_n)) / n)` where `s^2`
/// is the sample variance with the `n - 1` denominator.
pub fn density_deriv_sd(sample: &CircularSample, theta: Angle, nu: Concentration) -> Result<f64> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let k = VonMisesKernel::new(nu);
    let t = theta.radians();
    let values: Vec<f64> = sample
        .angles()
        .iter()
        .map(|a| k.deriv(t - a.radians()))
        .collect();
    Ok((stats::sample_variance(&values) / n as f64).sqrt())
}

fn estimate_with(k: &VonMisesKernel, angles: &[Angle], theta: f64) -> f64 {
    let mut sum = 0.0;
    for a in angles {
        sum += k.eval(theta - a.radians());
    }
    sum / angles.len() as f64
}

fn deriv_with(k: &VonMisesKernel, angles: &[Angle], theta: f64) -> f64 {
    let mut sum = 0.0;
    for a in angles {
        sum += k.deriv(theta - a.radians());
    }
    sum / angles.len() as f64
}

/// Density estimate over a grid of angles for a single concentration.
pub fn density_grid(sample: &CircularSample, grid: &[Angle], nu: Concentration) -> Vec<f64> {
    let k = VonMisesKernel::new(nu);
    grid.par_iter()
        .map(|t| estimate_with(&k, sample.angles(), t.radians()))
        .collect()
}

/// Derivative estimate over a grid of angles for a single concentration.
pub fn density_deriv_grid(sample: &CircularSample, grid: &[Angle], nu: Concentration) -> Vec<f64> {
    let k = VonMisesKernel::new(nu);
    grid.par_iter()
        .map(|t| deriv_with(&k, sample.angles(), t.radians()))
        .collect()
}

/// Kernel-derivative values `K'(theta_j - Theta_i)` for every grid point `j`
/// and observation `i`, row-major by grid point.
///
/// A bootstrap resample only reweights observations, so every replicate
/// statistic is a count-weighted reduction over these rows.
#[derive(Debug, Clone)]
pub struct DerivMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DerivMatrix {
    pub fn new(sample: &CircularSample, grid: &[Angle], nu: Concentration) -> Self {
        let k = VonMisesKernel::new(nu);
        let n = sample.len();
        let rows: Vec<Vec<f64>> = grid
            .par_iter()
            .map(|t| {
                let t = t.radians();
                sample
                    .angles()
                    .iter()
                    .map(|a| k.deriv(t - a.radians()))
                    .collect()
            })
            .collect();
        DerivMatrix {
            n,
            values: rows.concat(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.values.len() / self.n
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    /// Derivative estimate and its standard deviation at grid row `j` for a
    /// resample given by multiplicities `counts` (summing to `n`).
    pub fn deriv_and_sd(&self, j: usize, counts: &[f64]) -> (f64, f64) {
        let row = self.row(j);
        let n = self.n as f64;
        let mut sum = 0.0;
        for (&c, &v) in counts.iter().zip(row) {
            sum += c * v;
        }
        let var = stats::weighted_sample_variance(row, counts);
        (sum / n, (var / n).sqrt())
    }
}
