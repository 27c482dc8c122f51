//! Local linear regression with a circular covariate and a linear response.
//!
//! At each evaluation angle `theta` the fit minimizes
//!
//! ```text
//! sum_i K(theta - Theta_i) [Y_i - (a + b sin(theta - Theta_i))]^2
//! ```
//!
//! giving the level estimate `a` and the coefficient `b`. Near `theta`,
//! `sin(theta - Theta_i) ~ -(Theta_i - theta)`, so the derivative of the
//! smoothed curve is estimated by `-b`.
//!
//! Kernel weights enter only through ratios, so the unnormalized weight
//! `K(u)/K(0)` is used throughout. Responses are centered on their midrange
//! before accumulation; this leaves `b` unchanged and makes a constant
//! response produce an exactly zero slope.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circkernel::{wrap, Angle, Concentration, VonMisesKernel};
use crate::error::{Error, Result};

/// Relative determinant threshold for the 2x2 weighted normal matrix.
pub const SINGULARITY_TOL: f64 = 1e-12;

/// Paired (angle, response) observations, `n >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircLinearSample {
    angles: Vec<Angle>,
    responses: Vec<f64>,
}

impl CircLinearSample {
    pub fn new(angles: Vec<Angle>, responses: Vec<f64>) -> Result<Self> {
        if angles.len() != responses.len() {
            return Err(Error::contract(format!(
                "{} angles but {} responses",
                angles.len(),
                responses.len()
            )));
        }
        if angles.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                got: angles.len(),
            });
        }
        if let Some(bad) = responses.iter().find(|y| !y.is_finite()) {
            return Err(Error::contract(format!("non-finite response {bad}")));
        }
        Ok(CircLinearSample { angles, responses })
    }

    pub fn from_radians(raw: &[f64], responses: &[f64]) -> Result<Self> {
        let angles = raw.iter().map(|&r| wrap(r)).collect::<Result<Vec<_>>>()?;
        Self::new(angles, responses.to_vec())
    }

    pub fn angles(&self) -> &[Angle] {
        &self.angles
    }

    pub fn responses(&self) -> &[f64] {
        &self.responses
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (Angle, f64)> + '_ {
        self.angles.iter().copied().zip(self.responses.iter().copied())
    }

    pub fn rotated(&self, delta: f64) -> Result<Self> {
        let angles = self
            .angles
            .iter()
            .map(|a| a.rotate(delta))
            .collect::<Result<Vec<_>>>()?;
        Ok(CircLinearSample {
            angles,
            responses: self.responses.clone(),
        })
    }

    pub fn with_responses(&self, responses: Vec<f64>) -> Result<Self> {
        Self::new(self.angles.clone(), responses)
    }

    fn midrange(&self) -> f64 {
        midrange(&self.responses)
    }
}

fn midrange(ys: &[f64]) -> f64 {
    let (lo, hi) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| {
            (lo.min(y), hi.max(y))
        });
    lo / 2.0 + hi / 2.0
}

/// Level and slope of the local fit at one `(theta, nu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFit {
    pub a_hat: f64,
    pub b_hat: f64,
    pub theta: Angle,
    pub nu: Concentration,
}

impl LocalFit {
    /// Estimated derivative of the regression curve at `theta`.
    pub fn derivative(&self) -> f64 {
        -self.b_hat
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct NormalSums {
    s0: f64,
    s1: f64,
    s2: f64,
    t0: f64,
    t1: f64,
}

impl NormalSums {
    fn det(&self) -> Option<f64> {
        let det = self.s0 * self.s2 - self.s1 * self.s1;
        let half_trace = 0.5 * (self.s0 + self.s2);
        if det > SINGULARITY_TOL * half_trace * half_trace {
            Some(det)
        } else {
            None
        }
    }

    /// `(a, b)` relative to the centered responses.
    fn solve(&self) -> Option<(f64, f64)> {
        let det = self.det()?;
        let a = (self.s2 * self.t0 - self.s1 * self.t1) / det;
        let b = (self.s0 * self.t1 - self.s1 * self.t0) / det;
        Some((a, b))
    }
}

fn accumulate(k: &VonMisesKernel, angles: &[Angle], ys: &[f64], theta: f64) -> NormalSums {
    let mut s = NormalSums::default();
    for (a, &y) in angles.iter().zip(ys) {
        let u = theta - a.radians();
        let w = k.ratio(u);
        let x = u.sin();
        let wx = w * x;
        s.s0 += w;
        s.s1 += wx;
        s.s2 += wx * x;
        s.t0 += w * y;
        s.t1 += wx * y;
    }
    s
}

/// Weighted least-squares local linear fit at `theta`.
pub fn loclin_fit(sample: &CircLinearSample, theta: Angle, nu: Concentration) -> Result<LocalFit> {
    let k = VonMisesKernel::new(nu);
    let shift = sample.midrange();
    let ys: Vec<f64> = sample.responses().iter().map(|y| y - shift).collect();
    let sums = accumulate(&k, sample.angles(), &ys, theta.radians());
    let (a, b) = sums.solve().ok_or(Error::SingularDesign {
        theta: theta.radians(),
        nu: nu.value(),
    })?;
    Ok(LocalFit {
        a_hat: a + shift,
        b_hat: b,
        theta,
        nu,
    })
}

/// Local fits over a grid; singular cells are `None`.
pub fn loclin_grid(
    sample: &CircLinearSample,
    grid: &[Angle],
    nu: Concentration,
) -> Vec<Option<LocalFit>> {
    grid.par_iter()
        .map(|&t| loclin_fit(sample, t, nu).ok())
        .collect()
}

/// Weights `W_i` with `(1/n) sum_i W_i Y_i = b` for every response vector.
pub fn deriv_weights(angles: &[Angle], theta: Angle, nu: Concentration) -> Result<Vec<f64>> {
    let k = VonMisesKernel::new(nu);
    let zeros = vec![0.0; angles.len()];
    let sums = accumulate(&k, angles, &zeros, theta.radians());
    let det = sums.det().ok_or(Error::SingularDesign {
        theta: theta.radians(),
        nu: nu.value(),
    })?;
    let n = angles.len() as f64;
    let t = theta.radians();
    Ok(angles
        .iter()
        .map(|a| {
            let u = t - a.radians();
            n * (sums.s0 * u.sin() - sums.s1) * k.ratio(u) / det
        })
        .collect())
}

/// Conditional variance of the slope estimator, `sum_i sigma2_i W_i^2 / n^2`.
pub fn conditional_variance_form(weights: &[f64], sigma2: &[f64]) -> Result<f64> {
    if weights.len() != sigma2.len() {
        return Err(Error::contract(format!(
            "{} weights but {} variances",
            weights.len(),
            sigma2.len()
        )));
    }
    let n = weights.len() as f64;
    Ok(weights
        .iter()
        .zip(sigma2)
        .map(|(w, s)| s * w * w)
        .sum::<f64>()
        / (n * n))
}

/// Per-grid-point products `w, w x, w x^2, w y, w x y` for the original
/// observations, so a resample's normal equations reduce to count-weighted
/// dot products.
#[derive(Debug, Clone)]
pub struct RegressionMatrix {
    n: usize,
    shift: f64,
    // row j holds five consecutive blocks of length n
    values: Vec<f64>,
}

impl RegressionMatrix {
    pub fn new(sample: &CircLinearSample, grid: &[Angle], nu: Concentration) -> Self {
        let k = VonMisesKernel::new(nu);
        let n = sample.len();
        let shift = sample.midrange();
        let rows: Vec<Vec<f64>> = grid
            .par_iter()
            .map(|t| {
                let t = t.radians();
                let mut row = vec![0.0; 5 * n];
                for (i, (a, y)) in sample.pairs().enumerate() {
                    let u = t - a.radians();
                    let w = k.ratio(u);
                    let x = u.sin();
                    let y = y - shift;
                    row[i] = w;
                    row[n + i] = w * x;
                    row[2 * n + i] = w * x * x;
                    row[3 * n + i] = w * y;
                    row[4 * n + i] = w * x * y;
                }
                row
            })
            .collect();
        RegressionMatrix {
            n,
            shift,
            values: rows.concat(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.values.len() / (5 * self.n)
    }

    /// Local fit `(a, b)` at grid row `j` for resample multiplicities
    /// `counts`; `None` on a singular design.
    pub fn fit(&self, j: usize, counts: &[f64]) -> Option<(f64, f64)> {
        let n = self.n;
        let row = &self.values[j * 5 * n..(j + 1) * 5 * n];
        let (w, rest) = row.split_at(n);
        let (wx, rest) = rest.split_at(n);
        let (wxx, rest) = rest.split_at(n);
        let (wy, wxy) = rest.split_at(n);
        let mut s = NormalSums::default();
        for i in 0..n {
            let c = counts[i];
            s.s0 += c * w[i];
            s.s1 += c * wx[i];
            s.s2 += c * wxx[i];
            s.t0 += c * wy[i];
            s.t1 += c * wxy[i];
        }
        s.solve().map(|(a, b)| (a + self.shift, b))
    }

    /// Derivative estimate `-b` at grid row `j`.
    pub fn derivative(&self, j: usize, counts: &[f64]) -> Option<f64> {
        self.fit(j, counts).map(|(_, b)| -b)
    }
}
