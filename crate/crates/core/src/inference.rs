//! Bootstrap engine: resampling, standard-deviation estimates, bootstrap-t
//! confidence bands for the derivative estimators, and cell classification.
//!
//! Every replicate draws from its own ChaCha substream addressed by
//! `(seed, ring, replicate)`, so results do not depend on how replicates are
//! scheduled across threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circkernel::{Angle, Concentration};
use crate::density::{CircularSample, DerivMatrix};
use crate::error::{Error, Result};
use crate::regression::{CircLinearSample, RegressionMatrix};
use crate::stats;

/// Words reserved per replicate inside a ring's ChaCha stream.
const REPLICATE_STRIDE: u128 = 1 << 40;

/// Counter-based RNG substream for one bootstrap replicate.
pub fn substream(seed: u64, ring: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(ring);
    rng.set_word_pos(replicate as u128 * REPLICATE_STRIDE);
    rng
}

/// Addresses the family of replicate substreams used for one band.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    pub seed: u64,
    pub ring: u64,
}

impl StreamKey {
    pub fn new(seed: u64, ring: u64) -> Self {
        StreamKey { seed, ring }
    }

    pub fn replicate(&self, b: usize) -> ChaCha8Rng {
        substream(self.seed, self.ring, b as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub alpha: f64,
    #[serde(rename = "B")]
    pub b: usize,
    #[serde(rename = "B2")]
    pub b2: usize,
    pub seed: u64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            alpha: 0.05,
            b: 500,
            b2: 250,
            seed: 0,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::contract(format!(
                "alpha must lie in (0, 0.5), got {}",
                self.alpha
            )));
        }
        if self.b < 2 {
            return Err(Error::contract(format!("B must be >= 2, got {}", self.b)));
        }
        if self.b2 < 2 {
            return Err(Error::contract(format!("B2 must be >= 2, got {}", self.b2)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Density,
    Regression,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Density => "density",
            Mode::Regression => "regression",
        })
    }
}

/// Input data for either analysis mode.
#[derive(Debug, Clone, PartialEq)]
pub enum Data {
    Density(CircularSample),
    Regression(CircLinearSample),
}

impl Data {
    pub fn mode(&self) -> Mode {
        match self {
            Data::Density(_) => Mode::Density,
            Data::Regression(_) => Mode::Regression,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Data::Density(s) => s.len(),
            Data::Regression(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn angles(&self) -> &[Angle] {
        match self {
            Data::Density(s) => s.angles(),
            Data::Regression(s) => s.angles(),
        }
    }
}

/// `n` indices drawn uniformly with replacement from `0..n`.
pub fn resample_indices<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| rng.random_range(0..n)).collect()
}

fn counts_of(indices: &[usize], n: usize) -> Vec<f64> {
    let mut counts = vec![0.0; n];
    for &i in indices {
        counts[i] += 1.0;
    }
    counts
}

/// Nonparametric bootstrap resample of a circular sample.
pub fn resample_density<R: Rng + ?Sized>(sample: &CircularSample, rng: &mut R) -> CircularSample {
    let idx = resample_indices(sample.len(), rng);
    let angles = idx.iter().map(|&i| sample.angles()[i]).collect();
    CircularSample::new(angles).expect("resample of a non-empty sample is non-empty")
}

/// Pairs bootstrap: (angle, response) pairs are kept intact.
pub fn resample_pairs<R: Rng + ?Sized>(
    sample: &CircLinearSample,
    rng: &mut R,
) -> CircLinearSample {
    let idx = resample_indices(sample.len(), rng);
    let angles = idx.iter().map(|&i| sample.angles()[i]).collect();
    let responses = idx.iter().map(|&i| sample.responses()[i]).collect();
    CircLinearSample::new(angles, responses).expect("resample keeps size and finiteness")
}

/// Bootstrap standard deviation of the regression derivative at each grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapSd {
    /// `None` where fewer than two replicates gave a non-singular fit.
    pub sd: Vec<Option<f64>>,
    pub usable: Vec<usize>,
}

/// Sample standard deviation of `b` pairs-bootstrap replicates of the derivative.
///
/// Replicates with a singular local design are dropped per grid point.
pub fn bootstrap_sd_regression(
    sample: &CircLinearSample,
    grid: &[Angle],
    nu: Concentration,
    b: usize,
    key: StreamKey,
) -> Result<BootstrapSd> {
    if b < 2 {
        return Err(Error::contract(format!("B must be >= 2, got {b}")));
    }
    let mat = RegressionMatrix::new(sample, grid, nu);
    let n = sample.len();
    let reps: Vec<Vec<Option<f64>>> = (0..b)
        .into_par_iter()
        .map(|r| {
            let mut rng = key.replicate(r);
            let counts = counts_of(&resample_indices(n, &mut rng), n);
            (0..grid.len()).map(|j| mat.derivative(j, &counts)).collect()
        })
        .collect();
    let mut sd = Vec::with_capacity(grid.len());
    let mut usable = Vec::with_capacity(grid.len());
    for j in 0..grid.len() {
        let vals: Vec<f64> = reps.iter().filter_map(|r| r[j]).collect();
        usable.push(vals.len());
        sd.push((vals.len() >= 2).then(|| stats::sample_sd(&vals)));
    }
    Ok(BootstrapSd { sd, usable })
}

/// Empirical quantile: order statistics interpolated linearly at rank
/// `1 + p (m - 1)`.
pub fn empirical_quantile(values: &[f64], p: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::contract("quantile of an empty list"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::contract(format!("quantile level {p} outside [0, 1]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(stats::quantile_sorted(&sorted, p))
}

/// Pointwise bootstrap-t band for the derivative at one concentration.
///
/// `None` entries mark grid points where the band is undefined (singular
/// design, zero or unusable standard deviation, too few usable replicates).
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceBand {
    pub theta_grid: Vec<Angle>,
    pub nu: Concentration,
    pub estimate: Vec<Option<f64>>,
    pub sd: Vec<Option<f64>>,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
    /// Studentized replicates that entered the quantiles.
    pub usable: Vec<usize>,
}

impl ConfidenceBand {
    pub fn len(&self) -> usize {
        self.theta_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta_grid.is_empty()
    }

    pub fn interval(&self, j: usize) -> Option<(f64, f64)> {
        Some((self.lower[j]?, self.upper[j]?))
    }
}

/// One replicate's derivative estimate and its studentizing sd per grid point.
type Replicate = Vec<(Option<f64>, Option<f64>)>;

/// Bootstrap-t band over `grid` at concentration `nu`.
///
/// Density mode studentizes each replicate with the closed-form sd of the
/// derivative estimator evaluated on that replicate. Regression mode uses a
/// nested pairs bootstrap of `b2` inner resamples per outer replicate, and
/// the sd on the original data is the spread of the `b` outer replicates.
pub fn bootstrap_t_band(
    data: &Data,
    grid: &[Angle],
    nu: Concentration,
    config: &BootstrapConfig,
    key: StreamKey,
) -> Result<ConfidenceBand> {
    config.validate()?;
    let n = data.len();
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let (estimate, sd, reps) = match data {
        Data::Density(sample) => density_replicates(sample, grid, nu, config, key),
        Data::Regression(sample) => regression_replicates(sample, grid, nu, config, key),
    };

    let m = grid.len();
    let mut band = ConfidenceBand {
        theta_grid: grid.to_vec(),
        nu,
        estimate,
        sd,
        lower: vec![None; m],
        upper: vec![None; m],
        usable: vec![0; m],
    };
    let mut z = Vec::with_capacity(config.b);
    for j in 0..m {
        let (Some(est), Some(sd)) = (band.estimate[j], band.sd[j]) else {
            continue;
        };
        z.clear();
        for rep in &reps {
            if let (Some(star), Some(sd_star)) = rep[j] {
                if sd_star > 0.0 && sd_star.is_finite() {
                    z.push((star - est) / sd_star);
                }
            }
        }
        band.usable[j] = z.len();
        if z.len() < 2 {
            continue;
        }
        if let Some((lo, hi)) = bootstrap_t_interval(est, sd, &mut z, config.alpha) {
            band.lower[j] = Some(lo);
            band.upper[j] = Some(hi);
        }
    }
    Ok(band)
}

/// `(est - t(1-alpha) sd, est - t(alpha) sd)` from studentized replicates
/// `z` (reordered in place). `None` when `sd` is zero or not finite.
pub fn bootstrap_t_interval(est: f64, sd: f64, z: &mut [f64], alpha: f64) -> Option<(f64, f64)> {
    if z.is_empty() || !(sd > 0.0 && sd.is_finite()) {
        return None;
    }
    z.sort_by(f64::total_cmp);
    let t_lo = stats::quantile_sorted(z, alpha);
    let t_hi = stats::quantile_sorted(z, 1.0 - alpha);
    Some((est - t_hi * sd, est - t_lo * sd))
}

type Prepared = (Vec<Option<f64>>, Vec<Option<f64>>, Vec<Replicate>);

fn density_replicates(
    sample: &CircularSample,
    grid: &[Angle],
    nu: Concentration,
    config: &BootstrapConfig,
    key: StreamKey,
) -> Prepared {
    let mat = DerivMatrix::new(sample, grid, nu);
    let n = sample.len();
    let ones = vec![1.0; n];
    let (estimate, sd): (Vec<_>, Vec<_>) = (0..grid.len())
        .map(|j| {
            let (d, s) = mat.deriv_and_sd(j, &ones);
            (Some(d), Some(s))
        })
        .unzip();
    let reps = (0..config.b)
        .into_par_iter()
        .map(|r| {
            let mut rng = key.replicate(r);
            let counts = counts_of(&resample_indices(n, &mut rng), n);
            (0..grid.len())
                .map(|j| {
                    let (d, s) = mat.deriv_and_sd(j, &counts);
                    (Some(d), Some(s))
                })
                .collect()
        })
        .collect();
    (estimate, sd, reps)
}

fn regression_replicates(
    sample: &CircLinearSample,
    grid: &[Angle],
    nu: Concentration,
    config: &BootstrapConfig,
    key: StreamKey,
) -> Prepared {
    let mat = RegressionMatrix::new(sample, grid, nu);
    let n = sample.len();
    let m = grid.len();
    let ones = vec![1.0; n];
    let estimate: Vec<Option<f64>> = (0..m).map(|j| mat.derivative(j, &ones)).collect();

    let reps: Vec<Replicate> = (0..config.b)
        .into_par_iter()
        .map(|r| {
            let mut rng = key.replicate(r);
            let outer = resample_indices(n, &mut rng);
            let counts = counts_of(&outer, n);
            let star: Vec<Option<f64>> = (0..m).map(|j| mat.derivative(j, &counts)).collect();

            let mut inner: Vec<Vec<f64>> = vec![Vec::with_capacity(config.b2); m];
            let mut inner_counts = vec![0.0; n];
            for _ in 0..config.b2 {
                inner_counts.iter_mut().for_each(|c| *c = 0.0);
                for _ in 0..n {
                    inner_counts[outer[rng.random_range(0..n)]] += 1.0;
                }
                for (j, vals) in inner.iter_mut().enumerate() {
                    if star[j].is_some() {
                        if let Some(s) = mat.derivative(j, &inner_counts) {
                            vals.push(s);
                        }
                    }
                }
            }
            star.into_iter()
                .zip(inner)
                .map(|(s, vals)| (s, (vals.len() >= 2).then(|| stats::sample_sd(&vals))))
                .collect()
        })
        .collect();

    let sd = (0..m)
        .map(|j| {
            let vals: Vec<f64> = reps.iter().filter_map(|r| r[j].0).collect();
            (vals.len() >= 2).then(|| stats::sample_sd(&vals))
        })
        .collect();
    (estimate, sd, reps)
}

/// Significance state of one `(theta, nu)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellState {
    Increasing,
    Decreasing,
    Flat,
    Sparse,
}

impl CellState {
    pub fn token(self) -> &'static str {
        match self {
            CellState::Increasing => "increasing",
            CellState::Decreasing => "decreasing",
            CellState::Flat => "flat",
            CellState::Sparse => "sparse",
        }
    }

    pub fn is_significant(self) -> bool {
        matches!(self, CellState::Increasing | CellState::Decreasing)
    }
}

/// Sparse below the ESS threshold, otherwise the sign of the interval.
pub fn classify(lower: f64, upper: f64, ess: f64, ess_threshold: f64) -> CellState {
    if ess < ess_threshold {
        CellState::Sparse
    } else if lower > 0.0 {
        CellState::Increasing
    } else if upper < 0.0 {
        CellState::Decreasing
    } else {
        CellState::Flat
    }
}
