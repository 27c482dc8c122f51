//! Angle arithmetic, the scaled modified Bessel function `I0(x)e^-x`, and the
//! von Mises smoothing kernel with its derivative.
//!
//! Angles are radians in mathematical convention (counterclockwise from the
//! positive x axis) and always live in `[0, 2pi)`. Compass conventions are an
//! ingestion/rendering concern only.
//!
//! The kernel is evaluated in the scaled form
//!
//! ```text
//! K(u; nu) = exp(nu (cos u - 1)) / (2 pi I0(nu) e^-nu)
//! ```
//!
//! so no intermediate exceeds `e^0` and large concentrations never overflow.

use std::f64::consts::{PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Crossover between the power series and the asymptotic expansion of `I0`.
const BESSEL_CROSSOVER: f64 = 15.0;

/// An angle in radians, normalized to `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    /// Wraps any finite value onto the circle.
    pub fn new(raw: f64) -> Result<Self> {
        wrap(raw)
    }

    pub fn from_degrees(deg: f64) -> Result<Self> {
        wrap(deg.to_radians())
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    /// Rotates by `delta` radians (counterclockwise for positive `delta`).
    pub fn rotate(self, delta: f64) -> Result<Self> {
        wrap(self.0 + delta)
    }

    /// Geodesic distance on the circle, in `[0, pi]`.
    pub fn distance(self, other: Angle) -> f64 {
        let d = (self.0 - other.0).abs();
        d.min(TAU - d)
    }

    /// `n` equally spaced angles `2 pi k / n`, `k = 0..n`.
    pub fn equispaced(n: usize) -> Vec<Angle> {
        (0..n)
            .map(|k| wrap_unchecked(TAU * k as f64 / n as f64))
            .collect()
    }
}

impl TryFrom<f64> for Angle {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        wrap(value)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.4}", self.0)
    }
}

/// Reduces a finite angle modulo `2pi` into `[0, 2pi)`.
pub fn wrap(raw: f64) -> Result<Angle> {
    if !raw.is_finite() {
        return Err(Error::InvalidAngle(raw));
    }
    Ok(wrap_unchecked(raw))
}

#[inline]
pub(crate) fn wrap_unchecked(raw: f64) -> Angle {
    let r = raw.rem_euclid(TAU);
    // rem_euclid rounds tiny negative inputs up to exactly 2pi
    Angle(if r >= TAU { 0.0 } else { r })
}

/// Smoothing (concentration) parameter `nu >= 0`. Zero is the uniform-kernel
/// limit.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Concentration(f64);

impl Concentration {
    pub fn new(nu: f64) -> Result<Self> {
        if nu.is_finite() && nu >= 0.0 {
            Ok(Concentration(nu))
        } else {
            Err(Error::InvalidConcentration(nu))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Concentration {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Concentration::new(value)
    }
}

impl From<Concentration> for f64 {
    fn from(c: Concentration) -> f64 {
        c.0
    }
}

impl fmt::Display for Concentration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Parameters of a von Mises distribution `vM(mu, kappa)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VonMisesParams {
    pub mu: Angle,
    pub kappa: f64,
}

impl VonMisesParams {
    pub fn new(mu: f64, kappa: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::contract(format!(
                "von Mises kappa must be finite and >= 0, got {kappa}"
            )));
        }
        Ok(VonMisesParams {
            mu: wrap(mu)?,
            kappa,
        })
    }

    /// Density at `theta`.
    pub fn pdf(&self, theta: f64) -> f64 {
        let k = VonMisesKernel::new(Concentration(self.kappa));
        k.eval(theta - self.mu.radians())
    }
}

/// `I0(x) e^{-x}` for `x >= 0`.
///
/// Power series below 15, the large-argument asymptotic expansion above.
/// Values lie in `(0, 1]` and decrease monotonically.
pub fn bessel_i0_scaled(nu: Concentration) -> f64 {
    let x = nu.value();
    if x < BESSEL_CROSSOVER {
        i0_series(x) * (-x).exp()
    } else {
        i0_scaled_asymptotic(x)
    }
}

fn i0_series(x: f64) -> f64 {
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 1.0;
    loop {
        term *= q / (k * k);
        sum += term;
        if term < sum * 1e-17 {
            return sum;
        }
        k += 1.0;
    }
}

// I0(x) e^-x ~ (2 pi x)^-1/2 sum_k ((2k-1)!!)^2 / (k! 8^k x^k)
fn i0_scaled_asymptotic(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k: f64 = 1.0;
    loop {
        let ratio = (2.0 * k - 1.0).powi(2) / (8.0 * k * x);
        // divergent series: stop at the smallest term
        if ratio >= 1.0 {
            break;
        }
        term *= ratio;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
        k += 1.0;
    }
    sum / (TAU * x).sqrt()
}

/// Von Mises kernel with its normalizing constant resolved once.
///
/// Batch evaluation over grids reuses one instance so the Bessel function
/// is computed once per concentration.
#[derive(Debug, Clone, Copy)]
pub struct VonMisesKernel {
    nu: f64,
    norm: f64,
}

impl VonMisesKernel {
    pub fn new(nu: Concentration) -> Self {
        let nu = nu.value();
        VonMisesKernel {
            nu,
            norm: 1.0 / (TAU * bessel_i0_scaled(Concentration(nu))),
        }
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `K(0)`, the kernel's peak value.
    pub fn peak(&self) -> f64 {
        self.norm
    }

    /// Unnormalized weight `exp(nu (cos u - 1)) = K(u)/K(0)`, in `[0, 1]`.
    #[inline]
    pub fn ratio(&self, u: f64) -> f64 {
        (self.nu * (u.cos() - 1.0)).exp()
    }

    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        self.ratio(u) * self.norm
    }

    /// `K'(u) = -nu sin(u) K(u)`.
    #[inline]
    pub fn deriv(&self, u: f64) -> f64 {
        -self.nu * u.sin() * self.eval(u)
    }
}

/// Von Mises kernel `K_nu(u)`.
pub fn vm_kernel(u: f64, nu: Concentration) -> f64 {
    VonMisesKernel::new(nu).eval(u)
}

/// Derivative of the von Mises kernel with respect to `u`.
pub fn vm_kernel_deriv(u: f64, nu: Concentration) -> f64 {
    VonMisesKernel::new(nu).deriv(u)
}

/// Mathematical angle to compass bearing (clockwise from North) and back;
/// the map is an involution.
pub fn math_to_compass(theta: Angle) -> Angle {
    wrap_unchecked(PI / 2.0 - theta.radians())
}

pub fn compass_to_math(bearing: Angle) -> Angle {
    wrap_unchecked(PI / 2.0 - bearing.radians())
}
