//! Samplers for circular laws and the simulation scenario registry.
//!
//! Scenario parameters live in `scenarios.toml`, embedded at build time.
//! Each entry records whether its values are published or a stand-in chosen
//! to reproduce a qualitatively described shape.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::circkernel::{wrap, wrap_unchecked, Angle, VonMisesParams};
use crate::density::CircularSample;
use crate::error::{Error, Result};
use crate::regression::CircLinearSample;

const REGISTRY_SOURCE: &str = include_str!("scenarios.toml");

/// Stream reserved for drawing simulated data, disjoint from the bootstrap
/// streams (which are indexed by ring).
const DATA_STREAM: u64 = u64::MAX;

/// Generator for simulated data under `seed`.
pub fn simulation_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(DATA_STREAM);
    rng
}

/// Component families. Locations are radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    VonMises { mu: f64, kappa: f64 },
    /// Wrapped Cauchy with mean resultant length `rho` in `[0, 1)`.
    WrappedCauchy { mu: f64, rho: f64 },
    /// Skew-normal with location `xi`, scale `omega` and shape `alpha`,
    /// wrapped onto the circle.
    WrappedSkewNormal { xi: f64, omega: f64, alpha: f64 },
}

impl Family {
    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Family::VonMises { mu, kappa } => mu.is_finite() && kappa.is_finite() && kappa >= 0.0,
            Family::WrappedCauchy { mu, rho } => mu.is_finite() && (0.0..1.0).contains(&rho),
            Family::WrappedSkewNormal { xi, omega, alpha } => {
                xi.is_finite() && omega.is_finite() && omega > 0.0 && alpha.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::contract(format!("invalid component parameters {self:?}")))
        }
    }

    /// Draws one angle (radians, wrapped).
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Family::VonMises { mu, kappa } => draw_von_mises(mu, kappa, rng),
            Family::WrappedCauchy { mu, rho } => draw_wrapped_cauchy(mu, rho, rng),
            Family::WrappedSkewNormal { xi, omega, alpha } => {
                draw_wrapped_skew_normal(xi, omega, alpha, rng)
            }
        }
    }

    /// Density on the circle.
    pub fn pdf(&self, theta: f64) -> f64 {
        match *self {
            Family::VonMises { mu, kappa } => VonMisesParams { mu: wrap_unchecked(mu), kappa }.pdf(theta),
            Family::WrappedCauchy { mu, rho } => {
                (1.0 - rho * rho) / (TAU * (1.0 + rho * rho - 2.0 * rho * (theta - mu).cos()))
            }
            Family::WrappedSkewNormal { xi, omega, alpha } => {
                // sum the linear density over enough wraps to cover +-12 omega
                let reach = (12.0 * omega / TAU).ceil() as i64 + 1;
                let base = wrap_unchecked(theta - xi).radians();
                (-reach..=reach)
                    .map(|k| skew_normal_pdf(base + k as f64 * TAU, omega, alpha))
                    .sum()
            }
        }
    }
}

fn skew_normal_pdf(z: f64, omega: f64, alpha: f64) -> f64 {
    let t = z / omega;
    let phi = (-0.5 * t * t).exp() / (TAU.sqrt());
    let cdf = 0.5 * libm::erfc(-alpha * t / std::f64::consts::SQRT_2);
    2.0 / omega * phi * cdf
}

/// Best-Fisher acceptance-rejection sampler with a wrapped-Cauchy envelope.
fn draw_von_mises<R: Rng + ?Sized>(mu: f64, kappa: f64, rng: &mut R) -> f64 {
    if kappa == 0.0 {
        return rng.random_range(0.0..TAU);
    }
    let s = (1.0 + 4.0 * kappa * kappa).sqrt();
    let a = 1.0 + s;
    // a - sqrt(2a), rearranged to avoid cancellation at small kappa
    let a_minus = a * (4.0 * kappa * kappa / (s + 1.0)) / (a + (2.0 * a).sqrt());
    let b = a_minus / (2.0 * kappa);
    let r = (1.0 + b * b) / (2.0 * b);
    loop {
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        let u3: f64 = rng.random();
        let z = (PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let dev = f.clamp(-1.0, 1.0).acos();
            let theta = if u3 > 0.5 { mu + dev } else { mu - dev };
            return wrap_unchecked(theta).radians();
        }
    }
}

fn draw_wrapped_cauchy<R: Rng + ?Sized>(mu: f64, rho: f64, rng: &mut R) -> f64 {
    if rho == 0.0 {
        return rng.random_range(0.0..TAU);
    }
    let scale = -rho.ln();
    let u: f64 = rng.random();
    wrap_unchecked(mu + scale * (PI * (u - 0.5)).tan()).radians()
}

fn draw_wrapped_skew_normal<R: Rng + ?Sized>(xi: f64, omega: f64, alpha: f64, rng: &mut R) -> f64 {
    let delta = alpha / (1.0 + alpha * alpha).sqrt();
    let u0: f64 = StandardNormal.sample(rng);
    let u1: f64 = StandardNormal.sample(rng);
    let z = delta * u0.abs() + (1.0 - delta * delta).sqrt() * u1;
    wrap_unchecked(xi + omega * z).radians()
}

/// `n` i.i.d. draws from `vM(mu, kappa)`.
pub fn sample_von_mises<R: Rng + ?Sized>(
    params: VonMisesParams,
    n: usize,
    rng: &mut R,
) -> Result<CircularSample> {
    let raw: Vec<f64> = (0..n)
        .map(|_| draw_von_mises(params.mu.radians(), params.kappa, rng))
        .collect();
    CircularSample::from_radians(&raw)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub family: Family,
    pub weight: f64,
}

/// Finite mixture of circular laws with weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    components: Vec<Component>,
}

impl MixtureSpec {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::contract("mixture has no components"));
        }
        for c in &components {
            c.family.validate()?;
            if !(c.weight > 0.0 && c.weight.is_finite()) {
                return Err(Error::contract(format!("component weight {} must be > 0", c.weight)));
            }
        }
        let total: f64 = components.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::contract(format!("mixture weights sum to {total}, not 1")));
        }
        Ok(MixtureSpec { components })
    }

    pub fn single(family: Family) -> Result<Self> {
        Self::new(vec![Component { family, weight: 1.0 }])
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.weight).collect()
    }

    pub fn pdf(&self, theta: f64) -> f64 {
        self.components
            .iter()
            .map(|c| c.weight * c.family.pdf(theta))
            .sum()
    }

    fn pick<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let last = self.components.len() - 1;
        let u: f64 = rng.random();
        let mut acc = 0.0;
        for (i, c) in self.components[..last].iter().enumerate() {
            acc += c.weight;
            if u < acc {
                return i;
            }
        }
        last
    }
}

/// Draws `n` angles together with the index of the component each came from.
///
/// A single-component mixture consumes no randomness for the component
/// choice, so it reproduces the component sampler draw for draw.
pub fn sample_mixture_labeled<R: Rng + ?Sized>(
    spec: &MixtureSpec,
    n: usize,
    rng: &mut R,
) -> Result<(CircularSample, Vec<usize>)> {
    let mut raw = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let i = if spec.components.len() == 1 { 0 } else { spec.pick(rng) };
        raw.push(spec.components[i].family.draw(rng));
        labels.push(i);
    }
    Ok((CircularSample::from_radians(&raw)?, labels))
}

pub fn sample_mixture<R: Rng + ?Sized>(
    spec: &MixtureSpec,
    n: usize,
    rng: &mut R,
) -> Result<CircularSample> {
    sample_mixture_labeled(spec, n, rng).map(|(s, _)| s)
}

/// One von Mises-shaped bump `amplitude * exp(kappa (cos(theta - mu) - 1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub mu: f64,
    pub kappa: f64,
    pub amplitude: f64,
}

/// Periodic mean function: a baseline plus a sum of bumps.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeanFunction {
    pub baseline: f64,
    pub bumps: Vec<Bump>,
}

impl MeanFunction {
    pub fn constant(c: f64) -> Self {
        MeanFunction {
            baseline: c,
            bumps: Vec::new(),
        }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.baseline
            + self
                .bumps
                .iter()
                .map(|b| b.amplitude * (b.kappa * ((theta - b.mu).cos() - 1.0)).exp())
                .sum::<f64>()
    }

    pub fn deriv(&self, theta: f64) -> f64 {
        self.bumps
            .iter()
            .map(|b| {
                -b.amplitude * b.kappa * (theta - b.mu).sin()
                    * (b.kappa * ((theta - b.mu).cos() - 1.0)).exp()
            })
            .sum()
    }
}

/// `Y = f(Theta) + eps`, `eps ~ N(0, noise_sd^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionModel {
    pub mean: MeanFunction,
    pub noise_sd: f64,
}

impl RegressionModel {
    pub fn new(mean: MeanFunction, noise_sd: f64) -> Result<Self> {
        if !(noise_sd.is_finite() && noise_sd >= 0.0) {
            return Err(Error::contract(format!("noise sd must be >= 0, got {noise_sd}")));
        }
        Ok(RegressionModel { mean, noise_sd })
    }
}

/// Uniform circular design with responses drawn from `model`.
pub fn sample_regression<R: Rng + ?Sized>(
    model: &RegressionModel,
    n: usize,
    rng: &mut R,
) -> Result<CircLinearSample> {
    sample_regression_with(|t| model.mean.eval(t), model.noise_sd, n, rng)
}

/// As [`sample_regression`] with an arbitrary mean function.
pub fn sample_regression_with<R: Rng + ?Sized>(
    mean: impl Fn(f64) -> f64,
    noise_sd: f64,
    n: usize,
    rng: &mut R,
) -> Result<CircLinearSample> {
    if n < 2 {
        return Err(Error::InsufficientData { needed: 2, got: n });
    }
    let noise = Normal::new(0.0, noise_sd)
        .map_err(|e| Error::contract(format!("noise sd {noise_sd}: {e}")))?;
    let mut angles = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let t = rng.random_range(0.0..TAU);
        let eps = if noise_sd == 0.0 { 0.0 } else { noise.sample(rng) };
        angles.push(wrap(t)?);
        ys.push(mean(t) + eps);
    }
    CircLinearSample::new(angles, ys)
}

// --- registry ---------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioProvenance {
    Published,
    StandIn,
}

#[derive(Debug, Deserialize)]
struct RawRegistry {
    schema_version: u32,
    #[serde(default)]
    density: Vec<RawDensity>,
    #[serde(default)]
    regression: Vec<RawRegression>,
}

#[derive(Debug, Deserialize)]
struct RawDensity {
    name: String,
    provenance: ScenarioProvenance,
    #[serde(default)]
    note: String,
    components: Vec<RawComponent>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
enum RawComponent {
    VonMises { mu_pi: f64, kappa: f64, weight: f64 },
    WrappedCauchy { mu_pi: f64, rho: f64, weight: f64 },
    WrappedSkewNormal { mu_pi: f64, omega: f64, alpha: f64, weight: f64 },
}

impl RawComponent {
    fn resolve(&self) -> Component {
        match *self {
            RawComponent::VonMises { mu_pi, kappa, weight } => Component {
                family: Family::VonMises { mu: mu_pi * PI, kappa },
                weight,
            },
            RawComponent::WrappedCauchy { mu_pi, rho, weight } => Component {
                family: Family::WrappedCauchy { mu: mu_pi * PI, rho },
                weight,
            },
            RawComponent::WrappedSkewNormal { mu_pi, omega, alpha, weight } => Component {
                family: Family::WrappedSkewNormal { xi: mu_pi * PI, omega, alpha },
                weight,
            },
        }
    }
}

#[derive(Debug, Deserialize)]
struct RawRegression {
    name: String,
    provenance: ScenarioProvenance,
    #[serde(default)]
    note: String,
    noise_variance: f64,
    #[serde(default)]
    baseline: f64,
    #[serde(default)]
    bumps: Vec<RawBump>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBump {
    mu_pi: f64,
    kappa: f64,
    amplitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioInfo {
    pub name: String,
    pub provenance: ScenarioProvenance,
    pub note: String,
}

#[derive(Debug, Clone)]
pub enum ScenarioKind {
    Density(MixtureSpec),
    Regression(RegressionModel),
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub info: ScenarioInfo,
    pub kind: ScenarioKind,
}

/// Named simulation scenarios.
#[derive(Debug, Clone)]
pub struct ScenarioRegistry {
    scenarios: Vec<Scenario>,
}

impl ScenarioRegistry {
    pub fn from_toml_str(source: &str) -> Result<Self> {
        let raw: RawRegistry = toml::from_str(source)?;
        if raw.schema_version != 1 {
            return Err(Error::contract(format!(
                "unsupported scenario schema version {}",
                raw.schema_version
            )));
        }
        let mut scenarios = Vec::new();
        for d in raw.density {
            let spec = MixtureSpec::new(d.components.iter().map(RawComponent::resolve).collect())?;
            scenarios.push(Scenario {
                info: ScenarioInfo {
                    name: d.name,
                    provenance: d.provenance,
                    note: d.note,
                },
                kind: ScenarioKind::Density(spec),
            });
        }
        for r in raw.regression {
            if r.noise_variance.is_nan() || r.noise_variance < 0.0 {
                return Err(Error::contract(format!(
                    "scenario {}: noise variance must be >= 0",
                    r.name
                )));
            }
            let mean = MeanFunction {
                baseline: r.baseline,
                bumps: r
                    .bumps
                    .iter()
                    .map(|b| Bump {
                        mu: b.mu_pi * PI,
                        kappa: b.kappa,
                        amplitude: b.amplitude,
                    })
                    .collect(),
            };
            scenarios.push(Scenario {
                info: ScenarioInfo {
                    name: r.name,
                    provenance: r.provenance,
                    note: r.note,
                },
                kind: ScenarioKind::Regression(RegressionModel::new(mean, r.noise_variance.sqrt())?),
            });
        }
        Ok(ScenarioRegistry { scenarios })
    }

    /// The registry shipped with the crate.
    pub fn builtin() -> &'static ScenarioRegistry {
        static REGISTRY: OnceLock<ScenarioRegistry> = OnceLock::new();
        REGISTRY.get_or_init(|| {
            ScenarioRegistry::from_toml_str(REGISTRY_SOURCE).expect("embedded registry is valid")
        })
    }

    /// Raw text of the embedded registry.
    pub fn builtin_source() -> &'static str {
        REGISTRY_SOURCE
    }

    pub fn names(&self) -> Vec<String> {
        self.scenarios.iter().map(|s| s.info.name.clone()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&Scenario> {
        self.scenarios
            .iter()
            .find(|s| s.info.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownScenario {
                name: name.to_string(),
                valid: self.names(),
            })
    }
}

/// Density scenario by name (D1..D4).
pub fn scenario(name: &str) -> Result<MixtureSpec> {
    let registry = ScenarioRegistry::builtin();
    match &registry.get(name)?.kind {
        ScenarioKind::Density(spec) => Ok(spec.clone()),
        ScenarioKind::Regression(_) => Err(Error::UnknownScenario {
            name: name.to_string(),
            valid: density_scenario_names(),
        }),
    }
}

/// Regression scenario by name.
pub fn regression_scenario(name: &str) -> Result<RegressionModel> {
    let registry = ScenarioRegistry::builtin();
    match &registry.get(name)?.kind {
        ScenarioKind::Regression(model) => Ok(model.clone()),
        ScenarioKind::Density(_) => Err(Error::UnknownScenario {
            name: name.to_string(),
            valid: registry
                .scenarios
                .iter()
                .filter(|s| matches!(s.kind, ScenarioKind::Regression(_)))
                .map(|s| s.info.name.clone())
                .collect(),
        }),
    }
}

fn density_scenario_names() -> Vec<String> {
    ScenarioRegistry::builtin()
        .scenarios
        .iter()
        .filter(|s| matches!(s.kind, ScenarioKind::Density(_)))
        .map(|s| s.info.name.clone())
        .collect()
}

/// Circular mean direction of a set of angles (`None` when the resultant
/// vanishes).
pub fn circular_mean(angles: &[Angle]) -> Option<Angle> {
    let (s, c) = angles.iter().fold((0.0, 0.0), |(s, c), a| {
        (s + a.radians().sin(), c + a.radians().cos())
    });
    if s.hypot(c) < 1e-12 * angles.len() as f64 {
        None
    } else {
        Some(wrap_unchecked(s.atan2(c)))
    }
}
