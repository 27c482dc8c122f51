//! The `(theta x nu)` scale-space sweep: effective sample size, one bootstrap
//! band per concentration, per-cell classification, and peak/trough
//! detection along each ring.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::circkernel::{wrap_unchecked, Angle, Concentration, VonMisesKernel};
use crate::error::{Error, Result};
use crate::inference::{bootstrap_t_band, classify, BootstrapConfig, CellState, Data, Mode, StreamKey};

pub const DEFAULT_ESS_THRESHOLD: f64 = 5.0;
pub const DEFAULT_NGRID_DENSITY: usize = 250;
pub const DEFAULT_NGRID_REGRESSION: usize = 150;
pub const MIN_NGRID: usize = 8;

/// Evaluation lattice: `ngrid` equispaced angles times a strictly increasing
/// list of concentrations.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothingGrid {
    ngrid: usize,
    nu_grid: Vec<Concentration>,
}

impl SmoothingGrid {
    pub fn new(ngrid: usize, nu_grid: Vec<Concentration>) -> Result<Self> {
        if ngrid < MIN_NGRID {
            return Err(Error::contract(format!(
                "ngrid must be >= {MIN_NGRID}, got {ngrid}"
            )));
        }
        if nu_grid.is_empty() {
            return Err(Error::contract("nu grid is empty"));
        }
        if nu_grid.windows(2).any(|w| w[1].value() <= w[0].value()) {
            return Err(Error::contract("nu grid must be strictly increasing"));
        }
        Ok(SmoothingGrid { ngrid, nu_grid })
    }

    pub fn from_values(ngrid: usize, nu: &[f64]) -> Result<Self> {
        let nu_grid = nu
            .iter()
            .map(|&v| Concentration::new(v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(ngrid, nu_grid)
    }

    /// Default concentration grid: 10 log-spaced values from 1 to 60.
    pub fn default_nu_grid() -> Vec<Concentration> {
        log_spaced(1.0, 60.0, 10).expect("valid constants")
    }

    pub fn ngrid(&self) -> usize {
        self.ngrid
    }

    pub fn nu_grid(&self) -> &[Concentration] {
        &self.nu_grid
    }

    pub fn theta_grid(&self) -> Vec<Angle> {
        Angle::equispaced(self.ngrid)
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.ngrid as f64
    }
}

/// `count` log-spaced concentrations from `min` to `max` inclusive.
pub fn log_spaced(min: f64, max: f64, count: usize) -> Result<Vec<Concentration>> {
    if !(min > 0.0 && max > min && count >= 2) {
        return Err(Error::contract(format!(
            "log grid needs 0 < min < max and count >= 2 (got {min}, {max}, {count})"
        )));
    }
    let (lo, hi) = (min.ln(), max.ln());
    (0..count)
        .map(|i| {
            let v = if i == count - 1 {
                max
            } else {
                (lo + (hi - lo) * i as f64 / (count - 1) as f64).exp()
            };
            Concentration::new(v)
        })
        .collect()
}

/// `count` linearly spaced concentrations from `min` to `max` inclusive.
pub fn linear_spaced(min: f64, max: f64, count: usize) -> Result<Vec<Concentration>> {
    if !(min >= 0.0 && max > min && count >= 2) {
        return Err(Error::contract(format!(
            "linear grid needs 0 <= min < max and count >= 2 (got {min}, {max}, {count})"
        )));
    }
    (0..count)
        .map(|i| Concentration::new(min + (max - min) * i as f64 / (count - 1) as f64))
        .collect()
}

/// Effective sample size `sum_i K(theta - Theta_i) / K(0)`.
pub fn ess(angles: &[Angle], theta: Angle, nu: Concentration) -> f64 {
    let k = VonMisesKernel::new(nu);
    let t = theta.radians();
    angles.iter().map(|a| k.ratio(t - a.radians())).sum()
}

/// One classified `(theta, nu)` cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub state: CellState,
    pub ess: f64,
    pub estimate: Option<f64>,
    pub sd: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Cell {
    /// Sparse because no interval could be formed, not because of the ESS
    /// rule.
    pub fn unclassifiable(&self, ess_threshold: f64) -> bool {
        self.state == CellState::Sparse && self.ess >= ess_threshold
    }
}

/// Where the analysed data came from.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    /// `"scenario"` or `"file"`.
    pub kind: String,
    /// Scenario name or input path.
    pub source: String,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SizerMap {
    pub grid: SmoothingGrid,
    pub mode: Mode,
    pub config: BootstrapConfig,
    pub ess_threshold: f64,
    /// `cells[k][j]` is the cell at `nu_grid[k]`, `theta_grid[j]`.
    pub cells: Vec<Vec<Cell>>,
    pub provenance: Option<Provenance>,
}

impl SizerMap {
    pub fn ring(&self, k: usize) -> &[Cell] {
        &self.cells[k]
    }

    pub fn states(&self, k: usize) -> Vec<CellState> {
        self.cells[k].iter().map(|c| c.state).collect()
    }

    pub fn cell_count(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    /// Features on every ring.
    pub fn features(&self) -> Vec<FeatureRow> {
        (0..self.cells.len())
            .map(|k| detect_features(self, k).expect("index in range"))
            .collect()
    }
}

/// Builds the map, one bootstrap band per concentration.
///
/// Ring `k` draws its replicates from the substreams `(seed, k, ·)`.
pub fn build_map(
    data: &Data,
    grid: &SmoothingGrid,
    config: &BootstrapConfig,
    ess_threshold: f64,
) -> Result<SizerMap> {
    build_map_with_progress(data, grid, config, ess_threshold, |_, _| {})
}

/// As [`build_map`], calling `progress(done, total)` after each ring.
pub fn build_map_with_progress(
    data: &Data,
    grid: &SmoothingGrid,
    config: &BootstrapConfig,
    ess_threshold: f64,
    progress: impl Fn(usize, usize),
) -> Result<SizerMap> {
    config.validate()?;
    if !(ess_threshold.is_finite() && ess_threshold >= 0.0) {
        return Err(Error::contract(format!(
            "ess threshold must be finite and >= 0, got {ess_threshold}"
        )));
    }
    let thetas = grid.theta_grid();
    let total = grid.nu_grid().len();
    let mut cells = Vec::with_capacity(total);
    for (k, &nu) in grid.nu_grid().iter().enumerate() {
        let band = bootstrap_t_band(data, &thetas, nu, config, StreamKey::new(config.seed, k as u64))?;
        let ring = thetas
            .iter()
            .enumerate()
            .map(|(j, &t)| {
                let e = ess(data.angles(), t, nu);
                let state = match band.interval(j) {
                    Some((lo, hi)) => classify(lo, hi, e, ess_threshold),
                    None => CellState::Sparse,
                };
                Cell {
                    state,
                    ess: e,
                    estimate: band.estimate[j],
                    sd: band.sd[j],
                    lower: band.lower[j],
                    upper: band.upper[j],
                }
            })
            .collect();
        cells.push(ring);
        progress(k + 1, total);
    }
    Ok(SizerMap {
        grid: grid.clone(),
        mode: data.mode(),
        config: *config,
        ess_threshold,
        cells,
        provenance: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Peak,
    Trough,
}

/// A significant sign change along one ring.
///
/// The location is the midpoint of the gap between the last cell of the first
/// run and the first cell of the next run; `gap_cells` counts the Flat or
/// Sparse cells in between.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub kind: FeatureKind,
    pub location: Angle,
    pub gap_cells: usize,
    pub gap_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub nu: Concentration,
    pub features: Vec<Feature>,
}

impl FeatureRow {
    pub fn peaks(&self) -> Vec<Angle> {
        self.of_kind(FeatureKind::Peak)
    }

    pub fn troughs(&self) -> Vec<Angle> {
        self.of_kind(FeatureKind::Trough)
    }

    fn of_kind(&self, kind: FeatureKind) -> Vec<Angle> {
        self.features
            .iter()
            .filter(|f| f.kind == kind)
            .map(|f| f.location)
            .collect()
    }
}

/// Peaks (Increasing run followed by a Decreasing run, scanning in the
/// direction of increasing theta) and troughs (the reverse) on ring `k`.
pub fn detect_features(map: &SizerMap, k: usize) -> Result<FeatureRow> {
    let ring = map.cells.get(k).ok_or_else(|| {
        Error::contract(format!("nu index {k} out of range ({} rings)", map.cells.len()))
    })?;
    let states: Vec<CellState> = ring.iter().map(|c| c.state).collect();
    Ok(FeatureRow {
        nu: map.grid.nu_grid()[k],
        features: ring_features(&states),
    })
}

/// Feature detection on a bare ring of states with equispaced cells.
pub fn ring_features(states: &[CellState]) -> Vec<Feature> {
    let m = states.len();
    let spacing = TAU / m as f64;
    let runs = significant_runs(states);
    if runs.len() < 2 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for i in 0..runs.len() {
        let a = runs[i];
        let b = runs[(i + 1) % runs.len()];
        let kind = match (a.state, b.state) {
            (CellState::Increasing, CellState::Decreasing) => FeatureKind::Peak,
            (CellState::Decreasing, CellState::Increasing) => FeatureKind::Trough,
            _ => continue,
        };
        let gap = (b.start + m - a.end - 1) % m;
        let position = a.end as f64 + (gap as f64 + 1.0) / 2.0;
        out.push(Feature {
            kind,
            location: wrap_unchecked(position * spacing),
            gap_cells: gap,
            gap_width: gap as f64 * spacing,
        });
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Run {
    state: CellState,
    start: usize,
    end: usize,
}

/// Maximal runs of Increasing/Decreasing cells, in circular order starting
/// from the first run boundary.
fn significant_runs(states: &[CellState]) -> Vec<Run> {
    let m = states.len();
    let Some(origin) = (0..m).find(|&i| states[i] != states[(i + m - 1) % m]) else {
        return Vec::new();
    };
    let mut runs = Vec::new();
    let mut offset = 0;
    while offset < m {
        let start = (origin + offset) % m;
        let state = states[start];
        let mut len = 1;
        while offset + len < m && states[(start + len) % m] == state {
            len += 1;
        }
        if state.is_significant() {
            runs.push(Run {
                state,
                start,
                end: (start + len - 1) % m,
            });
        }
        offset += len;
    }
    runs
}
