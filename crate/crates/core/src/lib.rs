//! Scale-space significance analysis (SiZer) for circular data.
//!
//! The crate covers von Mises kernel density estimation on the circle, local
//! linear regression with a circular covariate, bootstrap-t confidence bands
//! for the derivative of either smoother, and the resulting significance map:
//! one ring per smoothing level, each cell marked as significantly increasing,
//! decreasing, flat, or too sparse to judge.
//!
//! ```no_run
//! use circsizer::prelude::*;
//!
//! let sample = CircularSample::from_radians(&[0.3, 0.5, 0.6, 3.1, 3.3, 3.4]).unwrap();
//! let grid = SmoothingGrid::from_values(64, &[1.0, 5.0, 20.0]).unwrap();
//! let config = BootstrapConfig { seed: 7, ..Default::default() };
//! let map = build_map(&Data::Density(sample), &grid, &config, 5.0).unwrap();
//! for row in map.features() {
//!     println!("nu={} peaks={:?}", row.nu, row.peaks());
//! }
//! ```

pub mod circkernel;
pub mod density;
pub mod error;
pub mod inference;
pub mod io;
pub mod regression;
pub mod render;
pub mod simgen;
pub mod sizermap;
mod stats;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::circkernel::{
        bessel_i0_scaled, vm_kernel, vm_kernel_deriv, wrap, Angle, Concentration, VonMisesParams,
    };
    pub use crate::density::{density_deriv, density_deriv_sd, density_estimate, CircularSample};
    pub use crate::error::{Error, Result};
    pub use crate::inference::{
        bootstrap_t_band, classify, BootstrapConfig, CellState, ConfidenceBand, Data, Mode,
        StreamKey,
    };
    pub use crate::io::{ingest, export_map, import_map, AngleUnit, Convention, IngestSpec};
    pub use crate::regression::{deriv_weights, loclin_fit, CircLinearSample, LocalFit};
    pub use crate::render::{render_svg, LabelType, Palette, RadialScale, RenderSpec};
    pub use crate::sizermap::{
        build_map, detect_features, ess, FeatureRow, SizerMap, SmoothingGrid,
    };
    pub use crate::simgen::{
        regression_scenario, sample_mixture, sample_regression, sample_von_mises, scenario,
        MixtureSpec, RegressionModel,
    };
}
