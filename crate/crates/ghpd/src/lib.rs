//! Exact-level credible sets for discrete parameters.
//!
//! Plain highest-density credible sets cannot hit an arbitrary level when
//! the parameter is discrete: the achievable masses jump. This crate closes
//! the gap with a membership function that is 1 above a mass threshold, 0
//! below it, and a shared weight gamma on the tied labels, chosen so the
//! credible mass equals 1 - alpha exactly. The gamma labels can be
//! randomized into or out of a concrete set realization.
//!
//! On top of that core the crate ships a Gaussian class-conditional
//! classifier (QDA) whose per-sample posteriors feed the credible sets, a
//! seeded simulation generator, and a deterministic SVG renderer for
//! steering-wheel plots that visualize classification uncertainty.

pub use nalgebra;

pub mod credible;
pub mod error;
pub mod grid;
pub mod io;
pub mod posterior;
pub mod qda;
pub mod rng;
pub mod simulate;
pub mod wheel;

pub use credible::{
    fair_gamma, fair_ghpd, mass_threshold, minimal_size_oracle, values_variance, Phi, Region,
};
pub use error::{Error, Result};
pub use grid::{boundary_mass, grid_ghpd, interior_intervals, GridPosterior};
pub use posterior::{CredibleLevel, DiscretePosterior};
pub use qda::{fit_qda, fit_qda_with_priors, LabeledDataset, QdaModel};
pub use simulate::{simulate, SimulationSpec};
pub use wheel::{build_wheel, render_panel, render_svg, Palette, ViewBounds, WheelSpec};
