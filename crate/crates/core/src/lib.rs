//! Canonical spatio-temporal Ornstein-Uhlenbeck fields driven by Levy bases.
//!
//! The field `Y_t(x)` integrates `e^{-lambda (t - s)}` against a Levy basis
//! over the backward cone `{(xi, s): s <= t, |x - xi| <= c (t - s)}`.
//! The crate covers the closed-form correlation structure, discrete
//! convolution simulators on rectangular and diamond grids, their exact
//! mean-squared errors, variogram-based estimation and Gaussian prediction.

pub mod error;
pub mod grid;
pub mod inference;
pub mod levy;
pub mod mse;
pub mod predict;
pub mod simulate;
pub mod theory;

pub use error::{Error, Result};
pub use grid::{validate_grid, FieldData, GridSpec, ModelParams};
pub use levy::{sample_increment, solve_seed_from_cumulants, Family, LevySeed, RngStream};
pub use simulate::{simulate_dg, simulate_dg_full, simulate_rg, Algorithm};
