//! Closed-form second-order and marginal properties of the canonical field.

use crate::error::{Error, Result};
use crate::grid::ModelParams;
use crate::levy::LevySeed;

/// Spatio-temporal autocorrelation `min(e^{-lambda|d_t|}, e^{-lambda|d_x|/c})`.
pub fn acf_st(params: &ModelParams, d_x: f64, d_t: f64) -> f64 {
    let lambda = params.lambda();
    let temporal = (-lambda * d_t.abs()).exp();
    let spatial = (-lambda * d_x.abs() / params.c()).exp();
    temporal.min(spatial)
}

/// Spatial autocorrelation for a cone whose half-width grows with slope `c1`
/// for the first unit of time lag and slope `c2` afterwards.
///
/// For `d_x > 2 c1` the two cones first meet at time lag
/// `1 + (d_x - 2 c1) / (2 c2)`, which sets the exponent of the second branch.
pub fn acf_spatial_piecewise(lambda: f64, c1: f64, c2: f64, d_x: f64) -> f64 {
    let d_x = d_x.abs();
    let e2 = (-2.0 * lambda).exp();
    let norm = c1 + (c2 - c1) * e2;
    if d_x <= 2.0 * c1 {
        (c1 + (c2 - c1) * (-2.0 * lambda * (1.0 - d_x / (2.0 * c1))).exp())
            * (-lambda * d_x / c1).exp()
            / norm
    } else {
        c2 * (-2.0 * lambda * (1.0 + (d_x - 2.0 * c1) / (2.0 * c2))).exp() / norm
    }
}

/// Normalised temporal variogram `2 (1 - e^{-lambda d_t})`.
pub fn variogram_t(params: &ModelParams, d_t: f64) -> f64 {
    -2.0 * (-params.lambda() * d_t).exp_m1()
}

/// Normalised spatial variogram `2 (1 - e^{-lambda d_x / c})`.
pub fn variogram_s(params: &ModelParams, d_x: f64) -> f64 {
    -2.0 * (-params.lambda() * d_x / params.c()).exp_m1()
}

/// `kappa_l(Y) = kappa_l(L') * 2c / (l^2 lambda^2)`, `order` in `1..=4`.
pub fn cumulants_of_field(params: &ModelParams, seed: &LevySeed, order: usize) -> f64 {
    seed.cumulant(order) * field_cumulant_factor(params, order)
}

/// The factor `2c / (l^2 lambda^2)` linking seed and field cumulants.
pub fn field_cumulant_factor(params: &ModelParams, order: usize) -> f64 {
    let l = order as f64;
    let lambda = params.lambda();
    2.0 * params.c() / (l * l * lambda * lambda)
}

/// Seed mean and standard deviation of the temporal OU process that a
/// Gaussian canonical field equals in law at a fixed location.
pub fn ou_equivalent_params(params: &ModelParams, seed: &LevySeed) -> Result<(f64, f64)> {
    let LevySeed::Gaussian { mu, tau } = *seed else {
        return Err(Error::NotGaussian);
    };
    let (lambda, c) = (params.lambda(), params.c());
    Ok((2.0 * c * mu / lambda, (c * tau * tau / lambda).sqrt()))
}
