//! Mean-squared error of the discrete-convolution simulators against the
//! exact field, for the canonical kernel with `c = 1` and `dx = dt = delta`.
//!
//! For a Gaussian basis with seed `(mu, tau)` the error splits into
//! `(mu * int (k - h))^2 + tau^2 * int (k - h)^2`, where `k` is the exact
//! kernel on the cone and `h` its piecewise-constant approximation.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    Rg,
    Dg,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Rg => "rg",
            Scheme::Dg => "dg",
        })
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "rg" => Ok(Scheme::Rg),
            "dg" => Ok(Scheme::Dg),
            other => Err(format!("unknown scheme '{other}' (expected rg or dg)")),
        }
    }
}

/// Squared bias and variance contributions; the MSE is their sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MseParts {
    pub bias2: f64,
    pub variance: f64,
}

impl MseParts {
    pub fn total(&self) -> f64 {
        self.bias2 + self.variance
    }
}

/// Neumaier-compensated sum.
fn sum_compensated(terms: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut comp) = (0.0f64, 0.0f64);
    for x in terms {
        let t = s + x;
        if s.abs() >= x.abs() {
            comp += (s - t) + x;
        } else {
            comp += (x - t) + s;
        }
        s = t;
    }
    s + comp
}

fn check_inputs(params: &ModelParams, mu: f64, tau: f64, delta: f64) -> Result<f64> {
    if params.c() != 1.0 {
        return Err(Error::UnsupportedShape { c: params.c() });
    }
    if !mu.is_finite() {
        return Err(Error::InvalidParams("mu must be finite"));
    }
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::InvalidParams("tau must be finite and >= 0"));
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::InvalidParams("delta must be finite and > 0"));
    }
    Ok(params.lambda())
}

/// Number of temporal kernel steps `p = r / delta`, required integral.
pub fn truncation_steps(delta: f64, r: f64) -> Result<usize> {
    let ratio = r / delta;
    let p = ratio.round();
    if !ratio.is_finite() || p < 1.0 || (ratio - p).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::NonIntegerTruncation { ratio });
    }
    Ok(p as usize)
}

/// Rectangular-grid MSE components with `p` temporal steps.
pub fn mse_rg_parts_p(params: &ModelParams, mu: f64, tau: f64, delta: f64, p: usize) -> Result<MseParts> {
    let lambda = check_inputs(params, mu, tau, delta)?;
    let d = delta;
    let mean = sum_compensated((0..=p).map(|j| {
        let j = j as f64;
        (2.0 * j + 1.0) * d * d * (-lambda * j * d).exp()
    }));
    let bias = mu * (2.0 / (lambda * lambda) - mean);
    let a = -4.0 / (lambda * lambda) * -(-lambda * d / 2.0).exp_m1();
    let e = (-lambda * d).exp();
    let var_sum = sum_compensated((0..=p).map(|j| {
        let j = j as f64;
        (-2.0 * lambda * j * d).exp()
            * (-4.0 * j * d / lambda + a + 2.0 * (2.0 * j + 1.0) * d / lambda * e + (2.0 * j + 1.0) * d * d)
    }));
    Ok(MseParts {
        bias2: bias * bias,
        variance: tau * tau * (1.0 / (2.0 * lambda * lambda) + var_sum),
    })
}

/// Diamond-grid MSE components with `p` temporal steps.
pub fn mse_dg_parts_p(params: &ModelParams, mu: f64, tau: f64, delta: f64, p: usize) -> Result<MseParts> {
    let lambda = check_inputs(params, mu, tau, delta)?;
    let d = delta;
    let mean = sum_compensated((0..=p).map(|j| {
        let j = j as f64;
        2.0 * (j + 1.0) * d * d * (-lambda * j * d).exp()
    }));
    let bias = mu * (2.0 / (lambda * lambda) - mean);
    let b = (-lambda * d).exp_m1();
    let cell = d * d - 2.0 / (lambda * lambda) * b * b;
    let var_sum = sum_compensated((0..=p).map(|j| {
        let jf = j as f64;
        2.0 * (jf + 1.0) * (-2.0 * lambda * jf * d).exp() * cell
    }));
    Ok(MseParts {
        bias2: bias * bias,
        variance: tau * tau * (1.0 / (2.0 * lambda * lambda) + var_sum),
    })
}

pub fn mse_parts(scheme: Scheme, params: &ModelParams, mu: f64, tau: f64, delta: f64, r: f64) -> Result<MseParts> {
    check_inputs(params, mu, tau, delta)?;
    let p = truncation_steps(delta, r)?;
    match scheme {
        Scheme::Rg => mse_rg_parts_p(params, mu, tau, delta, p),
        Scheme::Dg => mse_dg_parts_p(params, mu, tau, delta, p),
    }
}

/// MSE of the rectangular-grid simulator with spacing `delta` and
/// truncation horizon `r`.
pub fn mse_rg(params: &ModelParams, mu: f64, tau: f64, delta: f64, r: f64) -> Result<f64> {
    mse_parts(Scheme::Rg, params, mu, tau, delta, r).map(|m| m.total())
}

/// MSE of the diamond-grid simulator with time spacing `delta` and
/// truncation horizon `r`.
pub fn mse_dg(params: &ModelParams, mu: f64, tau: f64, delta: f64, r: f64) -> Result<f64> {
    mse_parts(Scheme::Dg, params, mu, tau, delta, r).map(|m| m.total())
}

/// MSE as `r -> infinity` at fixed `delta`.
pub fn mse_limit_fixed_delta(scheme: Scheme, params: &ModelParams, mu: f64, tau: f64, delta: f64) -> Result<f64> {
    let lambda = check_inputs(params, mu, tau, delta)?;
    let (l2, ld) = (lambda * lambda, lambda * delta);
    let e = (-ld).exp();
    let one_m_e = -(-ld).exp_m1();
    let one_m_e2 = -(-2.0 * ld).exp_m1();
    let bias_pref = 4.0 * mu * mu / (l2 * l2);
    Ok(match scheme {
        Scheme::Rg => {
            let bf = 1.0 - ld * ld / (one_m_e * one_m_e) * (1.0 + e) / 2.0;
            let half = -(-ld / 2.0).exp_m1();
            let v1 = 1.0 / (2.0 * l2)
                * (1.0 - (2.0 * one_m_e / ld - 1.0) * 4.0 * ld * ld * e * e / (one_m_e2 * one_m_e2));
            let v2 = (e / l2 + delta / (2.0 * lambda) - half / (l2 * (ld / 2.0))) * 2.0 * ld / one_m_e2;
            bias_pref * bf * bf + tau * tau * (v1 + v2)
        }
        Scheme::Dg => {
            let bf = 1.0 - ld * ld / (one_m_e * one_m_e);
            let v = 1.0
                - (2.0 * one_m_e * one_m_e / (ld * ld) - 1.0) * 4.0 * ld * ld / (one_m_e2 * one_m_e2);
            bias_pref * bf * bf + tau * tau / (2.0 * l2) * v
        }
    })
}

/// Leading term of the MSE at fixed horizon `r` as `delta -> 0`:
/// `[4 mu^2 / lambda^4 (1 + lambda r)^2 + tau^2 / (2 lambda^2) (1 + 2 lambda r)] e^{-2 lambda r}`,
/// shared by both schemes.
pub fn mse_leading_fixed_r(scheme: Scheme, params: &ModelParams, mu: f64, tau: f64, r: f64) -> Result<f64> {
    let lambda = check_inputs(params, mu, tau, 1.0)?;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParams("R must be finite and > 0"));
    }
    let l2 = lambda * lambda;
    let lr = lambda * r;
    let bias = match scheme {
        Scheme::Rg | Scheme::Dg => 4.0 * mu * mu / (l2 * l2) * (1.0 + lr) * (1.0 + lr),
    };
    Ok((bias + tau * tau / (2.0 * l2) * (1.0 + 2.0 * lr)) * (-2.0 * lr).exp())
}
