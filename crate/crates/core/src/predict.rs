//! Conditional prediction for a Gaussian canonical field.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::ModelParams;
use crate::levy::LevySeed;
use crate::theory::acf_st;

/// Observation sites `(x, t)` with their values.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteList {
    sites: Vec<(f64, f64)>,
    values: Vec<f64>,
}

impl SiteList {
    pub fn new(sites: Vec<(f64, f64)>, values: Vec<f64>) -> Result<Self> {
        if sites.len() != values.len() {
            return Err(Error::LengthMismatch {
                expected: sites.len(),
                actual: values.len(),
            });
        }
        if sites.iter().any(|(x, t)| !x.is_finite() || !t.is_finite()) || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("sites and values must be finite"));
        }
        check_distinct(&sites)?;
        Ok(Self { sites, values })
    }

    pub fn sites(&self) -> &[(f64, f64)] {
        &self.sites
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }
}

fn check_distinct(sites: &[(f64, f64)]) -> Result<()> {
    for i in 0..sites.len() {
        for j in i + 1..sites.len() {
            if sites[i] == sites[j] {
                return Err(Error::DuplicateSites(i, j));
            }
        }
    }
    Ok(())
}

/// Stationary variance `c tau^2 / (2 lambda^2)`.
pub fn prior_variance(params: &ModelParams, tau: f64) -> f64 {
    params.c() * tau * tau / (2.0 * params.lambda() * params.lambda())
}

/// Covariance matrix of the field at `sites`.
pub fn build_covariance(params: &ModelParams, tau: f64, sites: &[(f64, f64)]) -> Result<DMatrix<f64>> {
    check_distinct(sites)?;
    let s = prior_variance(params, tau);
    let n = sites.len();
    Ok(DMatrix::from_fn(n, n, |i, j| {
        let (xi, ti) = sites[i];
        let (xj, tj) = sites[j];
        s * acf_st(params, xi - xj, ti - tj)
    }))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub mean: f64,
    pub variance: f64,
    /// Diagonal jitter added to make the correlation matrix factorise.
    pub nugget: f64,
}

/// Predictor options.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictOptions {
    /// Jitter, relative to the unit diagonal, tried once if the
    /// correlation matrix fails to factorise. Zero disables the retry.
    pub nugget: f64,
}

impl Default for PredictOptions {
    fn default() -> Self {
        Self { nugget: 0.0 }
    }
}

/// Mean and variance of `Y(target)` given the observations.
pub fn predict_gaussian(
    params: &ModelParams,
    seed: &LevySeed,
    obs: &SiteList,
    target: (f64, f64),
) -> Result<(f64, f64)> {
    predict_with(params, seed, obs, target, PredictOptions::default()).map(|p| (p.mean, p.variance))
}

pub fn predict_with(
    params: &ModelParams,
    seed: &LevySeed,
    obs: &SiteList,
    target: (f64, f64),
    opts: PredictOptions,
) -> Result<Prediction> {
    let LevySeed::Gaussian { mu, tau } = *seed else {
        return Err(Error::NotGaussian);
    };
    if obs.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, found: 0 });
    }
    let n = obs.len();
    let corr = DMatrix::from_fn(n, n, |i, j| {
        let (xi, ti) = obs.sites[i];
        let (xj, tj) = obs.sites[j];
        acf_st(params, xi - xj, ti - tj)
    });
    let r = DVector::from_iterator(
        n,
        obs.sites.iter().map(|&(x, t)| acf_st(params, x - target.0, t - target.1)),
    );
    let (chol, nugget) = match corr.clone().cholesky() {
        Some(c) => (c, 0.0),
        None if opts.nugget > 0.0 => {
            let jittered = &corr + DMatrix::identity(n, n) * opts.nugget;
            (jittered.cholesky().ok_or(Error::SingularCorrelation)?, opts.nugget)
        }
        None => return Err(Error::SingularCorrelation),
    };
    let m0 = 2.0 * params.c() * mu / (params.lambda() * params.lambda());
    let resid = DVector::from_iterator(n, obs.values.iter().map(|y| y - m0));
    let w = chol.solve(&r);
    let mean = m0 + w.dot(&resid);
    let explained = w.dot(&r);
    let variance = prior_variance(params, tau) * (1.0 - explained).clamp(0.0, 1.0);
    Ok(Prediction { mean, variance, nugget })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> ModelParams {
        ModelParams::new(1.0, 1.0).unwrap()
    }

    #[test]
    fn covariance_examples() {
        let c = build_covariance(&unit(), 0.1, &[(0.0, 0.0)]).unwrap();
        assert!((c[(0, 0)] - 0.005).abs() < 1e-18);
        let c = build_covariance(&unit(), 0.1, &[(0.0, 0.0), (1.0, 2.0)]).unwrap();
        assert!((c[(0, 1)] - 0.005 * (-2.0f64).exp()).abs() < 1e-18);
        assert_eq!(c[(0, 1)], c[(1, 0)]);
    }

    #[test]
    fn duplicate_sites_rejected() {
        assert_eq!(
            build_covariance(&unit(), 0.1, &[(0.0, 0.0), (1.0, 1.0), (0.0, 0.0)]),
            Err(Error::DuplicateSites(0, 2))
        );
        assert!(SiteList::new(vec![(1.0, 2.0), (1.0, 2.0)], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn one_observation_conditioning() {
        let p = ModelParams::new(0.8, 1.5).unwrap();
        let seed = LevySeed::gaussian(0.2, 0.3).unwrap();
        let obs = SiteList::new(vec![(0.3, 1.0)], vec![1.7]).unwrap();
        let target = (1.0, 1.4);
        let rho = acf_st(&p, 0.7, 0.4);
        let m0 = 2.0 * 1.5 * 0.2 / 0.64;
        let (m, v) = predict_gaussian(&p, &seed, &obs, target).unwrap();
        assert!((m - (m0 + rho * (1.7 - m0))).abs() < 1e-12);
        assert!((v - prior_variance(&p, 0.3) * (1.0 - rho * rho)).abs() < 1e-12);
    }

    #[test]
    fn interpolates_observed_site() {
        let seed = LevySeed::gaussian(0.2, 0.1).unwrap();
        let obs = SiteList::new(vec![(0.0, 0.0), (0.5, 0.2), (1.0, 1.0)], vec![0.41, 0.38, 0.45]).unwrap();
        let (m, v) = predict_gaussian(&unit(), &seed, &obs, (0.5, 0.2)).unwrap();
        assert!((m - 0.38).abs() < 1e-10);
        assert!(v <= 1e-10 * 0.005);
    }

    #[test]
    fn non_gaussian_seed_rejected() {
        let seed = LevySeed::gamma(4.3, 21.5).unwrap();
        let obs = SiteList::new(vec![(0.0, 0.0)], vec![1.0]).unwrap();
        assert_eq!(predict_gaussian(&unit(), &seed, &obs, (1.0, 1.0)), Err(Error::NotGaussian));
    }
}
