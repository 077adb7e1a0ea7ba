//! Variogram-based estimation of `(lambda, c)` and of the Levy seed.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{FieldData, ModelParams};
use crate::levy::{solve_seed_from_cumulants, Family, LevySeed};
use crate::theory::field_cumulant_factor;

/// Search interval for the least-squares rate parameters.
pub const LS_LOWER: f64 = 1e-6;
pub const LS_UPPER: f64 = 1e3;
const LS_TOL: f64 = 1e-10;
const LS_SCAN: usize = 241;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Space,
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Mm,
    Ls,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Mm => "mm",
            Method::Ls => "ls",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "mm" => Ok(Method::Mm),
            "ls" => Ok(Method::Ls),
            other => Err(format!("unknown method '{other}' (expected mm or ls)")),
        }
    }
}

/// Seed estimate, or the constraint that made the inversion fail.
#[derive(Debug, Clone, PartialEq)]
pub enum SeedEstimate {
    Valid(LevySeed),
    Invalid { family: Family, reason: String },
}

impl SeedEstimate {
    pub fn family(&self) -> Family {
        match self {
            SeedEstimate::Valid(s) => s.family(),
            SeedEstimate::Invalid { family, .. } => *family,
        }
    }

    pub fn is_valid(&self) -> bool {
        matches!(self, SeedEstimate::Valid(_))
    }

    /// Parameter values in [`Family::param_names`] order, `None` where invalid.
    pub fn param_values(&self) -> Vec<Option<f64>> {
        match self {
            SeedEstimate::Valid(s) => s.params().into_iter().map(Some).collect(),
            SeedEstimate::Invalid { family, .. } => vec![None; family.param_names().len()],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimationResult {
    pub lambda_hat: f64,
    pub c_hat: f64,
    pub seed_hat: SeedEstimate,
    pub method: Method,
    pub lags_used: usize,
    /// k-statistics of the field values.
    pub field_cumulants: [f64; 4],
    /// Implied seed cumulants `kappa_l(Y) l^2 lambda^2 / (2c)`.
    pub seed_cumulants: [f64; 4],
}

impl EstimationResult {
    pub fn params(&self) -> Result<ModelParams> {
        ModelParams::new(self.lambda_hat, self.c_hat)
    }

    /// `(name, value)` per seed parameter; invalid entries carry `None`.
    pub fn diagnostics(&self) -> Vec<(&'static str, Option<f64>)> {
        let names = self.seed_hat.family().param_names();
        names.iter().copied().zip(self.seed_hat.param_values()).collect()
    }
}

/// Unbiased k-statistic of the given order (1 to 4). Needs at least `order`
/// values, and two for the variance.
pub fn k_statistic(values: &[f64], order: usize) -> Result<f64> {
    assert!((1..=4).contains(&order), "k-statistic order must be 1..=4");
    let needed = order.max(if order == 1 { 1 } else { 2 });
    if values.len() < needed {
        return Err(Error::TooFewPoints {
            needed,
            found: values.len(),
        });
    }
    let d = values.len() as f64;
    let mean = values.iter().sum::<f64>() / d;
    if order == 1 {
        return Ok(mean);
    }
    // power sums about the mean; orders >= 2 are shift invariant
    let mut s = [0.0f64; 5];
    for &v in values {
        let x = v - mean;
        let x2 = x * x;
        s[1] += x;
        s[2] += x2;
        s[3] += x2 * x;
        s[4] += x2 * x2;
    }
    let (s1, s2, s3, s4) = (s[1], s[2], s[3], s[4]);
    Ok(match order {
        2 => (d * s2 - s1 * s1) / (d * (d - 1.0)),
        3 => (d * d * s3 - 3.0 * d * s2 * s1 + 2.0 * s1.powi(3)) / (d * (d - 1.0) * (d - 2.0)),
        _ => {
            ((d.powi(3) + d * d) * s4 - 4.0 * (d * d + d) * s3 * s1 - 3.0 * (d * d - d) * s2 * s2
                + 12.0 * d * s2 * s1 * s1
                - 6.0 * s1.powi(4))
                / (d * (d - 1.0) * (d - 2.0) * (d - 3.0))
        }
    })
}

/// First four k-statistics of a sample of at least four values.
pub fn k_statistics_of(values: &[f64]) -> Result<[f64; 4]> {
    if values.len() < 4 {
        return Err(Error::TooFewPoints {
            needed: 4,
            found: values.len(),
        });
    }
    Ok([
        k_statistic(values, 1)?,
        k_statistic(values, 2)?,
        k_statistic(values, 3)?,
        k_statistic(values, 4)?,
    ])
}

/// k-statistics over the valid points of a field.
pub fn k_statistics(field: &FieldData) -> Result<[f64; 4]> {
    let v: Vec<f64> = field.valid_values().collect();
    k_statistics_of(&v)
}

fn pair_sums(field: &FieldData, axis: Axis, lag: usize) -> (f64, usize) {
    let g = field.grid();
    let (mut sum, mut count) = (0.0, 0usize);
    let (di, dj) = match axis {
        Axis::Space => (lag, 0),
        Axis::Time => (0, lag),
    };
    if di >= g.n || dj >= g.m {
        return (0.0, 0);
    }
    for i in 0..g.n - di {
        for j in 0..g.m - dj {
            if let (Some(a), Some(b)) = (field.get(i, j), field.get(i + di, j + dj)) {
                sum += (a - b) * (a - b);
                count += 1;
            }
        }
    }
    (sum, count)
}

/// Normalised empirical variogram along `axis` at lags in grid steps.
///
/// Each value averages `(Y_a - Y_b)^2` over valid pairs at that separation
/// on `axis` and zero separation on the other axis, divided by the
/// k-statistic variance of all valid values.
pub fn empirical_variogram(field: &FieldData, axis: Axis, lags: &[usize]) -> Result<Vec<f64>> {
    let v: Vec<f64> = field.valid_values().collect();
    let k2 = k_statistic(&v, 2)?;
    lags.iter()
        .map(|&lag| {
            let (sum, count) = pair_sums(field, axis, lag);
            if lag == 0 || count == 0 {
                return Err(Error::NoPairs { lag });
            }
            Ok(if sum == 0.0 { 0.0 } else { sum / count as f64 / k2 })
        })
        .collect()
}

/// The first `count` lags (in grid steps) along `axis` with at least one
/// valid pair. On a checkerboard mask these are the even lags.
pub fn nonempty_lags(field: &FieldData, axis: Axis, count: usize) -> Vec<usize> {
    let g = field.grid();
    let extent = match axis {
        Axis::Space => g.n,
        Axis::Time => g.m,
    };
    (1..extent)
        .filter(|&lag| pair_sums(field, axis, lag).1 > 0)
        .take(count)
        .collect()
}

/// Rate `r` solving `gamma = 2 (1 - e^{-r d})`.
pub fn invert_variogram(gamma: f64, d: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(Error::DegenerateVariogram { value: gamma });
    }
    let r = -(-gamma / 2.0).ln_1p() / d;
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::DegenerateVariogram { value: gamma });
    }
    Ok(r)
}

/// Moments-matching `(lambda, c)` from one temporal and one spatial
/// variogram value at physical lags `d_t`, `d_x`.
pub fn mm_from_variograms(gamma_t: f64, d_t: f64, gamma_s: f64, d_x: f64) -> Result<(f64, f64)> {
    let lambda = invert_variogram(gamma_t, d_t)?;
    let theta = invert_variogram(gamma_s, d_x)?;
    Ok((lambda, lambda / theta))
}

/// Minimise `f` over `[lo, hi]`: scan a log-spaced grid, then refine by
/// golden-section search around the best scan point.
fn minimize_log_bracketed(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    let grid: Vec<f64> = (0..LS_SCAN)
        .map(|k| (llo + (lhi - llo) * k as f64 / (LS_SCAN - 1) as f64).exp())
        .collect();
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let best = vals
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite())
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .ok_or(Error::OptimizerNoBracket { lo, hi })?;
    if best == 0 || best == LS_SCAN - 1 {
        return Err(Error::OptimizerNoBracket { lo, hi });
    }
    let (mut a, mut b) = (grid[best - 1], grid[best + 1]);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > LS_TOL * (1.0 + x1.abs()) {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    Ok(if f1 <= f2 { x1 } else { x2 })
}

/// Least-squares rate fitted to `(lag, gamma)` pairs against `2 (1 - e^{-r d})`.
pub fn ls_rate(points: &[(f64, f64)]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::NoPairs { lag: 0 });
    }
    if let [(d, g)] = points {
        return invert_variogram(*g, *d);
    }
    let obj = |r: f64| {
        points
            .iter()
            .map(|&(d, g)| {
                let e = g + 2.0 * (-r * d).exp_m1();
                e * e
            })
            .sum::<f64>()
    };
    minimize_log_bracketed(obj, LS_LOWER, LS_UPPER)
}

/// Least-squares `(lambda, c)`: `lambda` from the temporal points, then
/// `lambda / c` from the spatial points.
pub fn ls_from_variograms(temporal: &[(f64, f64)], spatial: &[(f64, f64)]) -> Result<(f64, f64)> {
    let lambda = ls_rate(temporal)?;
    let theta = ls_rate(spatial)?;
    Ok((lambda, lambda / theta))
}

/// Turn `(lambda, c)` and field k-statistics into a full estimate.
pub fn recover_seed(
    lambda: f64,
    c: f64,
    field_cumulants: [f64; 4],
    family: Family,
    method: Method,
    lags_used: usize,
) -> Result<EstimationResult> {
    let params = ModelParams::new(lambda, c)?;
    let mut seed_cumulants = [0.0; 4];
    for (l, k) in seed_cumulants.iter_mut().enumerate() {
        *k = field_cumulants[l] / field_cumulant_factor(&params, l + 1);
    }
    let seed_hat = match solve_seed_from_cumulants(family, seed_cumulants) {
        Ok(s) => SeedEstimate::Valid(s),
        Err(e) => SeedEstimate::Invalid {
            family,
            reason: e.to_string(),
        },
    };
    Ok(EstimationResult {
        lambda_hat: lambda,
        c_hat: c,
        seed_hat,
        method,
        lags_used,
        field_cumulants,
        seed_cumulants,
    })
}

fn steps(lag: f64, spacing: f64) -> Result<usize> {
    let r = lag / spacing;
    let k = r.round();
    if !(k >= 1.0 && (r - k).abs() <= 1e-9 * r) {
        return Err(Error::InvalidGrid("lag is not a positive multiple of the grid spacing"));
    }
    Ok(k as usize)
}

/// Moments matching at physical lags `dt_lag`, `dx_lag`.
pub fn mm_fit(field: &FieldData, dt_lag: f64, dx_lag: f64, family: Family) -> Result<EstimationResult> {
    let g = field.grid();
    let lt = steps(dt_lag, g.dt)?;
    let ls = steps(dx_lag, g.dx)?;
    mm_fit_steps(field, lt, ls, family)
}

/// Moments matching at lags given in grid steps.
pub fn mm_fit_steps(field: &FieldData, lag_t: usize, lag_x: usize, family: Family) -> Result<EstimationResult> {
    let g = *field.grid();
    let kappa = k_statistics(field)?;
    let gt = empirical_variogram(field, Axis::Time, &[lag_t])?[0];
    let gs = empirical_variogram(field, Axis::Space, &[lag_x])?[0];
    let (lambda, c) = mm_from_variograms(gt, lag_t as f64 * g.dt, gs, lag_x as f64 * g.dx)?;
    recover_seed(lambda, c, kappa, family, Method::Mm, 1)
}

/// Moments matching at the smallest lag with valid pairs on each axis
/// (one step on full grids, two on a checkerboard).
pub fn mm_fit_default(field: &FieldData, family: Family) -> Result<EstimationResult> {
    let lt = *nonempty_lags(field, Axis::Time, 1).first().ok_or(Error::NoPairs { lag: 1 })?;
    let ls = *nonempty_lags(field, Axis::Space, 1).first().ok_or(Error::NoPairs { lag: 1 })?;
    mm_fit_steps(field, lt, ls, family)
}

/// Least squares over the first `n_lags` nonempty lags on each axis.
pub fn ls_fit(field: &FieldData, n_lags: usize, family: Family) -> Result<EstimationResult> {
    if n_lags == 0 {
        return Err(Error::InvalidParams("n_lags must be >= 1"));
    }
    let g = *field.grid();
    let kappa = k_statistics(field)?;
    let points = |axis: Axis, spacing: f64| -> Result<Vec<(f64, f64)>> {
        let lags = nonempty_lags(field, axis, n_lags);
        if lags.len() < n_lags {
            return Err(Error::NoPairs {
                lag: lags.last().map_or(1, |l| l + 1),
            });
        }
        let gam = empirical_variogram(field, axis, &lags)?;
        Ok(lags.iter().map(|&l| l as f64 * spacing).zip(gam).collect())
    };
    let (lambda, c) = ls_from_variograms(&points(Axis::Time, g.dt)?, &points(Axis::Space, g.dx)?)?;
    recover_seed(lambda, c, kappa, family, Method::Ls, n_lags)
}

/// Dispatch on [`Method`]; `n_lags` is ignored for moments matching.
pub fn fit(field: &FieldData, method: Method, n_lags: usize, family: Family) -> Result<EstimationResult> {
    match method {
        Method::Mm => mm_fit_default(field, family),
        Method::Ls => ls_fit(field, n_lags, family),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    #[test]
    fn k_statistics_small_sample() {
        let v = [1.0, 2.0, 3.0];
        assert_eq!(k_statistic(&v, 1).unwrap(), 2.0);
        assert_eq!(k_statistic(&v, 2).unwrap(), 1.0);
        assert_eq!(k_statistic(&v, 3).unwrap(), 0.0);
        assert_eq!(
            k_statistic(&v, 4),
            Err(Error::TooFewPoints { needed: 4, found: 3 })
        );
        assert!(k_statistics_of(&v).is_err());
    }

    #[test]
    fn k_statistics_constant() {
        assert_eq!(k_statistics_of(&[2.5; 7]).unwrap(), [2.5, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn variogram_hand_example() {
        let f = FieldData::full(GridSpec::new(1.0, 1.0, 1, 3), vec![0.0, 1.0, 0.0]).unwrap();
        let g = empirical_variogram(&f, Axis::Time, &[1]).unwrap();
        assert!((g[0] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn variogram_constant_in_time() {
        let vals: Vec<f64> = (0..4).flat_map(|i| [i as f64; 5]).collect();
        let f = FieldData::full(GridSpec::new(1.0, 1.0, 4, 5), vals).unwrap();
        assert_eq!(empirical_variogram(&f, Axis::Time, &[1, 2, 3]).unwrap(), vec![0.0; 3]);
        assert!(empirical_variogram(&f, Axis::Space, &[1]).unwrap()[0] > 0.0);
    }

    #[test]
    fn checkerboard_has_no_unit_lag_pairs() {
        let g = GridSpec::new(1.0, 1.0, 5, 5);
        let mask: Vec<bool> = (0..25).map(|k| (k / 5 + k % 5) % 2 == 0).collect();
        let vals: Vec<f64> = (0..25).map(|k| (k as f64).sin()).collect();
        let f = FieldData::new(g, vals, mask).unwrap();
        assert_eq!(empirical_variogram(&f, Axis::Time, &[1]), Err(Error::NoPairs { lag: 1 }));
        assert_eq!(nonempty_lags(&f, Axis::Space, 3), vec![2, 4]);
        assert!(empirical_variogram(&f, Axis::Time, &[2]).is_ok());
    }

    #[test]
    fn exact_inversion() {
        let g = 2.0 * (1.0 - (-0.05f64).exp());
        assert!((invert_variogram(g, 0.05).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(invert_variogram(2.1, 0.05), Err(Error::DegenerateVariogram { value: 2.1 }));
        assert!(invert_variogram(0.0, 0.05).is_err());
    }

    #[test]
    fn ls_recovers_exact_curves() {
        let (lambda, c) = (1.0, 1.0);
        let t: Vec<(f64, f64)> = (1..=15).map(|k| {
            let d = 0.05 * k as f64;
            (d, 2.0 * (1.0 - (-lambda * d).exp()))
        }).collect();
        let s: Vec<(f64, f64)> = (1..=15).map(|k| {
            let d = 0.05 * k as f64;
            (d, 2.0 * (1.0 - (-lambda * d / c).exp()))
        }).collect();
        let (lh, ch) = ls_from_variograms(&t, &s).unwrap();
        assert!((lh - 1.0).abs() < 1e-8 && (ch - 1.0).abs() < 1e-8, "{lh} {ch}");
    }

    #[test]
    fn ls_reports_missing_bracket() {
        // a flat zero variogram pushes the rate to the lower bound
        let pts = [(0.1, 0.0), (0.2, 0.0)];
        assert!(matches!(ls_rate(&pts), Err(Error::OptimizerNoBracket { .. })));
    }

    #[test]
    fn gaussian_seed_recovery() {
        let k = [0.4, 0.005, 0.0, 0.0];
        let r = recover_seed(1.0, 1.0, k, Family::Gaussian, Method::Mm, 1).unwrap();
        let SeedEstimate::Valid(LevySeed::Gaussian { mu, tau }) = r.seed_hat else {
            panic!("expected a Gaussian estimate");
        };
        assert!((mu - 0.2).abs() < 1e-15 && (tau - 0.1).abs() < 1e-15);
    }

    #[test]
    fn invalid_nig_is_recorded_not_raised() {
        let k = [0.4, 0.005, 0.01, 0.0];
        let r = recover_seed(1.0, 1.0, k, Family::NormalInverseGaussian, Method::Ls, 15).unwrap();
        assert!(!r.seed_hat.is_valid());
        assert_eq!(r.diagnostics().len(), 4);
        assert!(r.diagnostics().iter().all(|(_, v)| v.is_none()));
    }
}
