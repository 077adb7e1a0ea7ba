//! Levy seeds: cumulants, moment inversion and increment sampling.
//!
//! A homogeneous Levy basis is described by the law of its seed `L'`, the
//! unit-area atom. The increment over a cell of area `a` has cumulants
//! `a * kappa_l(L')`, which for every family below is again a member of the
//! same family with area-scaled parameters:
//!
//! | family   | seed parameters       | law of `L(E)`, `a = |E|`        |
//! |----------|-----------------------|---------------------------------|
//! | Gaussian | `mu, tau`             | `N(mu a, tau^2 a)`              |
//! | IG       | `delta, gamma`        | `IG(delta a, gamma)`            |
//! | NIG      | `alpha, beta, mu, delta` | `NIG(alpha, beta, mu a, delta a)` |
//! | Gamma    | `alpha, beta` (rate)  | `Gamma(alpha a, beta)`          |

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Gamma, InverseGaussian, StandardNormal};

use crate::error::{Error, Result};

/// Family tag of a [`LevySeed`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Gaussian,
    InverseGaussian,
    NormalInverseGaussian,
    Gamma,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::Gaussian,
        Family::InverseGaussian,
        Family::NormalInverseGaussian,
        Family::Gamma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::InverseGaussian => "ig",
            Family::NormalInverseGaussian => "nig",
            Family::Gamma => "gamma",
        }
    }

    /// Parameter names in the order used by [`LevySeed::params`].
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Family::Gaussian => &["mu", "tau"],
            Family::InverseGaussian => &["delta", "gamma"],
            Family::NormalInverseGaussian => &["alpha", "beta", "mu", "delta"],
            Family::Gamma => &["alpha", "beta"],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(Family::Gaussian),
            "ig" | "inverse-gaussian" => Ok(Family::InverseGaussian),
            "nig" | "normal-inverse-gaussian" => Ok(Family::NormalInverseGaussian),
            "gamma" => Ok(Family::Gamma),
            other => Err(format!("unknown basis family `{other}`")),
        }
    }
}

/// Law of the unit-area seed of a homogeneous Levy basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevySeed {
    Gaussian { mu: f64, tau: f64 },
    InverseGaussian { delta: f64, gamma: f64 },
    NormalInverseGaussian { alpha: f64, beta: f64, mu: f64, delta: f64 },
    Gamma { alpha: f64, beta: f64 },
}

fn positive(x: f64, what: &'static str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSeed(what))
    }
}

impl LevySeed {
    /// Gaussian seed with mean `mu` and standard deviation `tau`. `tau = 0`
    /// is accepted and gives a deterministic basis.
    pub fn gaussian(mu: f64, tau: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::InvalidSeed("mu must be finite"));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::InvalidSeed("tau must be finite and >= 0"));
        }
        Ok(LevySeed::Gaussian { mu, tau })
    }

    pub fn inverse_gaussian(delta: f64, gamma: f64) -> Result<Self> {
        positive(delta, "IG delta must be > 0")?;
        positive(gamma, "IG gamma must be > 0")?;
        Ok(LevySeed::InverseGaussian { delta, gamma })
    }

    pub fn nig(alpha: f64, beta: f64, mu: f64, delta: f64) -> Result<Self> {
        positive(alpha, "NIG alpha must be > 0")?;
        positive(delta, "NIG delta must be > 0")?;
        if !mu.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidSeed("NIG beta and mu must be finite"));
        }
        if beta.abs() >= alpha {
            return Err(Error::InvalidSeed("NIG requires |beta| < alpha"));
        }
        Ok(LevySeed::NormalInverseGaussian {
            alpha,
            beta,
            mu,
            delta,
        })
    }

    pub fn gamma(alpha: f64, beta: f64) -> Result<Self> {
        positive(alpha, "Gamma alpha must be > 0")?;
        positive(beta, "Gamma beta must be > 0")?;
        Ok(LevySeed::Gamma { alpha, beta })
    }

    /// Build a seed of `family` from its parameters in
    /// [`Family::param_names`] order.
    pub fn from_params(family: Family, p: &[f64]) -> Result<Self> {
        let want = family.param_names().len();
        if p.len() != want {
            return Err(Error::LengthMismatch {
                expected: want,
                actual: p.len(),
            });
        }
        match family {
            Family::Gaussian => Self::gaussian(p[0], p[1]),
            Family::InverseGaussian => Self::inverse_gaussian(p[0], p[1]),
            Family::NormalInverseGaussian => Self::nig(p[0], p[1], p[2], p[3]),
            Family::Gamma => Self::gamma(p[0], p[1]),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            LevySeed::Gaussian { .. } => Family::Gaussian,
            LevySeed::InverseGaussian { .. } => Family::InverseGaussian,
            LevySeed::NormalInverseGaussian { .. } => Family::NormalInverseGaussian,
            LevySeed::Gamma { .. } => Family::Gamma,
        }
    }

    /// Parameters in [`Family::param_names`] order.
    pub fn params(&self) -> Vec<f64> {
        match *self {
            LevySeed::Gaussian { mu, tau } => vec![mu, tau],
            LevySeed::InverseGaussian { delta, gamma } => vec![delta, gamma],
            LevySeed::NormalInverseGaussian {
                alpha,
                beta,
                mu,
                delta,
            } => vec![alpha, beta, mu, delta],
            LevySeed::Gamma { alpha, beta } => vec![alpha, beta],
        }
    }

    /// The `order`-th cumulant of the seed, `order` in `1..=4`.
    ///
    /// # Panics
    ///
    /// If `order` is outside `1..=4`.
    pub fn cumulant(&self, order: usize) -> f64 {
        assert!((1..=4).contains(&order), "cumulant order must be 1..=4");
        match *self {
            LevySeed::Gaussian { mu, tau } => match order {
                1 => mu,
                2 => tau * tau,
                _ => 0.0,
            },
            LevySeed::InverseGaussian { delta, gamma } => match order {
                1 => delta / gamma,
                2 => delta / gamma.powi(3),
                3 => 3.0 * delta / gamma.powi(5),
                _ => 15.0 * delta / gamma.powi(7),
            },
            LevySeed::NormalInverseGaussian {
                alpha,
                beta,
                mu,
                delta,
            } => {
                let a2 = alpha * alpha;
                let g = (a2 - beta * beta).sqrt();
                match order {
                    1 => mu + delta * beta / g,
                    2 => delta * a2 / g.powi(3),
                    3 => 3.0 * delta * beta * a2 / g.powi(5),
                    _ => 3.0 * delta * (a2 + 4.0 * beta * beta) * a2 / g.powi(7),
                }
            }
            LevySeed::Gamma { alpha, beta } => match order {
                1 => alpha / beta,
                2 => alpha / (beta * beta),
                3 => 2.0 * alpha / beta.powi(3),
                _ => 6.0 * alpha / beta.powi(4),
            },
        }
    }

    /// First four seed cumulants.
    pub fn cumulants(&self) -> [f64; 4] {
        [
            self.cumulant(1),
            self.cumulant(2),
            self.cumulant(3),
            self.cumulant(4),
        ]
    }

    /// Mean and standard deviation of the seed.
    pub fn mean_sd(&self) -> (f64, f64) {
        (self.cumulant(1), self.cumulant(2).sqrt())
    }

    /// Law of the basis increment over a cell of the given area.
    pub fn increment_law(&self, area: f64) -> IncrementLaw {
        assert!(area > 0.0 && area.is_finite(), "cell area must be > 0");
        match *self {
            LevySeed::Gaussian { mu, tau } => IncrementLaw::Gaussian {
                mean: mu * area,
                sd: tau * area.sqrt(),
            },
            LevySeed::InverseGaussian { delta, gamma } => {
                let d = delta * area;
                IncrementLaw::InverseGaussian(
                    InverseGaussian::new(d / gamma, d * d).expect("validated IG parameters"),
                )
            }
            LevySeed::NormalInverseGaussian {
                alpha,
                beta,
                mu,
                delta,
            } => {
                let d = delta * area;
                let g = (alpha * alpha - beta * beta).sqrt();
                IncrementLaw::NormalInverseGaussian {
                    beta,
                    mu: mu * area,
                    mixing: InverseGaussian::new(d / g, d * d).expect("validated NIG parameters"),
                }
            }
            LevySeed::Gamma { alpha, beta } => IncrementLaw::Gamma(
                Gamma::new(alpha * area, 1.0 / beta).expect("validated Gamma parameters"),
            ),
        }
    }
}

/// Sampler for `L(E)` at a fixed cell area.
#[derive(Debug, Clone, Copy)]
pub enum IncrementLaw {
    Gaussian { mean: f64, sd: f64 },
    InverseGaussian(InverseGaussian<f64>),
    /// Normal variance-mean mixture `mu + beta V + sqrt(V) Z`.
    NormalInverseGaussian {
        beta: f64,
        mu: f64,
        mixing: InverseGaussian<f64>,
    },
    Gamma(Gamma<f64>),
}

impl Distribution<f64> for IncrementLaw {
    fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            IncrementLaw::Gaussian { mean, sd } => {
                let z: f64 = rng.sample(StandardNormal);
                mean + sd * z
            }
            IncrementLaw::InverseGaussian(ig) => ig.sample(rng),
            IncrementLaw::NormalInverseGaussian { beta, mu, mixing } => {
                let v = mixing.sample(rng);
                let z: f64 = rng.sample(StandardNormal);
                mu + beta * v + v.sqrt() * z
            }
            IncrementLaw::Gamma(g) => g.sample(rng),
        }
    }
}

/// Reproducible random stream keyed by `(master_seed, stream_id)`.
///
/// Backed by ChaCha20: the 256-bit key is expanded from `master_seed` with
/// `SeedableRng::seed_from_u64` and `stream_id` selects the 64-bit ChaCha
/// stream (nonce), so distinct ids give non-overlapping sequences under the
/// same key. One stream must not be shared between concurrent tasks.
#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            rng,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// `count` iid draws of the basis increment over a cell of `area`.
pub fn sample_increment(
    seed: &LevySeed,
    area: f64,
    rng: &mut RngStream,
    count: usize,
) -> Vec<f64> {
    let law = seed.increment_law(area);
    (0..count).map(|_| law.sample(rng)).collect()
}

fn reject(family: Family, reason: &'static str) -> Error {
    Error::InvalidCumulants {
        family: family.name(),
        reason,
    }
}

/// Recover seed parameters from its first four cumulants.
///
/// Gaussian, IG and Gamma only use `k1, k2`. NIG inverts all four through
/// the ratios `k3/k2 = 3 beta / g^2` and `k4/k2 = 3 (g^2 + 5 beta^2) / g^4`,
/// `g^2 = alpha^2 - beta^2`, which admit a solution iff `3 k4 k2 > 5 k3^2`.
pub fn solve_seed_from_cumulants(family: Family, k: [f64; 4]) -> Result<LevySeed> {
    let [k1, k2, k3, k4] = k;
    if !k.iter().all(|v| v.is_finite()) {
        return Err(reject(family, "non-finite cumulant"));
    }
    if k2 <= 0.0 {
        return Err(reject(family, "second cumulant must be > 0"));
    }
    match family {
        Family::Gaussian => LevySeed::gaussian(k1, k2.sqrt()),
        Family::InverseGaussian => {
            if k1 <= 0.0 {
                return Err(reject(family, "mean must be > 0"));
            }
            let gamma = (k1 / k2).sqrt();
            LevySeed::inverse_gaussian(k1 * gamma, gamma)
        }
        Family::Gamma => {
            if k1 <= 0.0 {
                return Err(reject(family, "mean must be > 0"));
            }
            let beta = k1 / k2;
            LevySeed::gamma(k1 * beta, beta)
        }
        Family::NormalInverseGaussian => {
            if 3.0 * k4 * k2 <= 5.0 * k3 * k3 {
                return Err(reject(family, "requires 3 k4 k2 > 5 k3^2"));
            }
            let a = k3 / k2;
            let b = k4 / k2;
            let g2 = 3.0 / (b - 5.0 * a * a / 3.0);
            let g = g2.sqrt();
            let beta = a * g2 / 3.0;
            let alpha = (g2 + beta * beta).sqrt();
            let delta = k2 * g * g2 / (alpha * alpha);
            let mu = k1 - delta * beta / g;
            LevySeed::nig(alpha, beta, mu, delta)
                .map_err(|_| reject(family, "inverted parameters violate constraints"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn cumulant_examples() {
        let g = LevySeed::gamma(4.3, 21.5).unwrap();
        assert!(rel(g.cumulant(1), 0.2) < 1e-14);
        let n = LevySeed::gaussian(0.2, 0.1).unwrap();
        assert_eq!(n.cumulant(3), 0.0);
        assert_eq!(n.cumulant(4), 0.0);
        let ig = LevySeed::inverse_gaussian(1.0, 4.8).unwrap();
        assert!(rel(ig.cumulant(2), 1.0 / 4.8f64.powi(3)) < 1e-14);
        assert!((ig.cumulant(2) - 9.0422e-3).abs() < 1e-7);
    }

    #[test]
    fn mean_sd_examples() {
        let (m, s) = LevySeed::gamma(4.3, 21.5).unwrap().mean_sd();
        assert!(rel(m, 0.2) < 1e-14);
        assert!((s - 0.09645).abs() < 1e-5);
        assert_eq!(LevySeed::gaussian(0.2, 0.1).unwrap().mean_sd(), (0.2, 0.1));
        let (m, s) = LevySeed::nig(20.0, -5.0, 0.27, 0.2).unwrap().mean_sd();
        assert!((m - 0.2184).abs() < 1e-4);
        assert!((s - 0.1050).abs() < 1e-4);
    }

    #[test]
    fn inversion_examples() {
        let g = solve_seed_from_cumulants(Family::Gamma, [0.2, 9.3023e-3, 0.0, 0.0]).unwrap();
        let LevySeed::Gamma { alpha, beta } = g else {
            panic!()
        };
        assert!((alpha - 4.3).abs() < 1e-3 && (beta - 21.5).abs() < 1e-2);

        let s = solve_seed_from_cumulants(Family::Gaussian, [0.2, 0.01, 9.0, 9.0]).unwrap();
        let LevySeed::Gaussian { mu, tau } = s else {
            panic!()
        };
        assert!(rel(mu, 0.2) < 1e-15 && rel(tau, 0.1) < 1e-15);

        let nig = LevySeed::nig(20.0, -5.0, 0.27, 0.2).unwrap();
        let back = solve_seed_from_cumulants(Family::NormalInverseGaussian, nig.cumulants()).unwrap();
        for (a, b) in back.params().iter().zip(nig.params()) {
            assert!(rel(*a, b) < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn nig_inversion_rejects_constraint_violations() {
        // 3 k4 k2 = 3 * 1 * 1 = 3 < 5 k3^2 = 5
        let err = solve_seed_from_cumulants(Family::NormalInverseGaussian, [0.1, 1.0, 1.0, 1.0]);
        assert!(matches!(err, Err(Error::InvalidCumulants { .. })));
        // boundary case is rejected too
        let err = solve_seed_from_cumulants(Family::NormalInverseGaussian, [0.1, 3.0, 3.0, 5.0]);
        assert!(err.is_err());
        let err = solve_seed_from_cumulants(Family::NormalInverseGaussian, [0.1, -1.0, 0.0, 1.0]);
        assert!(err.is_err());
    }

    #[test]
    fn positive_families_reject_nonpositive_mean() {
        for fam in [Family::InverseGaussian, Family::Gamma] {
            assert!(solve_seed_from_cumulants(fam, [-0.1, 0.01, 0.0, 0.0]).is_err());
        }
    }

    #[test]
    fn degenerate_gaussian_is_constant() {
        let s = LevySeed::gaussian(0.2, 0.0).unwrap();
        let mut rng = RngStream::new(1, 0);
        let draws = sample_increment(&s, 0.0025, &mut rng, 100);
        assert!(draws.iter().all(|&d| d == 0.2 * 0.0025));
    }

    #[test]
    fn streams_are_reproducible() {
        let s = LevySeed::nig(20.0, -5.0, 0.27, 0.2).unwrap();
        let a = sample_increment(&s, 0.5, &mut RngStream::new(42, 7), 1000);
        let b = sample_increment(&s, 0.5, &mut RngStream::new(42, 7), 1000);
        let c = sample_increment(&s, 0.5, &mut RngStream::new(42, 8), 1000);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn constructor_validation() {
        assert!(LevySeed::nig(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(LevySeed::nig(1.0, -0.5, 0.0, 0.0).is_err());
        assert!(LevySeed::gaussian(0.0, -1.0).is_err());
        assert!(LevySeed::gamma(0.0, 1.0).is_err());
        assert!(LevySeed::inverse_gaussian(1.0, 0.0).is_err());
    }

    #[test]
    fn family_parsing() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("cauchy".parse::<Family>().is_err());
    }
}
