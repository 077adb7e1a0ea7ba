mod common;

use common::{mse_oracle, rel_err, Cells};
use ouwedge::mse::{
    mse_dg, mse_leading_fixed_r, mse_limit_fixed_delta, mse_parts, mse_rg, MseParts, Scheme,
};
use ouwedge::ModelParams;

fn lattice() -> Vec<(f64, f64, f64)> {
    // (lambda, delta, R)
    let mut out = Vec::new();
    let lambdas = [0.7, 1.0, 1.5, 2.0];
    for (k, &delta) in [0.02, 0.05, 0.1, 0.25].iter().enumerate() {
        for (l, &r) in [0.5, 1.0, 1.5, 2.0, 3.0].iter().enumerate() {
            out.push((lambdas[(k + l) % 4], delta, r));
        }
    }
    out
}

fn check(scheme: Scheme, lambda: f64, delta: f64, r: f64) {
    let params = ModelParams::new(lambda, 1.0).unwrap();
    let (mu, tau) = (0.2, 0.1);
    let p = (r / delta).round() as usize;
    let cells = match scheme {
        Scheme::Rg => Cells::Rectangular,
        Scheme::Dg => Cells::Diamond,
    };
    let (s1, s2) = mse_oracle(cells, lambda, delta, p);
    let MseParts { bias2, variance } = mse_parts(scheme, &params, mu, tau, delta, r).unwrap();
    let (want_b, want_v) = ((mu * s1).powi(2), tau * tau * s2);
    assert!(rel_err(bias2, want_b) <= 1e-8, "{scheme} bias {lambda} {delta} {r}: {bias2} vs {want_b}");
    assert!(rel_err(variance, want_v) <= 1e-8, "{scheme} var {lambda} {delta} {r}: {variance} vs {want_v}");
    assert!(rel_err(bias2 + variance, want_b + want_v) <= 1e-8);
}

#[test]
fn rg_matches_quadrature_oracle() {
    for (lambda, delta, r) in lattice() {
        check(Scheme::Rg, lambda, delta, r);
    }
}

#[test]
fn dg_matches_quadrature_oracle() {
    for (lambda, delta, r) in lattice() {
        check(Scheme::Dg, lambda, delta, r);
    }
}

/// Geometric-series closed forms of the finite sums, `x = e^{-lambda delta}`.
fn geo(x: f64, p: usize) -> (f64, f64) {
    let n = (p + 1) as f64;
    let s0 = (1.0 - x.powf(n)) / (1.0 - x);
    let s1 = x * (1.0 - n * x.powf(n - 1.0) + (n - 1.0) * x.powf(n)) / (1.0 - x).powi(2);
    (s0, s1)
}

#[test]
fn finite_sums_agree_with_closed_forms() {
    for &(lambda, delta, r) in &[(1.0f64, 0.05f64, 3.0f64), (1.7, 0.1, 2.0), (0.6, 0.2, 4.0)] {
        let params = ModelParams::new(lambda, 1.0).unwrap();
        let (mu, tau) = (0.3, 0.0);
        let p = (r / delta).round() as usize;
        let (a0, a1) = geo((-lambda * delta).exp(), p);
        let rg_mean = delta * delta * (2.0 * a1 + a0);
        let dg_mean = 2.0 * delta * delta * (a1 + a0);
        let want_rg = (mu * (2.0 / (lambda * lambda) - rg_mean)).powi(2);
        let want_dg = (mu * (2.0 / (lambda * lambda) - dg_mean)).powi(2);
        assert!(rel_err(mse_rg(&params, mu, tau, delta, r).unwrap(), want_rg) < 1e-12);
        assert!(rel_err(mse_dg(&params, mu, tau, delta, r).unwrap(), want_dg) < 1e-12);

        let (b0, b1) = geo((-2.0 * lambda * delta).exp(), p);
        let e = (-lambda * delta).exp();
        let cell = delta * delta - 2.0 / (lambda * lambda) * (1.0 - e).powi(2);
        let want = 0.04 * (1.0 / (2.0 * lambda * lambda) + 2.0 * cell * (b1 + b0));
        assert!(rel_err(mse_dg(&params, 0.0, 0.2, delta, r).unwrap(), want) < 1e-12);
        let a = -4.0 / (lambda * lambda) * (1.0 - (-lambda * delta / 2.0).exp());
        let rg_var = -4.0 * delta / lambda * b1
            + a * b0
            + 2.0 * delta / lambda * e * (2.0 * b1 + b0)
            + delta * delta * (2.0 * b1 + b0);
        let want = 0.04 * (1.0 / (2.0 * lambda * lambda) + rg_var);
        assert!(rel_err(mse_rg(&params, 0.0, 0.2, delta, r).unwrap(), want) < 1e-12);
    }
}

#[test]
fn limit_matches_long_truncation() {
    for &lambda in &[0.8, 1.0, 2.0] {
        let params = ModelParams::new(lambda, 1.0).unwrap();
        for scheme in [Scheme::Rg, Scheme::Dg] {
            let lim = mse_limit_fixed_delta(scheme, &params, 0.2, 0.1, 0.05).unwrap();
            let far = mse_parts(scheme, &params, 0.2, 0.1, 0.05, 30.0 / lambda.min(1.0)).unwrap().total();
            assert!(rel_err(far, lim) < 1e-6, "{scheme} {lambda}: {far} vs {lim}");
        }
    }
}

#[test]
fn rg_gap_to_leading_term_halves_with_spacing() {
    let params = ModelParams::new(1.0, 1.0).unwrap();
    let lead = mse_leading_fixed_r(Scheme::Rg, &params, 0.2, 0.1, 15.0).unwrap();
    let g1 = mse_rg(&params, 0.2, 0.1, 1e-3, 15.0).unwrap() - lead;
    let g2 = mse_rg(&params, 0.2, 0.1, 5e-4, 15.0).unwrap() - lead;
    let ratio = g2 / g1;
    assert!((0.3..=0.7).contains(&ratio), "ratio {ratio}");
}

#[test]
fn dg_gap_to_leading_term_shrinks_at_least_linearly() {
    let params = ModelParams::new(1.0, 1.0).unwrap();
    let lead = mse_leading_fixed_r(Scheme::Dg, &params, 0.2, 0.1, 15.0).unwrap();
    let g1 = mse_dg(&params, 0.2, 0.1, 1e-3, 15.0).unwrap() - lead;
    let g2 = mse_dg(&params, 0.2, 0.1, 5e-4, 15.0).unwrap() - lead;
    assert!(g2 > 0.0 && g2 / g1 <= 0.7, "ratio {}", g2 / g1);
}

#[test]
fn leading_term_is_the_zero_spacing_limit() {
    // two Richardson steps remove the O(delta) and O(delta^2) terms
    for (lambda, r) in [(1.0, 15.0), (2.0, 3.0), (0.5, 12.0)] {
        let params = ModelParams::new(lambda, 1.0).unwrap();
        for scheme in [Scheme::Rg, Scheme::Dg] {
            let lead = mse_leading_fixed_r(scheme, &params, 0.2, 0.1, r).unwrap();
            let m: Vec<f64> = [1e-4, 5e-5, 2.5e-5]
                .iter()
                .map(|&d| mse_parts(scheme, &params, 0.2, 0.1, d, r).unwrap().total())
                .collect();
            let r1 = [2.0 * m[1] - m[0], 2.0 * m[2] - m[1]];
            let r2 = (4.0 * r1[1] - r1[0]) / 3.0;
            assert!(rel_err(r2, lead) < 0.01, "{scheme} lambda {lambda}: {r2} vs {lead}");
        }
    }
}
