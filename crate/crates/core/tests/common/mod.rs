#![allow(dead_code)]

use ouwedge::simulate::NoiseLattice;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n {
        let mut z = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for l in 2..=n {
                let l = l as f64;
                let p2 = ((2.0 * l - 1.0) * z * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[k] = z;
        w[k] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Composite Gauss-Legendre over `panels` equal pieces of [a, b].
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, rule: &(Vec<f64>, Vec<f64>)) -> f64 {
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let mid = lo + h / 2.0;
        for (x, w) in rule.0.iter().zip(&rule.1) {
            s += h / 2.0 * w * f(mid + h / 2.0 * x);
        }
    }
    s
}

/// Explicit double sum of kernel weights against the noise lattice, no
/// convolution: output at space `i0`, ascending time `j0` uses noise row
/// `i0 + q + i` and noise column `m - 1 - j0 + j`.
pub fn brute_force(
    h: impl Fn(isize, usize) -> f64,
    noise: &NoiseLattice,
    n: usize,
    m: usize,
    p: usize,
    q: usize,
) -> Vec<f64> {
    let mut out = vec![0.0; n * m];
    for i0 in 0..n {
        for j0 in 0..m {
            let mut s = 0.0;
            for j in 0..=p {
                for i in -(q as isize)..=(q as isize) {
                    let row = (i0 as isize + q as isize + i) as usize;
                    s += h(i, j) * noise.get(row, m - 1 - j0 + j);
                }
            }
            out[i0 * m + j0] = s;
        }
    }
    out
}

/// Piecewise-constant approximating kernel of a simulator, described by the
/// spatial cells it occupies at temporal distance `w` from the output point.
pub enum Cells {
    Rectangular,
    Diamond,
}

/// Exact integrals `(int (k - h), int (k - h)^2)` over the half plane
/// `w >= 0` for the canonical kernel `k = 1{|xi| <= w} e^{-lambda w}`,
/// where `h` is the simulator's kernel with spacing `delta` and `p` steps.
///
/// At each `w` the spatial integral is exact (cells are intervals on which
/// `h` is constant); `w` is integrated by 20-point Gauss-Legendre on each
/// piece between consecutive breakpoints at multiples of `delta / 2`, and
/// the region beyond the kernel support is added in closed form.
pub fn mse_oracle(cells: Cells, lambda: f64, delta: f64, p: usize) -> (f64, f64) {
    let rule = gauss_legendre(20);
    let tail_from = match cells {
        Cells::Rectangular => (p + 1) as f64 * delta,
        Cells::Diamond => (p + 2) as f64 * delta,
    };
    let segments = ((tail_from / (delta / 2.0)).round()) as usize;
    let cells_at = |w: f64| -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        let jt = (w / delta).floor() as isize;
        match cells {
            Cells::Rectangular => {
                if jt >= 0 && jt as usize <= p {
                    let hv = (-lambda * jt as f64 * delta).exp();
                    for i in -jt..=jt {
                        out.push(((i as f64 - 0.5) * delta, (i as f64 + 0.5) * delta, hv));
                    }
                }
            }
            Cells::Diamond => {
                for j in [jt, jt - 1] {
                    if j < 0 || j as usize > p {
                        continue;
                    }
                    let v = w - j as f64 * delta;
                    let hw = if v <= delta { v } else { 2.0 * delta - v };
                    let hv = (-lambda * j as f64 * delta).exp();
                    for i in 0..=j {
                        let c = (2 * i - j) as f64 * delta;
                        out.push((c - hw, c + hw, hv));
                    }
                }
            }
        }
        out
    };
    let (mut s1, mut s2) = (0.0, 0.0);
    for k in 0..segments {
        let a = k as f64 * delta / 2.0;
        let b = a + delta / 2.0;
        for (x, wt) in rule.0.iter().zip(&rule.1) {
            let w = (a + b) / 2.0 + (b - a) / 2.0 * x;
            let kv = (-lambda * w).exp();
            let (mut f1, mut f2, mut covered) = (0.0, 0.0, 0.0);
            for (lo, hi, hv) in cells_at(w) {
                let inside = (hi.min(w) - lo.max(-w)).max(0.0);
                let len = hi - lo;
                f2 += inside * (kv - hv) * (kv - hv) + (len - inside) * hv * hv;
                f1 += inside * (kv - hv) - (len - inside) * hv;
                covered += inside;
            }
            f2 += (2.0 * w - covered) * kv * kv;
            f1 += (2.0 * w - covered) * kv;
            s1 += (b - a) / 2.0 * wt * f1;
            s2 += (b - a) / 2.0 * wt * f2;
        }
    }
    let t = tail_from;
    s2 += (-2.0 * lambda * t).exp() * (2.0 * lambda * t + 1.0) / (2.0 * lambda * lambda);
    s1 += 2.0 * (-lambda * t).exp() * (lambda * t + 1.0) / (lambda * lambda);
    (s1, s2)
}

/// Relative error with an absolute floor.
pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Seed cumulants of orders 1 to 8, derived independently of the library
/// from each family's cumulant generating function.
pub fn cumulants_to_8(seed: &ouwedge::LevySeed) -> [f64; 8] {
    use ouwedge::LevySeed;
    let mut k = [0.0; 8];
    match *seed {
        LevySeed::Gaussian { mu, tau } => {
            k[0] = mu;
            k[1] = tau * tau;
        }
        LevySeed::Gamma { alpha, beta } => {
            let mut fact = 1.0;
            for n in 1..=8 {
                k[n - 1] = alpha * fact / beta.powi(n as i32);
                fact *= n as f64;
            }
        }
        LevySeed::InverseGaussian { delta, gamma } => {
            // (2n - 3)!! delta / gamma^(2n - 1)
            let mut dfact = 1.0;
            for n in 1..=8 {
                if n >= 2 {
                    dfact *= (2 * n - 3) as f64;
                }
                k[n - 1] = dfact * delta / gamma.powi(2 * n as i32 - 1);
            }
        }
        LevySeed::NormalInverseGaussian { alpha, beta, mu, delta } => {
            // K(s) = mu s - delta sqrt(alpha^2 - (beta + s)^2) + const;
            // Taylor coefficients of sqrt(h) with h = alpha^2 - u^2 at u = beta
            let g2 = alpha * alpha - beta * beta;
            let h = [g2, -2.0 * beta, -1.0];
            let mut f = [0.0f64; 9];
            f[0] = g2.sqrt();
            for n in 1..=8 {
                let hn = if n < 3 { h[n] } else { 0.0 };
                let conv: f64 = (1..n).map(|j| f[j] * f[n - j]).sum();
                f[n] = (hn - conv) / (2.0 * f[0]);
            }
            let mut fact = 1.0;
            for n in 1..=8 {
                fact *= n as f64;
                k[n - 1] = -delta * fact * f[n];
            }
            k[0] += mu;
        }
    }
    k
}

/// Sampling standard errors of the first four k-statistics from `n`
/// draws of a law with cumulants `k`.
pub fn k_statistic_se(k: &[f64; 8], n: usize) -> [f64; 4] {
    let n = n as f64;
    let [_, k2, k3, k4, k5, k6, _, k8] = *k;
    let v1 = k2 / n;
    let v2 = k4 / n + 2.0 * k2 * k2 / (n - 1.0);
    let v3 = k6 / n + 9.0 * k2 * k4 / (n - 1.0) + 9.0 * k3 * k3 / (n - 1.0)
        + 6.0 * n * k2.powi(3) / ((n - 1.0) * (n - 2.0));
    let v4 = k8 / n
        + 16.0 * k2 * k6 / (n - 1.0)
        + 48.0 * k3 * k5 / (n - 1.0)
        + 34.0 * k4 * k4 / (n - 1.0)
        + 72.0 * n * k2 * k2 * k4 / ((n - 1.0) * (n - 2.0))
        + 144.0 * n * k2 * k3 * k3 / ((n - 1.0) * (n - 2.0))
        + 24.0 * n * (n + 1.0) * k2.powi(4) / ((n - 1.0) * (n - 2.0) * (n - 3.0));
    [v1.sqrt(), v2.sqrt(), v3.sqrt(), v4.sqrt()]
}

/// Seeds at the reference parameter sets, all with mean near 0.2 and
/// standard deviation near 0.1.
pub fn reference_seeds() -> Vec<ouwedge::LevySeed> {
    use ouwedge::LevySeed;
    vec![
        LevySeed::gaussian(0.2, 0.1).unwrap(),
        LevySeed::inverse_gaussian(1.0, 4.8).unwrap(),
        LevySeed::nig(20.0, -5.0, 0.27, 0.2).unwrap(),
        LevySeed::gamma(4.3, 21.5).unwrap(),
    ]
}
