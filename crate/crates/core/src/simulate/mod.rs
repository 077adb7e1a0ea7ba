//! Discrete-convolution simulators on rectangular and diamond grids.

mod convolve;
mod kernel;

use std::fmt;
use std::str::FromStr;

use rand_distr::Distribution;

pub use convolve::{convolve_lattice, convolve_row, FFT_THRESHOLD};
pub use kernel::{build_kernel_dg, build_kernel_rg, KernelMatrix, Layout};

use crate::error::{Error, Result};
use crate::grid::{validate_grid, FieldData, GridSpec, ModelParams};
use crate::levy::{LevySeed, RngStream};

/// Basis increments on the extended lattice, `(n + 2q) x (m + p)` row-major.
/// Column `l` lies `l` time steps before the latest output column.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseLattice {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl NoiseLattice {
    pub fn from_values(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                actual: values.len(),
            });
        }
        Ok(Self { rows, cols, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.cols..(k + 1) * self.cols]
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        self.values[k * self.cols + l]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Rectangular-grid noise: every cell drawn, area `dx * dt`, row-major.
pub fn noise_rg(seed: &LevySeed, grid: &GridSpec, p: usize, q: usize, rng: &mut RngStream) -> Result<NoiseLattice> {
    validate_grid(grid)?;
    let (rows, cols) = (grid.n + 2 * q, grid.m + p);
    let law = seed.increment_law(grid.dx * grid.dt);
    let values = (0..rows * cols).map(|_| law.sample(rng)).collect();
    NoiseLattice::from_values(rows, cols, values)
}

/// Diamond-grid noise: cells with even `k + l` hold draws of area
/// `2 c dt^2`, the rest are zero. Draw order is row-major over even cells.
pub fn noise_dg(
    params: &ModelParams,
    seed: &LevySeed,
    grid: &GridSpec,
    p: usize,
    q: usize,
    rng: &mut RngStream,
) -> Result<NoiseLattice> {
    validate_grid(grid)?;
    let (rows, cols) = (grid.n + 2 * q, grid.m + p);
    let law = seed.increment_law(2.0 * params.c() * grid.dt * grid.dt);
    let mut values = vec![0.0; rows * cols];
    for k in 0..rows {
        for l in (k % 2..cols).step_by(2) {
            values[k * cols + l] = law.sample(rng);
        }
    }
    NoiseLattice::from_values(rows, cols, values)
}

/// Simulate on a rectangular grid with kernel spacings `dx`, `dt`.
pub fn simulate_rg(
    params: &ModelParams,
    seed: &LevySeed,
    grid: &GridSpec,
    p: usize,
    q: usize,
    rng: &mut RngStream,
) -> Result<FieldData> {
    validate_grid(grid)?;
    let kernel = build_kernel_rg(params, grid.dx, grid.dt, p, q)?;
    let noise = noise_rg(seed, grid, p, q, rng)?;
    let values = convolve_lattice(&kernel, &noise, grid.n, grid.m)?;
    FieldData::full(*grid, values)
}

/// Check the diamond-grid preconditions in the order truncation, extent,
/// spacing.
pub fn check_dg(params: &ModelParams, grid: &GridSpec, p: usize, q: usize) -> Result<()> {
    validate_grid(grid)?;
    if !p.is_multiple_of(2) || !q.is_multiple_of(2) {
        return Err(Error::OddTruncation { p, q });
    }
    if grid.n.is_multiple_of(2) || grid.m.is_multiple_of(2) {
        return Err(Error::EvenExtent { n: grid.n, m: grid.m });
    }
    let expected = params.c() * grid.dt;
    if (grid.dx - expected).abs() > 1e-12 * expected {
        return Err(Error::GridMismatch { dx: grid.dx, expected });
    }
    Ok(())
}

/// Checkerboard mask of a diamond-grid output: `(i + j)` even is observed.
pub fn dg_mask(n: usize, m: usize) -> Vec<bool> {
    (0..n * m).map(|k| (k / m + k % m).is_multiple_of(2)).collect()
}

/// Simulate on a diamond grid. Points with odd `i + j` are masked out.
pub fn simulate_dg(
    params: &ModelParams,
    seed: &LevySeed,
    grid: &GridSpec,
    p: usize,
    q: usize,
    rng: &mut RngStream,
) -> Result<FieldData> {
    check_dg(params, grid, p, q)?;
    let kernel = build_kernel_dg(params, grid.dt, p, q)?;
    let noise = noise_dg(params, seed, grid, p, q, rng)?;
    let mut values = convolve_lattice(&kernel, &noise, grid.n, grid.m)?;
    let mask = dg_mask(grid.n, grid.m);
    for (v, &ok) in values.iter_mut().zip(&mask) {
        if !ok {
            *v = 0.0;
        }
    }
    FieldData::new(*grid, values, mask)
}

/// Diamond-grid simulation at half spacing on `(2n - 1) x (2m - 1)` points,
/// keeping every second row and column. `p` and `q` count fine-grid steps.
pub fn simulate_dg_full(
    params: &ModelParams,
    seed: &LevySeed,
    grid: &GridSpec,
    p: usize,
    q: usize,
    rng: &mut RngStream,
) -> Result<FieldData> {
    validate_grid(grid)?;
    let fine = GridSpec {
        dx: grid.dx / 2.0,
        dt: grid.dt / 2.0,
        n: 2 * grid.n - 1,
        m: 2 * grid.m - 1,
        ..*grid
    };
    let f = simulate_dg(params, seed, &fine, p, q, rng)?;
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.n {
        for j in 0..grid.m {
            values.push(f.values()[2 * i * fine.m + 2 * j]);
        }
    }
    FieldData::full(*grid, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Rg,
    Dg,
    DgFull,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rg => "rg",
            Algorithm::Dg => "dg",
            Algorithm::DgFull => "dg-full",
        }
    }

    pub fn simulate(
        self,
        params: &ModelParams,
        seed: &LevySeed,
        grid: &GridSpec,
        p: usize,
        q: usize,
        rng: &mut RngStream,
    ) -> Result<FieldData> {
        match self {
            Algorithm::Rg => simulate_rg(params, seed, grid, p, q, rng),
            Algorithm::Dg => simulate_dg(params, seed, grid, p, q, rng),
            Algorithm::DgFull => simulate_dg_full(params, seed, grid, p, q, rng),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "rg" => Ok(Algorithm::Rg),
            "dg" => Ok(Algorithm::Dg),
            "dg-full" => Ok(Algorithm::DgFull),
            other => Err(format!("unknown algorithm '{other}' (expected rg, dg or dg-full)")),
        }
    }
}
