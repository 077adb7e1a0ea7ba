//! Model parameters, lattice descriptions and field containers.

use crate::error::{Error, Result};

/// Rate `lambda` and cone slope `c` of the canonical field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    lambda: f64,
    c: f64,
}

impl ModelParams {
    pub fn new(lambda: f64, c: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidParams("lambda must be finite and > 0"));
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParams("c must be finite and > 0"));
        }
        Ok(Self { lambda, c })
    }

    #[inline]
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    #[inline]
    pub fn c(&self) -> f64 {
        self.c
    }
}

/// A regular space-time lattice. Index `i` (0-based) along space sits at
/// `x0 + i * dx`; likewise in time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x0: f64,
    pub t0: f64,
    pub dx: f64,
    pub dt: f64,
    pub n: usize,
    pub m: usize,
}

impl GridSpec {
    /// Grid with both origins at zero.
    pub fn new(dx: f64, dt: f64, n: usize, m: usize) -> Self {
        Self {
            x0: 0.0,
            t0: 0.0,
            dx,
            dt,
            n,
            m,
        }
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    #[inline]
    pub fn t(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn len(&self) -> usize {
        self.n * self.m
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Check every [`GridSpec`] invariant, reporting the first violation.
pub fn validate_grid(grid: &GridSpec) -> Result<()> {
    if !grid.x0.is_finite() {
        return Err(Error::InvalidGrid("x0 must be finite"));
    }
    if !grid.t0.is_finite() {
        return Err(Error::InvalidGrid("t0 must be finite"));
    }
    if !(grid.dx.is_finite() && grid.dx > 0.0) {
        return Err(Error::InvalidGrid("dx must be finite and > 0"));
    }
    if !(grid.dt.is_finite() && grid.dt > 0.0) {
        return Err(Error::InvalidGrid("dt must be finite and > 0"));
    }
    if grid.n == 0 {
        return Err(Error::InvalidGrid("n must be >= 1"));
    }
    if grid.m == 0 {
        return Err(Error::InvalidGrid("m must be >= 1"));
    }
    Ok(())
}

/// Field values on a lattice. Rows are spatial indices, columns temporal
/// indices in ascending time. Missing points are recorded only in `mask`;
/// their entry in `values` carries no meaning.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldData {
    grid: GridSpec,
    values: Vec<f64>,
    mask: Vec<bool>,
}

impl FieldData {
    pub fn new(grid: GridSpec, values: Vec<f64>, mask: Vec<bool>) -> Result<Self> {
        validate_grid(&grid)?;
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: values.len(),
            });
        }
        if mask.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                actual: mask.len(),
            });
        }
        if values.iter().zip(&mask).any(|(v, &ok)| ok && !v.is_finite()) {
            return Err(Error::InvalidGrid("non-finite value at a valid point"));
        }
        Ok(Self { grid, values, mask })
    }

    /// A field with every lattice point present.
    pub fn full(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        let mask = vec![true; values.len()];
        Self::new(grid, values, mask)
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Value at (space `i`, time `j`), or `None` when masked out.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let k = i * self.grid.m + j;
        if self.mask[k] {
            Some(self.values[k])
        } else {
            None
        }
    }

    #[inline]
    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.mask[i * self.grid.m + j]
    }

    /// Values at valid points, row-major.
    pub fn valid_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.values
            .iter()
            .zip(&self.mask)
            .filter_map(|(&v, &ok)| ok.then_some(v))
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&ok| ok).count()
    }

    /// Multiply every value by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|v| v * k).collect(),
            mask: self.mask.clone(),
        }
    }
}
