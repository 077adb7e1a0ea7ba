use crate::error::{Error, Result};
use crate::grid::ModelParams;

/// Relative slack on the cone indicator `|u| <= c w`, so that lattice points
/// lying exactly on the cone edge survive rounding in `dx = c * dt`.
const CONE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Rectangular,
    Diamond,
}

/// Truncated kernel `h(u_i, w_j) = 1{|u_i| <= c w_j} e^{-lambda w_j}` with
/// `u_i = i du` for `i = -q..=q` and `w_j = j dw` for `j = 0..=p`.
///
/// Stored row-major as `(2q + 1) x (p + 1)`; row `r` holds `i = r - q`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    du: f64,
    dw: f64,
    p: usize,
    q: usize,
    entries: Vec<f64>,
    layout: Layout,
}

#[inline]
pub(crate) fn in_cone(i: isize, j: usize, du: f64, dw: f64, c: f64) -> bool {
    (i.unsigned_abs() as f64) * du <= c * (j as f64) * dw * (1.0 + CONE_SLACK)
}

impl KernelMatrix {
    pub fn du(&self) -> f64 {
        self.du
    }

    pub fn dw(&self) -> f64 {
        self.dw
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn rows(&self) -> usize {
        2 * self.q + 1
    }

    pub fn cols(&self) -> usize {
        self.p + 1
    }

    /// Row `r = i + q` of the matrix.
    pub fn row(&self, r: usize) -> &[f64] {
        let cols = self.cols();
        &self.entries[r * cols..(r + 1) * cols]
    }

    /// Entry at spatial offset `i` in `-q..=q` and temporal index `j`.
    pub fn entry(&self, i: isize, j: usize) -> f64 {
        let r = (i + self.q as isize) as usize;
        self.entries[r * self.cols() + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Riemann sum `sum h du dw`.
    pub fn weight_sum(&self) -> f64 {
        self.entries.iter().sum::<f64>() * self.du * self.dw
    }
}

/// Kernel for the rectangular-grid simulator.
pub fn build_kernel_rg(
    params: &ModelParams,
    du: f64,
    dw: f64,
    p: usize,
    q: usize,
) -> Result<KernelMatrix> {
    build(params, du, dw, p, q, Layout::Rectangular)
}

/// Kernel for the diamond-grid simulator: spacing `du = c dt`, `dw = dt`,
/// and entries with odd `i + j` forced to zero.
pub fn build_kernel_dg(params: &ModelParams, dt: f64, p: usize, q: usize) -> Result<KernelMatrix> {
    if !p.is_multiple_of(2) || !q.is_multiple_of(2) {
        return Err(Error::OddTruncation { p, q });
    }
    build(params, params.c() * dt, dt, p, q, Layout::Diamond)
}

fn build(
    params: &ModelParams,
    du: f64,
    dw: f64,
    p: usize,
    q: usize,
    layout: Layout,
) -> Result<KernelMatrix> {
    if !(du.is_finite() && du > 0.0) || !(dw.is_finite() && dw > 0.0) {
        return Err(Error::InvalidGrid("kernel spacings must be finite and > 0"));
    }
    let (lambda, c) = (params.lambda(), params.c());
    let decay: Vec<f64> = (0..=p).map(|j| (-lambda * j as f64 * dw).exp()).collect();
    let mut entries = vec![0.0; (2 * q + 1) * (p + 1)];
    for (r, row) in entries.chunks_mut(p + 1).enumerate() {
        let i = r as isize - q as isize;
        for (j, e) in row.iter_mut().enumerate() {
            // i and the row index r share parity because q is even
            let parity_ok = layout == Layout::Rectangular || (r + j) % 2 == 0;
            if parity_ok && in_cone(i, j, du, dw, c) {
                *e = decay[j];
            }
        }
    }
    Ok(KernelMatrix {
        du,
        dw,
        p,
        q,
        entries,
        layout,
    })
}
