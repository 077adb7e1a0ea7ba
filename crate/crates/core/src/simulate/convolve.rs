use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

use super::kernel::KernelMatrix;
use super::NoiseLattice;

/// Rows at least this long go through the FFT path.
pub const FFT_THRESHOLD: usize = 256;

/// Sliding sum `out[J] = sum_{j=0..=p} h_row[j] * w_row[J + j]` for
/// `J = 0..m`, where `h_row.len() = p + 1` and `w_row.len() = m + p`.
pub fn convolve_row(w_row: &[f64], h_row: &[f64], m: usize) -> Result<Vec<f64>> {
    if h_row.is_empty() {
        return Err(Error::LengthMismatch {
            expected: 1,
            actual: 0,
        });
    }
    let p = h_row.len() - 1;
    if w_row.len() != m + p {
        return Err(Error::LengthMismatch {
            expected: m + p,
            actual: w_row.len(),
        });
    }
    if w_row.len() < FFT_THRESHOLD {
        Ok(direct(w_row, h_row, m))
    } else {
        let plan = FftPlan::new(w_row.len());
        let w = plan.forward(w_row);
        let h = plan.forward(h_row);
        let acc: Vec<Complex<f64>> = w.iter().zip(&h).map(|(a, b)| a * b.conj()).collect();
        Ok(plan.inverse_real(acc, m))
    }
}

fn direct(w_row: &[f64], h_row: &[f64], m: usize) -> Vec<f64> {
    (0..m)
        .map(|jj| {
            h_row
                .iter()
                .zip(&w_row[jj..])
                .map(|(h, w)| h * w)
                .sum::<f64>()
        })
        .collect()
}

struct FftPlan {
    len: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl FftPlan {
    /// Plan for rows of length up to `min_len` without circular wrap.
    fn new(min_len: usize) -> Self {
        let len = min_len.next_power_of_two();
        let mut planner = FftPlanner::new();
        Self {
            len,
            fwd: planner.plan_fft_forward(len),
            inv: planner.plan_fft_inverse(len),
        }
    }

    fn forward(&self, x: &[f64]) -> Vec<Complex<f64>> {
        let mut buf: Vec<Complex<f64>> = x.iter().map(|&v| Complex::new(v, 0.0)).collect();
        buf.resize(self.len, Complex::new(0.0, 0.0));
        self.fwd.process(&mut buf);
        buf
    }

    fn inverse_real(&self, mut buf: Vec<Complex<f64>>, m: usize) -> Vec<f64> {
        self.inv.process(&mut buf);
        let scale = 1.0 / self.len as f64;
        buf[..m].iter().map(|z| z.re * scale).collect()
    }
}

/// Apply the kernel to every spatial window of the noise lattice.
///
/// Output row `I` sums the row-wise sliding sums of noise rows
/// `I..I + 2q + 1` against kernel rows `0..2q + 1`. Noise columns run into
/// the past, so each output row is reversed to ascending time. The result is
/// `n x m` row-major.
pub fn convolve_lattice(kernel: &KernelMatrix, noise: &NoiseLattice, n: usize, m: usize) -> Result<Vec<f64>> {
    let rows = kernel.rows();
    if noise.rows() != n + rows - 1 {
        return Err(Error::LengthMismatch {
            expected: n + rows - 1,
            actual: noise.rows(),
        });
    }
    if noise.cols() != m + kernel.p() {
        return Err(Error::LengthMismatch {
            expected: m + kernel.p(),
            actual: noise.cols(),
        });
    }
    // all-zero kernel rows (|i| beyond the cone at j = p) contribute nothing
    let active: Vec<usize> = (0..rows)
        .filter(|&r| kernel.row(r).iter().any(|&h| h != 0.0))
        .collect();

    let mut out = vec![0.0; n * m];
    if noise.cols() < FFT_THRESHOLD {
        out.par_chunks_mut(m).enumerate().for_each(|(i, dst)| {
            let mut y = vec![0.0; m];
            for &r in &active {
                let w = noise.row(i + r);
                let h = kernel.row(r);
                for (jj, acc) in y.iter_mut().enumerate() {
                    *acc += h.iter().zip(&w[jj..]).map(|(a, b)| a * b).sum::<f64>();
                }
            }
            for (d, v) in dst.iter_mut().zip(y.iter().rev()) {
                *d = *v;
            }
        });
    } else {
        let plan = FftPlan::new(noise.cols());
        let noise_spec: Vec<Vec<Complex<f64>>> = (0..noise.rows())
            .into_par_iter()
            .map(|k| plan.forward(noise.row(k)))
            .collect();
        let kernel_spec: Vec<(usize, Vec<Complex<f64>>)> = active
            .par_iter()
            .map(|&r| {
                let mut s = plan.forward(kernel.row(r));
                s.iter_mut().for_each(|z| *z = z.conj());
                (r, s)
            })
            .collect();
        out.par_chunks_mut(m).enumerate().for_each(|(i, dst)| {
            let mut acc = vec![Complex::new(0.0, 0.0); plan.len];
            for (r, hs) in &kernel_spec {
                let ws = &noise_spec[i + r];
                for ((a, w), h) in acc.iter_mut().zip(ws).zip(hs) {
                    *a += w * h;
                }
            }
            let y = plan.inverse_real(acc, m);
            for (d, v) in dst.iter_mut().zip(y.iter().rev()) {
                *d = *v;
            }
        });
    }
    Ok(out)
}
