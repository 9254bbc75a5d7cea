//! FFT-accelerated products with lower-triangular Toeplitz matrices.
//!
//! The causal convolution y_i = sum_{m<=i} kernel_m blocks_{i-m} is a
//! linear convolution, done per spatial coordinate through one padded
//! complex FFT; two real sequences ride in one transform (real part /
//! imaginary part packing).

use crate::error::{Error, Result};
use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Precomputed frequency image of a convolution kernel.
pub struct ToeplitzPlan {
    fft_len: usize,
    kernel_len: usize,
    max_blocks: usize,
    kernel_hat: Vec<Complex<f64>>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl ToeplitzPlan {
    /// Plan products of `kernel` with block sequences of length up to
    /// `max_blocks` (kernel must be at least that long).
    pub fn new(kernel: &[f64], max_blocks: usize) -> Result<Self> {
        if kernel.is_empty() || max_blocks == 0 {
            return Err(Error::config("empty kernel or block count".to_string()));
        }
        if kernel.len() < max_blocks {
            return Err(Error::config(format!(
                "kernel length {} shorter than block count {}",
                kernel.len(),
                max_blocks
            )));
        }
        let needed = kernel.len() + max_blocks - 1;
        let fft_len = needed.next_power_of_two();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(fft_len);
        let inverse = planner.plan_fft_inverse(fft_len);
        let mut kernel_hat = vec![Complex::new(0.0, 0.0); fft_len];
        for (dst, &k) in kernel_hat.iter_mut().zip(kernel) {
            dst.re = k;
        }
        forward.process(&mut kernel_hat);
        Ok(Self {
            fft_len,
            kernel_len: kernel.len(),
            max_blocks,
            kernel_hat,
            forward,
            inverse,
        })
    }

    pub fn fft_len(&self) -> usize {
        self.fft_len
    }

    pub fn max_blocks(&self) -> usize {
        self.max_blocks
    }

    /// Convolve one real sequence (already padded caller-side is not
    /// required): returns the first `out_len` entries of kernel * seq.
    pub fn convolve_scalar(&self, seq: &[f64], out_len: usize) -> Result<Vec<f64>> {
        if seq.len() > self.max_blocks {
            return Err(Error::config(format!(
                "sequence length {} exceeds planned block count {}",
                seq.len(),
                self.max_blocks
            )));
        }
        if out_len > self.fft_len {
            return Err(Error::config("requested output exceeds FFT length".to_string()));
        }
        let mut buf = vec![Complex::new(0.0, 0.0); self.fft_len];
        for (dst, &v) in buf.iter_mut().zip(seq) {
            dst.re = v;
        }
        self.forward.process(&mut buf);
        for (b, k) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= k;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / self.fft_len as f64;
        Ok(buf[..out_len].iter().map(|c| c.re * scale).collect())
    }

    /// Convolve two real sequences in one complex transform.
    fn convolve_pair(
        &self,
        a: &[f64],
        b: Option<&[f64]>,
        out_len: usize,
    ) -> (Vec<f64>, Option<Vec<f64>>) {
        let n = self.fft_len;
        let mut buf = vec![Complex::new(0.0, 0.0); n];
        for (dst, &v) in buf.iter_mut().zip(a) {
            dst.re = v;
        }
        if let Some(b) = b {
            for (dst, &v) in buf.iter_mut().zip(b) {
                dst.im = v;
            }
        }
        self.forward.process(&mut buf);
        // split spectra: A_k = (Z_k + conj(Z_{-k}))/2, B_k = (Z_k - conj(Z_{-k}))/(2i)
        let mut work = vec![Complex::new(0.0, 0.0); n];
        for k in 0..n {
            let zk = buf[k];
            let zmk = buf[(n - k) % n].conj();
            let ak = 0.5 * (zk + zmk);
            let bk = Complex::new(0.0, -0.5) * (zk - zmk);
            let ya = ak * self.kernel_hat[k];
            let yb = bk * self.kernel_hat[k];
            work[k] = ya + Complex::new(0.0, 1.0) * yb;
        }
        self.inverse.process(&mut work);
        let scale = 1.0 / n as f64;
        let out_a = work[..out_len].iter().map(|c| c.re * scale).collect();
        let out_b = b.map(|_| work[..out_len].iter().map(|c| c.im * scale).collect());
        (out_a, out_b)
    }

    /// Lower-triangular Toeplitz product on a block sequence laid out as
    /// a row-major (len x width) array: out[i] = sum_{m<=i} kernel_m
    /// blocks[i-m], for i < out_len. Batched over the width dimension.
    pub fn apply_blocks(
        &self,
        blocks: &[f64],
        len: usize,
        width: usize,
        out_len: usize,
        offset: usize,
    ) -> Result<Vec<f64>> {
        if blocks.len() != len * width {
            return Err(Error::config("block array shape mismatch".to_string()));
        }
        if len > self.max_blocks {
            return Err(Error::config(format!(
                "block count {} exceeds planned {}",
                len, self.max_blocks
            )));
        }
        if offset + out_len > self.fft_len || offset + out_len > self.kernel_len + len {
            return Err(Error::config("requested output range out of bounds".to_string()));
        }
        let mut out = vec![0.0; out_len * width];
        let columns: Vec<usize> = (0..width).collect();
        let results: Vec<(usize, Vec<f64>, Option<Vec<f64>>)> = columns
            .par_chunks(2)
            .map(|pair| {
                let mut col_a = vec![0.0; len];
                for i in 0..len {
                    col_a[i] = blocks[i * width + pair[0]];
                }
                let col_b = pair.get(1).map(|&c| {
                    let mut col = vec![0.0; len];
                    for i in 0..len {
                        col[i] = blocks[i * width + c];
                    }
                    col
                });
                let (ya, yb) =
                    self.convolve_pair(&col_a, col_b.as_deref(), offset + out_len);
                (pair[0], ya, yb)
            })
            .collect();
        for (first_col, ya, yb) in results {
            for i in 0..out_len {
                out[i * width + first_col] = ya[offset + i];
            }
            if let Some(yb) = yb {
                for i in 0..out_len {
                    out[i * width + first_col + 1] = yb[offset + i];
                }
            }
        }
        Ok(out)
    }
}

/// The causal Toeplitz matvec of the interface contract:
/// y_i = sum_{m=0}^{i} kernel_m blocks_{i-m} for every block row.
pub fn toeplitz_matvec(
    plan: &ToeplitzPlan,
    blocks: &[Vec<f64>],
) -> Result<Vec<Vec<f64>>> {
    if blocks.is_empty() {
        return Ok(Vec::new());
    }
    let width = blocks[0].len();
    if blocks.iter().any(|b| b.len() != width) {
        return Err(Error::config("ragged block sequence".to_string()));
    }
    let len = blocks.len();
    let mut flat = vec![0.0; len * width];
    for (i, b) in blocks.iter().enumerate() {
        flat[i * width..(i + 1) * width].copy_from_slice(b);
    }
    let out = plan.apply_blocks(&flat, len, width, len, 0)?;
    Ok((0..len)
        .map(|i| out[i * width..(i + 1) * width].to_vec())
        .collect())
}
