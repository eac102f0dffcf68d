//! Forward/inverse discrete Fourier transforms on 1D and square 2D fields.

use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::scalar::Real;

/// Planned transforms of length `n`. The 2D transforms leave data
/// *transposed* in k-space; multipliers applied there must be symmetric in
/// the two axes (true for `|k|^2`-dependent kinetic factors).
#[derive(Clone)]
pub struct Spectral<T: Real> {
    n: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for Spectral<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("n", &self.n).finish()
    }
}

fn transpose<T: Copy + Send>(data: &mut [T], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            data.swap(i * n + j, j * n + i);
        }
    }
}

impl<T: Real> Spectral<T> {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn rows(plan: &Arc<dyn Fft<T>>, data: &mut [Complex<T>], n: usize) {
        data.par_chunks_mut(n * 16.min(n)).for_each_init(
            || vec![Complex::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()],
            |scratch, block| plan.process_with_scratch(block, scratch),
        );
    }

    pub fn forward_1d(&self, data: &mut [Complex<T>]) {
        self.forward.process(data);
    }

    /// Unitary up to the conventional `1/n`, applied here.
    pub fn inverse_1d(&self, data: &mut [Complex<T>]) {
        self.inverse.process(data);
        let scale = T::from_usize_lossy(self.n).recip();
        data.iter_mut().for_each(|a| *a = *a * scale);
    }

    /// Row transforms, transpose, row transforms: output is `F[x,y]^T`.
    pub fn forward_2d(&self, data: &mut [Complex<T>]) {
        Self::rows(&self.forward, data, self.n);
        transpose(data, self.n);
        Self::rows(&self.forward, data, self.n);
    }

    /// Inverse of [`forward_2d`](Self::forward_2d), including normalization.
    pub fn inverse_2d(&self, data: &mut [Complex<T>]) {
        Self::rows(&self.inverse, data, self.n);
        transpose(data, self.n);
        Self::rows(&self.inverse, data, self.n);
        let scale = T::from_usize_lossy(self.n * self.n).recip();
        data.par_iter_mut().for_each(|a| *a = *a * scale);
    }
}
