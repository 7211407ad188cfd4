//! Gohberg-Semencul representation of T_N^{-1}(h).
//!
//! With `beta` the predictor coefficients of `h`, the inverse is a
//! difference of products of triangular Toeplitz matrices:
//!
//! `T_N^{-1} = L(beta) L(beta)^T - L(beta~) L(beta~)^T`
//!
//! where `L(v)` is lower triangular Toeplitz with first column `v` and
//! `beta~ = (0, beta_N, beta_{N-1}, .., beta_1)`. Index ranges for this
//! formula vary between sources and are easy to mis-transcribe; the form
//! above is the one that reproduces the dense inverse (see the oracle
//! tests), which is the arbiter.

use super::levinson::PredictorCoefficients;
use crate::error::{LabError, LabResult};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

impl PredictorCoefficients {
    /// Apply T_N^{-1}(h) to a vector in O(N log N) through four triangular
    /// Toeplitz products evaluated as FFT convolutions.
    pub fn gs_inverse_apply(&self, x: &[f64]) -> LabResult<Vec<f64>> {
        let n = self.n();
        if x.len() != n + 1 {
            return Err(LabError::SizeMismatch { expected: n + 1, got: x.len() });
        }
        let beta = self.beta();
        let mut tilde = Vec::with_capacity(n + 1);
        tilde.push(0.0);
        for i in 0..n {
            tilde.push(beta[n - i]);
        }
        let conv = Convolver::new(n + 1);
        // L(v)^T x = correlation, L(v) u = convolution
        let u1 = conv.correlate(beta, x);
        let y1 = conv.convolve(beta, &u1);
        let u2 = conv.correlate(&tilde, x);
        let y2 = conv.convolve(&tilde, &u2);
        Ok((0..=n).map(|i| y1[i] - y2[i]).collect())
    }

    /// Entry (k, l) of T_N^{-1}(h) from the two-triangular form, O(N).
    pub fn inverse_entry(&self, k: usize, l: usize) -> f64 {
        let (k, l) = if k <= l { (k, l) } else { (l, k) };
        let beta = self.beta();
        let n = self.n();
        let s = l - k;
        let mut acc = 0.0;
        for j in 0..=k {
            acc += beta[k - j] * beta[l - j];
        }
        for i in 1..=k {
            acc -= beta[n + 1 - i] * beta[n + 1 - i - s];
        }
        acc
    }

    /// Diagonal sums `d_s = sum_{k=0}^{N-s} (T_N^{-1})_{k,k+s}` for all
    /// offsets `s = 0..=N`, in O(N^2) total.
    ///
    /// These are the quantities the trace decomposition pairs with the
    /// Fourier coefficients of the numerator symbol.
    pub fn diagonal_sums(&self) -> Vec<f64> {
        let beta = self.beta();
        let n = self.n();
        let mut out = vec![0.0; n + 1];
        for (s, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for i in 0..=n - s {
                acc += (n + 1 - s - i) as f64 * beta[i] * beta[i + s];
            }
            for j in 0..n - s {
                acc -= (n - s - j) as f64 * beta[n - j] * beta[n - s - j];
            }
            *slot = acc;
        }
        out
    }
}

/// Zero-padded FFT convolution workspace for length-`len` operands.
struct Convolver {
    len: usize,
    size: usize,
}

impl Convolver {
    fn new(len: usize) -> Self {
        let size = (2 * len).next_power_of_two();
        Convolver { len, size }
    }

    fn fft(&self, data: &mut [Complex64], forward: bool) {
        let mut planner = FftPlanner::new();
        let plan = if forward {
            planner.plan_fft_forward(self.size)
        } else {
            planner.plan_fft_inverse(self.size)
        };
        plan.process(data);
    }

    /// (L(v) u)_i = sum_{j <= i} v_{i-j} u_j  (truncated convolution)
    fn convolve(&self, v: &[f64], u: &[f64]) -> Vec<f64> {
        let mut a: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); self.size];
        let mut b = a.clone();
        for (i, &x) in v.iter().enumerate() {
            a[i].re = x;
        }
        for (i, &x) in u.iter().enumerate() {
            b[i].re = x;
        }
        self.fft(&mut a, true);
        self.fft(&mut b, true);
        for (x, y) in a.iter_mut().zip(&b) {
            *x *= *y;
        }
        self.fft(&mut a, false);
        a.iter().take(self.len).map(|c| c.re / self.size as f64).collect()
    }

    /// (L(v)^T u)_i = sum_{j >= i} v_{j-i} u_j  (truncated correlation)
    fn correlate(&self, v: &[f64], u: &[f64]) -> Vec<f64> {
        let rev: Vec<f64> = u.iter().rev().copied().collect();
        let mut out = self.convolve(v, &rev);
        out.reverse();
        out
    }
}
