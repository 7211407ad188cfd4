//! Truncated Fourier series and the weighted inner product of A(T, 1/2).

use crate::error::{LabError, LabResult};
use crate::fit::fit_power_law;
use crate::special::pairwise_sum;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Storage convention for a truncated coefficient sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Symmetry {
    /// Real even symbol: h(-k) = h(k), only k >= 0 stored.
    Even,
    /// One-sided sequence: h(k) = 0 for k < 0 (power-series coefficients).
    Causal,
}

/// Tail metadata attached to a truncated series.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TailInfo {
    /// magnitude of the last stored coefficient
    pub last: f64,
    /// fitted decay exponent of |h(k)| ~ k^decay (NaN when unknown)
    pub decay: f64,
    /// estimate of sum_{|k| > K} |h(k)|; infinite when the tail is not
    /// absolutely summable
    pub l1: f64,
}

impl TailInfo {
    pub fn unknown() -> Self {
        TailInfo { last: 0.0, decay: f64::NAN, l1: f64::INFINITY }
    }

    /// Tail from a power law |h(k)| ~ A k^p beyond K.
    pub fn from_power_law(last: f64, p: f64, k_max: usize) -> Self {
        let l1 = if p < -1.0 {
            // two-sided integral bound with midpoint correction
            2.0 * last.abs() * (k_max as f64 + 0.5) / (-p - 1.0)
        } else {
            f64::INFINITY
        };
        TailInfo { last: last.abs(), decay: p, l1 }
    }
}

/// A truncated two-sided (even) or one-sided coefficient sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FourierSeries {
    coeffs: Vec<f64>,
    symmetry: Symmetry,
    pub tail: TailInfo,
    /// set when a grid transform saw trailing coefficients too large for
    /// the grid resolution
    pub coarse_grid: bool,
}

impl FourierSeries {
    pub fn new(coeffs: Vec<f64>, symmetry: Symmetry, tail: TailInfo) -> Self {
        assert!(!coeffs.is_empty());
        FourierSeries { coeffs, symmetry, tail, coarse_grid: false }
    }

    /// Kronecker delta sequence, h(0) = 1.
    pub fn delta(k_max: usize) -> Self {
        let mut c = vec![0.0; k_max + 1];
        c[0] = 1.0;
        FourierSeries::new(c, Symmetry::Even, TailInfo { last: 0.0, decay: f64::NAN, l1: 0.0 })
    }

    pub fn k_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn symmetry(&self) -> Symmetry {
        self.symmetry
    }

    pub fn is_even(&self) -> bool {
        self.symmetry == Symmetry::Even
    }

    /// Coefficient at any integer lag (0 outside the stored range).
    pub fn get(&self, k: i64) -> f64 {
        let idx = match self.symmetry {
            Symmetry::Even => k.unsigned_abs() as usize,
            Symmetry::Causal => {
                if k < 0 {
                    return 0.0;
                }
                k as usize
            }
        };
        self.coeffs.get(idx).copied().unwrap_or(0.0)
    }

    /// Stored coefficients, index = nonnegative lag.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// View truncated to a smaller order (shares no storage).
    pub fn truncated(&self, k_max: usize) -> FourierSeries {
        let k = k_max.min(self.k_max());
        let mut s = FourierSeries::new(
            self.coeffs[..=k].to_vec(),
            self.symmetry,
            TailInfo { last: self.coeffs[k].abs(), decay: self.tail.decay, l1: f64::INFINITY },
        );
        if s.tail.decay < -1.0 {
            s.tail = TailInfo::from_power_law(self.coeffs[k], self.tail.decay, k);
        }
        s.coarse_grid = self.coarse_grid;
        s
    }

    pub fn scaled(&self, s: f64) -> FourierSeries {
        let mut out = self.clone();
        for c in &mut out.coeffs {
            *c *= s;
        }
        out.tail.last *= s.abs();
        out.tail.l1 *= s.abs();
        out
    }

    /// Pointwise partial sum sum_{|k| <= K} h(k) e^{i k theta} (real for the
    /// stored real coefficients).
    pub fn eval_partial_sum(&self, theta: f64) -> f64 {
        match self.symmetry {
            Symmetry::Even => {
                let mut acc = self.coeffs[0];
                for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
                    acc += 2.0 * c * (k as f64 * theta).cos();
                }
                acc
            }
            Symmetry::Causal => {
                let mut re = 0.0;
                for (k, &c) in self.coeffs.iter().enumerate() {
                    re += c * (k as f64 * theta).cos();
                }
                re
            }
        }
    }

    /// Conservative pointwise bound for the truncation error of
    /// [`Self::eval_partial_sum`] at an angle bounded away from zero.
    ///
    /// Uses the absolute-sum tail when finite, otherwise an Abel-summation
    /// bound valid for eventually monotone coefficients (safety factor 4).
    pub fn tail_bound_at(&self, theta: f64) -> f64 {
        let abel = 4.0 * self.tail.last / (theta.abs() / 2.0).sin().abs().max(1e-12);
        self.tail.l1.min(abel)
    }

    /// Estimate tail metadata by fitting a power law on the last decade of
    /// stored coefficients (used for grid-derived series).
    pub fn fit_tail(&mut self) {
        let k = self.k_max();
        if k < 32 {
            self.tail = TailInfo { last: self.coeffs[k].abs(), decay: f64::NAN, l1: f64::INFINITY };
            return;
        }
        let lo = (k as f64 / 10.0).ceil() as usize * 9 / 10;
        let lo = lo.max(k / 2);
        let xs: Vec<f64> = (lo..=k).map(|i| i as f64).collect();
        let ys: Vec<f64> = (lo..=k).map(|i| self.coeffs[i]).collect();
        if ys.iter().all(|&v| v.abs() < 1e-300) {
            self.tail = TailInfo { last: 0.0, decay: f64::NAN, l1: 0.0 };
            return;
        }
        match fit_power_law(&xs, &ys) {
            Ok((_, p, r2)) if r2 > 0.9 => {
                self.tail = TailInfo::from_power_law(self.coeffs[k], p, k);
            }
            _ => {
                self.tail =
                    TailInfo { last: self.coeffs[k].abs(), decay: f64::NAN, l1: f64::INFINITY };
            }
        }
    }

    /// Write the series as two-column CSV `k,value`. Even series are
    /// written over the full symmetric range of lags.
    pub fn write_csv(&self, path: &Path) -> LabResult<()> {
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "k,value")?;
        match self.symmetry {
            Symmetry::Even => {
                for k in (1..=self.k_max()).rev() {
                    writeln!(f, "{},{:.17e}", -(k as i64), self.coeffs[k])?;
                }
                for k in 0..=self.k_max() {
                    writeln!(f, "{},{:.17e}", k, self.coeffs[k])?;
                }
            }
            Symmetry::Causal => {
                for k in 0..=self.k_max() {
                    writeln!(f, "{},{:.17e}", k, self.coeffs[k])?;
                }
            }
        }
        Ok(())
    }

    /// Truncated convolution of two even series (coefficients of the
    /// product symbol), up to `k_max`.
    pub fn convolve_truncated(&self, other: &FourierSeries, k_max: usize) -> FourierSeries {
        assert!(self.is_even() && other.is_even(), "convolution implemented for even series");
        let ka = self.k_max() as i64;
        let mut out = vec![0.0; k_max + 1];
        for (m, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in -ka..=ka {
                acc += self.get(j) * other.get(m as i64 - j);
            }
            *slot = acc;
        }
        let mut s = FourierSeries::new(out, Symmetry::Even, TailInfo::unknown());
        s.fit_tail();
        s
    }
}

/// Result of the weighted pairing in A(T, 1/2).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct InnerProductResult {
    pub value: f64,
    pub truncation: usize,
    /// uncertainty attributed to the extrapolated tail
    pub tail_estimate: f64,
    /// false when the power-law tail fit failed (raw partial sum reported)
    pub extrapolated: bool,
    /// value agrees to 1e-6 relative with the half-truncation evaluation
    pub stable: bool,
}

/// The inner product `<h, g>_{2,1/2} = sum_m |m| h(m) conj(g(m))` with a
/// power-law tail extrapolated from the last decade of summands.
///
/// Fails when the fitted summand exponent is >= -1 (the pairing falls
/// outside the A(T, 1/2) duality and the sum diverges).
pub fn inner_half(h: &FourierSeries, g: &FourierSeries) -> LabResult<InnerProductResult> {
    let k = h.k_max().min(g.k_max());
    let (value, tail, extrapolated) = inner_half_at(h, g, k)?;
    let (value_half, _, _) = inner_half_at(h, g, k / 2)?;
    let stable = (value - value_half).abs() <= 1e-6 * value.abs() + 1e-12;
    Ok(InnerProductResult { value, truncation: k, tail_estimate: tail, extrapolated, stable })
}

fn inner_half_at(h: &FourierSeries, g: &FourierSeries, k: usize) -> LabResult<(f64, f64, bool)> {
    // symmetric summand: t_m = m * (h(m) g(m) + h(-m) g(-m)), m >= 1
    let summand: Vec<f64> = (1..=k)
        .map(|m| {
            let mi = m as i64;
            m as f64 * (h.get(mi) * g.get(mi) + h.get(-mi) * g.get(-mi))
        })
        .collect();
    let partial = pairwise_sum(&summand);
    if k < 64 {
        return Ok((partial, summand.last().map_or(0.0, |v| v.abs()), false));
    }
    // power-law fit on the last decade
    let lo = (k * 9) / 10;
    let xs: Vec<f64> = (lo..k).map(|i| (i + 1) as f64).collect();
    let ys: Vec<f64> = (lo..k).map(|i| summand[i]).collect();
    if ys.iter().all(|&v| v.abs() < 1e-300) {
        return Ok((partial, 0.0, false));
    }
    let sign = if summand[k - 1] >= 0.0 { 1.0 } else { -1.0 };
    match fit_power_law(&xs, &ys) {
        Ok((a, p, r2)) if r2 > 0.99 => {
            if p >= -1.0 {
                return Err(LabError::DivergentPairing { exponent: p });
            }
            let tail = a * (k as f64 + 0.5).powf(p + 1.0) / (-p - 1.0);
            let unc = tail * (3.0 * (1.0 - r2)).max(0.02);
            Ok((partial + sign * tail, unc, true))
        }
        _ => {
            // raw partial sum; report the last decade's mass as the tail
            let tail: f64 = ys.iter().map(|v| v.abs()).sum();
            Ok((partial, tail, false))
        }
    }
}
