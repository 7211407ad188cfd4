//! Fisher-Hartwig symbols `|1 - e^{i theta}|^{2 alpha} c(theta)` and their
//! coefficient machinery.
//!
//! The regular part is restricted to `c = |P|^2` with `P` a real polynomial
//! free of zeros on the closed unit disk. That makes the outer factor of
//! the Wiener-Hopf factorization explicit (`g = (1-chi)^alpha P`) and every
//! coefficient sequence used downstream available in closed or rapidly
//! convergent series form:
//!
//! * Fourier coefficients of the singular factor come from the gamma-ratio
//!   closed form, extended to general `c` by finite convolution;
//! * the logarithm splits as `alpha/|m|` plus the power-series log of `P`;
//! * the one-sided sequence `beta_k = (g^{-1})^(k)` is the binomial series
//!   of `(1-z)^{-alpha}` convolved with the reciprocal series of `P`.
//!
//! Mixed symbols `t f1 + f2`, which have no closed form, live on a uniform
//! grid ([`GridSymbol`]) and are transformed by singularity subtraction:
//! the known closed-form series of the singular factor is removed
//! analytically, the smooth remainder goes through an FFT, and the closed
//! form is added back.

pub mod poly;
mod series;

pub use series::{inner_half, FourierSeries, InnerProductResult, Symmetry, TailInfo};

use crate::error::{LabError, LabResult};
use crate::special::gamma;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

/// Default grid size for [`GridSymbol`].
pub const DEFAULT_GRID_M: usize = 1 << 16;

/// `|1 - e^{i theta}|^2 = 2 - 2 cos theta`, evaluated as `4 sin^2(theta/2)`
/// which keeps full relative precision near the singularity.
pub fn singular_weight(theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    4.0 * s * s
}

/// Serialized form of a symbol: `{label, alpha, poly}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymbolRecord {
    pub label: String,
    pub alpha: f64,
    pub poly: Vec<f64>,
}

/// A Fisher-Hartwig symbol `f(theta) = |1 - e^{i theta}|^{2 alpha} |P(e^{i theta})|^2`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "SymbolRecord", into = "SymbolRecord")]
pub struct FHSymbol {
    alpha: f64,
    poly: Vec<f64>,
    label: String,
}

impl TryFrom<SymbolRecord> for FHSymbol {
    type Error = LabError;
    fn try_from(r: SymbolRecord) -> LabResult<Self> {
        FHSymbol::new(r.alpha, r.poly, &r.label)
    }
}

impl From<FHSymbol> for SymbolRecord {
    fn from(s: FHSymbol) -> SymbolRecord {
        SymbolRecord { label: s.label, alpha: s.alpha, poly: s.poly }
    }
}

impl FHSymbol {
    /// Construct and validate a symbol. `poly` holds `p_0 ... p_d` of the
    /// real polynomial `P` defining `c = |P|^2`; `P` must be zero-free on
    /// the closed unit disk and `p_0 > 0`.
    pub fn new(alpha: f64, poly: Vec<f64>, label: &str) -> LabResult<Self> {
        if !(alpha > -0.5 && alpha < 0.5) || !alpha.is_finite() {
            return Err(LabError::AlphaOutOfRange(alpha));
        }
        let mut poly = poly;
        while poly.len() > 1 && poly.last() == Some(&0.0) {
            poly.pop();
        }
        poly::check_root_free(&poly)?;
        let c1 = poly.iter().sum::<f64>().powi(2);
        if c1 <= 0.0 {
            return Err(LabError::BadPolynomial("P(1)^2 must be positive".into()));
        }
        Ok(FHSymbol { alpha, poly, label: label.to_string() })
    }

    /// Identity symbol f = 1.
    pub fn one() -> Self {
        FHSymbol { alpha: 0.0, poly: vec![1.0], label: "one".into() }
    }

    /// Pure singular symbol |1-chi|^{2 alpha}.
    pub fn pure(alpha: f64) -> LabResult<Self> {
        FHSymbol::new(alpha, vec![1.0], &format!("pure({alpha})"))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn poly(&self) -> &[f64] {
        &self.poly
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Regular part c(theta) = |P(e^{i theta})|^2.
    pub fn regular(&self, theta: f64) -> f64 {
        poly::modulus_sq_on_circle(&self.poly, theta)
    }

    /// c at theta = 0 (the value written c(1) in Szego-type constants).
    pub fn regular_at_zero(&self) -> f64 {
        self.poly.iter().sum::<f64>().powi(2)
    }

    /// Evaluate the symbol. At theta = 0 a pole (alpha < 0) is reported as
    /// `f64::INFINITY`; alpha > 0 gives 0 and alpha = 0 gives c(0).
    pub fn eval(&self, theta: f64) -> f64 {
        let w = singular_weight(theta);
        if w <= 0.0 {
            return match self.alpha.partial_cmp(&0.0).unwrap() {
                std::cmp::Ordering::Less => f64::INFINITY,
                std::cmp::Ordering::Equal => self.regular_at_zero(),
                std::cmp::Ordering::Greater => 0.0,
            };
        }
        w.powf(self.alpha) * self.regular(theta)
    }

    /// Essential supremum of the symbol (by dense sampling; the test
    /// symbols are smooth away from 0 so this is accurate).
    pub fn sup(&self) -> f64 {
        let m = 1 << 14;
        (0..=m / 2)
            .map(|j| self.eval(2.0 * std::f64::consts::PI * j as f64 / m as f64))
            .fold(0.0f64, f64::max)
    }

    /// Exact Fourier coefficients up to order `k_max`.
    ///
    /// The singular factor's coefficients follow the gamma-ratio closed
    /// form; the finite autocorrelation of `P` extends them to `c != 1` by
    /// convolution. Tail metadata records the `s^{-2 alpha - 1}` decay law.
    pub fn fourier_coeffs(&self, k_max: usize) -> FourierSeries {
        let d = self.poly.len() - 1;
        let g = singular_coeff_values(self.alpha, k_max + d);
        let q = poly::autocorrelation(&self.poly);
        let mut out = vec![0.0; k_max + 1];
        for (m, slot) in out.iter_mut().enumerate() {
            let mut acc = q[0] * g[m];
            for (j, &qj) in q.iter().enumerate().skip(1) {
                let plus = g[m + j];
                let minus = g[(m as i64 - j as i64).unsigned_abs() as usize];
                acc += qj * (plus + minus);
            }
            *slot = acc;
        }
        let tail = TailInfo::from_power_law(out[k_max], -2.0 * self.alpha - 1.0, k_max);
        FourierSeries::new(out, Symmetry::Even, tail)
    }

    /// Fourier coefficients of ln(1/f):
    /// `alpha/|m| - (log P)_|m|` for m != 0 and `-2 ln P(0)` at m = 0.
    pub fn log_inverse_series(&self, k_max: usize) -> FourierSeries {
        let l = poly::log_series(&self.poly, k_max + 1);
        let mut out = vec![0.0; k_max + 1];
        out[0] = -2.0 * l[0];
        for m in 1..=k_max {
            out[m] = self.alpha / m as f64 - l[m];
        }
        let tail = TailInfo::from_power_law(out[k_max], -1.0, k_max);
        FourierSeries::new(out, Symmetry::Even, tail)
    }

    /// One-sided Wiener-Hopf sequence `beta_k = (g^{-1})^(k)` where
    /// `g = (1-chi)^alpha P`: binomial series of `(1-z)^{-alpha}` convolved
    /// with the reciprocal series of `P`.
    pub fn beta_series(&self, k_max: usize) -> FourierSeries {
        let b = binomial_series(self.alpha, k_max);
        let out = if self.poly.len() == 1 && self.poly[0] == 1.0 {
            b
        } else {
            let inv = poly::reciprocal_series(&self.poly, trunc_len(&self.poly, k_max + 1));
            let mut out = vec![0.0; k_max + 1];
            for (k, slot) in out.iter_mut().enumerate() {
                let mut acc = 0.0;
                for (j, &w) in inv.iter().enumerate().take(k + 1) {
                    acc += w * b[k - j];
                }
                *slot = acc;
            }
            out
        };
        let tail = TailInfo::from_power_law(out[k_max], self.alpha - 1.0, k_max);
        FourierSeries::new(out, Symmetry::Causal, tail)
    }

    /// Fourier coefficients of 1/f (exponent -alpha, regular part 1/|P|^2).
    pub fn reciprocal_coeffs(&self, k_max: usize) -> FourierSeries {
        // the autocorrelation needs the full decaying tail of 1/P whatever
        // the requested output order
        let w = poly::reciprocal_series(&self.poly, trunc_len(&self.poly, 1 << 16));
        let g = singular_coeff_values(-self.alpha, k_max + w.len() + 1);
        // autocorrelation of the reciprocal series
        let l = w.len();
        let q: Vec<f64> =
            (0..l).map(|m| (0..l - m).map(|j| w[j] * w[j + m]).sum()).collect();
        let mut out = vec![0.0; k_max + 1];
        for (m, slot) in out.iter_mut().enumerate() {
            let mut acc = q[0] * g[m];
            for (j, &qj) in q.iter().enumerate().skip(1) {
                let plus = if m + j < g.len() { g[m + j] } else { 0.0 };
                let minus = g[(m as i64 - j as i64).unsigned_abs() as usize];
                acc += qj * (plus + minus);
            }
            *slot = acc;
        }
        let tail = TailInfo::from_power_law(out[k_max], 2.0 * self.alpha - 1.0, k_max);
        FourierSeries::new(out, Symmetry::Even, tail)
    }

    /// Coefficients of `(f1 / f2)^s`: a symbol with exponent
    /// `s (alpha1 - alpha2)` and regular part `|P1^s / P2^s|^2`.
    pub fn ratio_power_coeffs(f1: &FHSymbol, f2: &FHSymbol, s: usize, k_max: usize) -> FourierSeries {
        assert!(s >= 1);
        let expo = s as f64 * (f1.alpha - f2.alpha);
        // power series of (P1 / P2)^s, long enough for its full decay
        let len = (s * trunc_len(&f2.poly, 1 << 16)).max(s * (f1.poly.len() - 1) + 8);
        let g = singular_coeff_values(expo, k_max + len + 1);
        let p1s = poly::pow_series(&f1.poly, s, len);
        let invp2 = poly::reciprocal_series(&f2.poly, len);
        let invp2s = poly::pow_series(&invp2, s, len);
        let w = poly::mul_series(&p1s, &invp2s, len);
        let q: Vec<f64> =
            (0..len).map(|m| (0..len - m).map(|j| w[j] * w[j + m]).sum()).collect();
        let mut out = vec![0.0; k_max + 1];
        for (m, slot) in out.iter_mut().enumerate() {
            let mut acc = q[0] * g[m];
            for (j, &qj) in q.iter().enumerate().skip(1) {
                if qj == 0.0 {
                    continue;
                }
                let plus = if m + j < g.len() { g[m + j] } else { 0.0 };
                let minus = g[(m as i64 - j as i64).unsigned_abs() as usize];
                acc += qj * (plus + minus);
            }
            *slot = acc;
        }
        let tail = TailInfo::from_power_law(out[k_max], -2.0 * expo - 1.0, k_max);
        FourierSeries::new(out, Symmetry::Even, tail)
    }

    /// Sample onto a uniform grid of `m` angles.
    pub fn to_grid(&self, m: usize) -> LabResult<GridSymbol> {
        let values = sample_even(m, |theta| self.eval(theta))?;
        GridSymbol::new(values, self.alpha, self.regular_at_zero())
    }
}

fn trunc_len(poly: &[f64], cap: usize) -> usize {
    if poly.len() == 1 {
        return 1;
    }
    // geometric decay of 1/P coefficients: estimate the needed length from
    // the closest root radius, conservatively capped
    let probe = poly::reciprocal_series(poly, 4096.min(cap));
    let scale = probe[0].abs().max(1e-300);
    for (j, w) in probe.iter().enumerate().rev() {
        if w.abs() > scale * 1e-17 {
            return (j + 8).min(cap).max(2);
        }
    }
    2
}

/// Closed-form Fourier coefficients of `|1 - chi|^{2 alpha}` for lags
/// `0..=k_max`, by the stable ratio recurrence
/// `h(k+1) = h(k) (k - alpha) / (k + alpha + 1)`, `h(0) = Gamma(2a+1)/Gamma(a+1)^2`.
pub fn singular_coeff_values(alpha: f64, k_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    let mut h = gamma(2.0 * alpha + 1.0) / gamma(alpha + 1.0).powi(2);
    if alpha == 0.0 {
        let mut v = vec![0.0; k_max + 1];
        v[0] = 1.0;
        return v;
    }
    for k in 0..=k_max {
        out.push(h);
        let kf = k as f64;
        h *= (kf - alpha) / (kf + alpha + 1.0);
    }
    out
}

/// Closed-form coefficient sequence of |1-chi|^{2 alpha} as an even series.
pub fn singular_coeffs(alpha: f64, k_max: usize) -> FourierSeries {
    let v = singular_coeff_values(alpha, k_max);
    let tail = TailInfo::from_power_law(v[k_max], -2.0 * alpha - 1.0, k_max);
    FourierSeries::new(v, Symmetry::Even, tail)
}

/// Coefficients of `(1-z)^{-alpha}`: `b_0 = 1`, `b_{k+1} = b_k (k+alpha)/(k+1)`.
pub fn binomial_series(alpha: f64, k_max: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    let mut b = 1.0f64;
    for k in 0..=k_max {
        out.push(b);
        b *= (k as f64 + alpha) / (k as f64 + 1.0);
    }
    out
}

/// Transform kind for [`GridSymbol::fourier_coeffs`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Transform {
    /// coefficients of the symbol itself
    Direct,
    /// coefficients of ln(symbol)
    Log,
    /// coefficients of 1/symbol
    Reciprocal,
}

/// A symbol sampled on a uniform dyadic grid, with its singularity exponent
/// split off so transforms can subtract the closed-form part.
#[derive(Debug, Clone)]
pub struct GridSymbol {
    /// f(theta_j), theta_j = 2 pi j / M; entry 0 holds the limit value
    /// (0, c(0) or +inf depending on the exponent sign)
    values: Vec<f64>,
    singularity_exponent: f64,
    /// limit of f |1-chi|^{-2 alpha} at theta -> 0
    regular_at_zero: f64,
}

impl GridSymbol {
    pub fn new(values: Vec<f64>, singularity_exponent: f64, regular_at_zero: f64) -> LabResult<Self> {
        let m = values.len();
        if m < 256 || !m.is_power_of_two() {
            return Err(LabError::BadGridSize(m));
        }
        if values.iter().skip(1).any(|&v| !(v > 0.0)) {
            return Err(LabError::BadPolynomial(
                "grid symbol must be strictly positive off theta = 0".into(),
            ));
        }
        Ok(GridSymbol { values, singularity_exponent, regular_at_zero })
    }

    pub fn grid_size(&self) -> usize {
        self.values.len()
    }

    pub fn singularity_exponent(&self) -> f64 {
        self.singularity_exponent
    }

    pub fn regular_at_zero(&self) -> f64 {
        self.regular_at_zero
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Fourier coefficients of the symbol, its log, or its reciprocal by
    /// singularity subtraction plus one FFT of the smooth remainder.
    ///
    /// Sets the `coarse_grid` flag on the output when the remainder's
    /// trailing coefficients exceed 1e-8 of its leading ones.
    pub fn fourier_coeffs(&self, k_max: usize, transform: Transform) -> LabResult<FourierSeries> {
        let m = self.values.len();
        if k_max > m / 4 {
            return Err(LabError::TruncationTooShort { k: m / 4, need: k_max });
        }
        let a = self.singularity_exponent;
        let c0 = self.regular_at_zero;
        let theta = |j: usize| 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let sing = |j: usize| singular_weight(theta(j)).powf(a);

        // remainder on the grid + the closed form to add back
        let mut remainder = vec![0.0f64; m];
        let closed: Vec<f64>;
        match transform {
            Transform::Direct => {
                closed = singular_coeff_values(a, k_max).iter().map(|v| v * c0).collect();
                for j in 1..m {
                    remainder[j] = self.values[j] - c0 * sing(j);
                }
                remainder[0] = 0.0;
            }
            Transform::Log => {
                // ln f = 2a ln|1-chi| + ln c; closed part -a/|m| handled below
                let mut cl = vec![0.0; k_max + 1];
                for (k, slot) in cl.iter_mut().enumerate().skip(1) {
                    *slot = -a / k as f64;
                }
                closed = cl;
                for j in 1..m {
                    remainder[j] = (self.values[j] / sing(j)).ln();
                }
                remainder[0] = c0.ln();
            }
            Transform::Reciprocal => {
                closed = singular_coeff_values(-a, k_max).iter().map(|v| v / c0).collect();
                for j in 1..m {
                    remainder[j] = 1.0 / self.values[j] - (1.0 / c0) * singular_weight(theta(j)).powf(-a);
                }
                remainder[0] = 0.0;
            }
        }

        // enforce exact evenness before the transform
        for j in 1..m / 2 {
            let avg = 0.5 * (remainder[j] + remainder[m - j]);
            remainder[j] = avg;
            remainder[m - j] = avg;
        }
        let smooth = real_fft_coeffs(&remainder, k_max)?;

        let mut out = vec![0.0; k_max + 1];
        for k in 0..=k_max {
            out[k] = closed[k] + smooth[k];
        }
        let mut series = FourierSeries::new(out, Symmetry::Even, TailInfo::unknown());
        series.fit_tail();
        // grid-resolution flag: trailing remainder coefficients should be
        // negligible against the leading ones
        let lead = smooth.iter().take(65).fold(0.0f64, |acc, v| acc.max(v.abs()));
        let trail = smooth[k_max - k_max / 16..].iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if trail > 1e-8 * lead.max(1e-300) {
            series.coarse_grid = true;
        }
        Ok(series)
    }
}

/// FFT of real even grid data, returning real coefficients 0..=k_max.
/// Fails if the imaginary leakage exceeds rounding scale.
fn real_fft_coeffs(values: &[f64], k_max: usize) -> LabResult<Vec<f64>> {
    let m = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    let scale = values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let max_im = buf.iter().take(k_max + 1).fold(0.0f64, |a, c| a.max(c.im.abs())) / m as f64;
    if max_im > 1e-12 * scale.max(1.0) {
        return Err(LabError::BadPolynomial(format!(
            "transform of supposedly even data has imaginary parts {max_im:.3e}"
        )));
    }
    Ok(buf.iter().take(k_max + 1).map(|c| c.re / m as f64).collect())
}

fn sample_even<F: Fn(f64) -> f64>(m: usize, f: F) -> LabResult<Vec<f64>> {
    if m < 256 || !m.is_power_of_two() {
        return Err(LabError::BadGridSize(m));
    }
    let mut values = vec![0.0; m];
    for j in 0..=m / 2 {
        let v = f(2.0 * std::f64::consts::PI * j as f64 / m as f64);
        values[j] = v;
        if j != 0 && j != m / 2 {
            values[m - j] = v;
        }
    }
    Ok(values)
}

/// The mixed symbol `f_t = t f1 + f2` on a grid of `m` angles. Requires
/// `t >= 0` and `alpha1 > 0 > alpha2`; the pole of `f2` dominates at 0, so
/// the singularity exponent is `alpha2` and the regular part tends to
/// `c2(0)` there.
pub fn mix_symbol(f1: &FHSymbol, f2: &FHSymbol, t: f64, m: usize) -> LabResult<GridSymbol> {
    if t < 0.0 {
        return Err(LabError::NegativeMixWeight(t));
    }
    if !(f1.alpha() > 0.0 && f2.alpha() < 0.0) {
        return Err(LabError::MixHypothesis(f1.alpha(), f2.alpha()));
    }
    let mut values = sample_even(m, |theta| t * f1.eval(theta) + f2.eval(theta))?;
    values[0] = f64::INFINITY;
    GridSymbol::new(values, f2.alpha(), f2.regular_at_zero())
}

/// Grid of the ratio `f1 / (t f1 + f2)` (exponent `alpha1 - alpha2 > 0`).
pub fn ratio_grid(f1: &FHSymbol, f2: &FHSymbol, t: f64, m: usize) -> LabResult<GridSymbol> {
    if t < 0.0 {
        return Err(LabError::NegativeMixWeight(t));
    }
    if !(f1.alpha() > 0.0 && f2.alpha() < 0.0) {
        return Err(LabError::MixHypothesis(f1.alpha(), f2.alpha()));
    }
    let values = sample_even(m, |theta| {
        if theta == 0.0 {
            return 0.0;
        }
        let a = f1.eval(theta);
        a / (t * a + f2.eval(theta))
    })?;
    GridSymbol::new(values, f1.alpha() - f2.alpha(), f1.regular_at_zero() / f2.regular_at_zero())
}
