//! Real-polynomial helpers: evaluation on the circle, truncated power
//! series (reciprocal, logarithm, powers) and a winding-number root check.

use crate::error::{LabError, LabResult};
use rustfft::num_complex::Complex64;

/// Evaluate P(e^{i theta}) by Horner's rule.
pub fn eval_on_circle(p: &[f64], theta: f64) -> Complex64 {
    let z = Complex64::new(theta.cos(), theta.sin());
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// |P(e^{i theta})|^2.
pub fn modulus_sq_on_circle(p: &[f64], theta: f64) -> f64 {
    eval_on_circle(p, theta).norm_sqr()
}

/// Autocorrelation q[m] = sum_j p_j p_{j+m}; these are the Fourier
/// coefficients of |P(e^{i theta})|^2 for m = 0..=deg.
pub fn autocorrelation(p: &[f64]) -> Vec<f64> {
    let d = p.len();
    (0..d).map(|m| (0..d - m).map(|j| p[j] * p[j + m]).sum()).collect()
}

/// Truncated power series of 1/P(z). Requires p[0] != 0.
pub fn reciprocal_series(p: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    out[0] = 1.0 / p[0];
    for k in 1..len {
        let mut acc = 0.0;
        for j in 1..=k.min(p.len() - 1) {
            acc += p[j] * out[k - j];
        }
        out[k] = -acc / p[0];
    }
    out
}

/// Truncated power series of ln P(z), valid when P has no zeros in the
/// closed unit disk. Computed from (ln P)' = P'/P.
pub fn log_series(p: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    out[0] = p[0].ln();
    if len == 1 {
        return out;
    }
    // derivative series
    let dp: Vec<f64> = (1..p.len()).map(|j| j as f64 * p[j]).collect();
    let inv = reciprocal_series(p, len);
    for k in 1..len {
        let mut acc = 0.0;
        for j in 0..dp.len().min(k) {
            acc += dp[j] * inv[k - 1 - j];
        }
        out[k] = acc / k as f64;
    }
    out
}

/// Product of two truncated power series.
pub fn mul_series(a: &[f64], b: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len];
    for (i, &ai) in a.iter().enumerate().take(len) {
        if ai == 0.0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// s-th power of a truncated power series (s >= 1).
pub fn pow_series(a: &[f64], s: usize, len: usize) -> Vec<f64> {
    let mut out: Vec<f64> = a.iter().copied().take(len).collect();
    out.resize(len, 0.0);
    for _ in 1..s {
        out = mul_series(&out, a, len);
    }
    out
}

/// Root-freeness check on the closed unit disk: winding number of
/// P(e^{i theta}) about 0 must be zero and the modulus must stay positive.
pub fn check_root_free(p: &[f64]) -> LabResult<()> {
    if p.is_empty() || p[0] <= 0.0 {
        return Err(LabError::BadPolynomial(
            "constant coefficient p0 must be positive".into(),
        ));
    }
    let scale: f64 = p.iter().map(|c| c.abs()).sum();
    let m = 4096.max(64 * p.len());
    let mut winding = 0.0f64;
    let mut prev = eval_on_circle(p, 0.0);
    let mut min_mod = prev.norm();
    for j in 1..=m {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
        let cur = eval_on_circle(p, theta);
        min_mod = min_mod.min(cur.norm());
        winding += (cur / prev).arg();
        prev = cur;
    }
    if min_mod <= 1e-9 * scale {
        return Err(LabError::BadPolynomial(format!(
            "P vanishes on the unit circle (min |P| = {min_mod:.3e})"
        )));
    }
    let turns = winding / (2.0 * std::f64::consts::PI);
    if turns.round().abs() > 0.25 {
        return Err(LabError::BadPolynomial(format!(
            "P has {} root(s) inside the unit disk",
            turns.round() as i64
        )));
    }
    Ok(())
}
