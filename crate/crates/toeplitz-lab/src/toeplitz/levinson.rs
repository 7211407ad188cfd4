//! Levinson recursion for the predictor polynomial of a real even symbol.
//!
//! The predictor of degree N collects the first column of T_N^{-1}(h),
//! normalized by the square root of its (0,0) entry:
//! `beta_{k,N} = (T_N^{-1})_{k+1,1} / sqrt((T_N^{-1})_{1,1})`.
//! The recursion runs on the monic prediction filter `a_{m,.}` with
//! prediction-error variance `E_m`; then `beta_{k,N} = a_{N,k} / sqrt(E_N)`
//! (with `a_{N,0} = 1`), using the persymmetry of real symmetric Toeplitz
//! inverses.

use crate::error::{LabError, LabResult};
use crate::symbols::{poly, FourierSeries};
use std::io::Write;
use std::path::Path;

/// Predictor polynomial coefficients `beta_{0,N} .. beta_{N,N}` of a
/// symbol, together with recursion diagnostics.
#[derive(Debug, Clone)]
pub struct PredictorCoefficients {
    beta: Vec<f64>,
    n: usize,
    /// final prediction-error variance E_N
    error_variance: f64,
    /// reflection coefficients k_1 .. k_N seen during the recursion
    reflections: Vec<f64>,
}

impl PredictorCoefficients {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn beta_at(&self, k: usize) -> f64 {
        self.beta[k]
    }

    pub fn error_variance(&self) -> f64 {
        self.error_variance
    }

    pub fn reflections(&self) -> &[f64] {
        &self.reflections
    }

    /// Evaluate the predictor polynomial K_N(e^{i theta}).
    pub fn eval(&self, theta: f64) -> rustfft::num_complex::Complex64 {
        poly::eval_on_circle(&self.beta, theta)
    }

    /// Zero-freeness of K_N on the torus: winding number about 0 on a fine
    /// grid must vanish and the modulus must stay positive.
    pub fn check_zero_free(&self) -> LabResult<()> {
        poly::check_root_free(&self.beta).map_err(|_| LabError::NotPositiveDefinite {
            order: self.n,
            reflection: f64::NAN,
        })
    }

    /// CSV export: one row per coefficient.
    pub fn write_csv(&self, path: &Path) -> LabResult<()> {
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "k,beta")?;
        for (k, b) in self.beta.iter().enumerate() {
            writeln!(f, "{k},{b:.17e}")?;
        }
        Ok(())
    }

    /// Fourier coefficients of `|K_N|^{-2}` for lags `0..=N`, via the power
    /// series of `1/K_N` (convergent since K_N is zero-free on the closed
    /// disk) followed by autocorrelation. These must match the symbol's
    /// own coefficients up to lag N; the expansion length adapts to the
    /// decay of the series and `tol` bounds the neglected tail relative to
    /// the head.
    pub fn matched_coefficients(&self, tol: f64) -> Vec<f64> {
        let beta = &self.beta;
        let n = self.n;
        let cap = 1 << 18;
        let mut w: Vec<f64> = Vec::with_capacity(8 * n);
        w.push(1.0 / beta[0]);
        let mut head = w[0].abs();
        let mut quiet = 0usize;
        for j in 1..cap {
            let mut acc = 0.0;
            for i in 1..=j.min(n) {
                acc += beta[i] * w[j - i];
            }
            let next = -acc / beta[0];
            w.push(next);
            head = head.max(next.abs());
            if next.abs() < tol * head {
                quiet += 1;
                if quiet > 2 * n {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        (0..=n).map(|s| (0..w.len() - s).map(|j| w[j] * w[j + s]).sum()).collect()
    }
}

/// Run the Levinson recursion to order `n` on the given real even series.
///
/// Snapshots of the predictor are returned for every order listed in
/// `orders` (ascending); the series must cover lags up to the largest
/// order. Non-positive-definite input is reported with the failing order.
pub fn predictor_snapshots(
    series: &FourierSeries,
    orders: &[usize],
) -> LabResult<Vec<PredictorCoefficients>> {
    let &n = orders.iter().max().ok_or(LabError::TooFewPoints { need: 1, got: 0 })?;
    if series.k_max() < n {
        return Err(LabError::TruncationTooShort { k: series.k_max(), need: n });
    }
    if !series.is_even() {
        return Err(LabError::Config("predictor requires a real even series".into()));
    }
    let r: Vec<f64> = (0..=n as i64).map(|k| series.get(k)).collect();
    if r[0] <= 0.0 {
        return Err(LabError::NotPositiveDefinite { order: 0, reflection: f64::NAN });
    }

    let mut out = Vec::with_capacity(orders.len());
    let mut a = vec![0.0f64; n + 1]; // a[0] = 1 implicit below
    a[0] = 1.0;
    let mut e = r[0];
    let mut reflections = Vec::with_capacity(n);

    let snapshot = |a: &[f64], e: f64, m: usize, refl: &[f64]| PredictorCoefficients {
        beta: a[..=m].iter().map(|&v| v / e.sqrt()).collect(),
        n: m,
        error_variance: e,
        reflections: refl.to_vec(),
    };

    if orders.contains(&0) {
        out.push(snapshot(&a, e, 0, &reflections));
    }
    let mut prev = vec![0.0f64; n + 1];
    for m in 1..=n {
        let mut acc = r[m];
        for j in 1..m {
            acc += a[j] * r[m - j];
        }
        let k_m = -acc / e;
        if !(k_m.abs() < 1.0) {
            return Err(LabError::NotPositiveDefinite { order: m, reflection: k_m });
        }
        reflections.push(k_m);
        prev[..m].copy_from_slice(&a[..m]);
        a[m] = k_m;
        for j in 1..m {
            a[j] = prev[j] + k_m * prev[m - j];
        }
        e *= 1.0 - k_m * k_m;
        if orders.contains(&m) {
            out.push(snapshot(&a, e, m, &reflections));
        }
    }
    Ok(out)
}

/// Predictor of a single order (see [`predictor_snapshots`]).
pub fn predictor(series: &FourierSeries, n: usize) -> LabResult<PredictorCoefficients> {
    Ok(predictor_snapshots(series, &[n])?.pop().expect("one snapshot"))
}
