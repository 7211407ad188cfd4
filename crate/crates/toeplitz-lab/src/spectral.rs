//! Empirical spectral analysis of `T_N(f1) T_N^{-1}(f2)`: moment and
//! distribution convergence to the pushforward law of f1/f2, extreme
//! eigenvalues, and the finite-N log-moment-generating function.

use crate::asymptotics::{ratio_power_mean, ratio_sup};
use crate::error::{LabError, LabResult};
use crate::special::pairwise_sum;
use crate::symbols::singular_weight;
use crate::toeplitz::{gen_eigs, SpectralSample};
use crate::FHSymbol;
use serde::Serialize;
use std::f64::consts::PI;

/// Moments of the pushforward of normalized Lebesgue measure under f1/f2.
#[derive(Debug, Clone, Serialize)]
pub struct PushforwardMoments {
    /// `m_s = (1/2pi) int (f1/f2)^s`, s = 1..=S
    pub moments: Vec<f64>,
    pub sup: f64,
    pub inf: f64,
}

/// Compute pushforward moments up to power `s_max` by quadrature.
pub fn pushforward_moments(f1: &FHSymbol, f2: &FHSymbol, s_max: usize) -> LabResult<PushforwardMoments> {
    let moments: LabResult<Vec<f64>> =
        (1..=s_max).map(|s| ratio_power_mean(f1, f2, s)).collect();
    let inf = if f1.alpha() > f2.alpha() { 0.0 } else { f64::NAN };
    Ok(PushforwardMoments { moments: moments?, sup: ratio_sup(f1, f2), inf })
}

/// Empirical moments `(1/(N+1)) sum mu_i^s` for s = 1..=S.
pub fn empirical_moments(sample: &SpectralSample, s_max: usize) -> Vec<f64> {
    let n = sample.eigenvalues.len() as f64;
    (1..=s_max)
        .map(|s| {
            let powered: Vec<f64> =
                sample.eigenvalues.iter().map(|&m| m.powi(s as i32)).collect();
            pairwise_sum(&powered) / n
        })
        .collect()
}

/// One row of an extreme-eigenvalue scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExtremeRow {
    pub n: usize,
    pub mu_min: f64,
    pub mu_max: f64,
}

/// Scan extreme eigenvalues over an N-grid. Requires the singular pair
/// hypothesis `alpha1 > 0 > alpha2` (the limits are then 0 and sup f1/f2).
pub fn extreme_eigen_scan(
    f1: &FHSymbol,
    f2: &FHSymbol,
    n_grid: &[usize],
) -> LabResult<(Vec<ExtremeRow>, f64)> {
    if !(f1.alpha() > 0.0 && f2.alpha() < 0.0) {
        return Err(LabError::MixHypothesis(f1.alpha(), f2.alpha()));
    }
    let rows: LabResult<Vec<ExtremeRow>> = n_grid
        .iter()
        .map(|&n| {
            let s = gen_eigs(f1, f2, n)?;
            Ok(ExtremeRow { n, mu_min: s.min(), mu_max: s.max() })
        })
        .collect();
    Ok((rows?, ratio_sup(f1, f2)))
}

/// Normalized log-moment-generating function
/// `L_N(t) = -(1/(2(N+1))) sum_i ln(1 - 2 t mu_i)`.
///
/// Fails when `2 t mu_max >= 1`.
pub fn log_mgf(sample: &SpectralSample, t: f64) -> LabResult<f64> {
    let mu_max = sample.max();
    if 2.0 * t * mu_max >= 1.0 {
        return Err(LabError::MgfDomain(2.0 * t * mu_max, mu_max));
    }
    let n = sample.eigenvalues.len() as f64;
    let terms: Vec<f64> =
        sample.eigenvalues.iter().map(|&m| (1.0 - 2.0 * t * m).ln()).collect();
    Ok(-pairwise_sum(&terms) / (2.0 * n))
}

/// Empirical CDF value of the eigenvalue sample at x.
pub fn empirical_cdf(sample: &SpectralSample, x: f64) -> f64 {
    let k = sample.eigenvalues.partition_point(|&m| m <= x);
    k as f64 / sample.eigenvalues.len() as f64
}

/// Pushforward CDF of f1/f2 on a theta-grid: the fraction of angles where
/// the ratio stays at or below x.
pub fn pushforward_cdf(f1: &FHSymbol, f2: &FHSymbol, x: f64, grid: usize) -> f64 {
    let a = f1.alpha() - f2.alpha();
    let mut count = 0usize;
    // half-grid by evenness, endpoints weighted once
    for j in 0..=grid / 2 {
        let theta = 2.0 * PI * j as f64 / grid as f64;
        let v = if theta == 0.0 {
            if a > 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            singular_weight(theta).powf(a) * f1.regular(theta) / f2.regular(theta)
        };
        let w = if j == 0 || j == grid / 2 { 1 } else { 2 };
        if v <= x {
            count += w;
        }
    }
    count as f64 / grid as f64
}

/// Kolmogorov-Smirnov distance between the empirical eigenvalue law and
/// the pushforward law, evaluated at the sample points.
pub fn ks_distance_to_pushforward(
    sample: &SpectralSample,
    f1: &FHSymbol,
    f2: &FHSymbol,
    theta_grid: usize,
) -> f64 {
    let n = sample.eigenvalues.len() as f64;
    let mut worst = 0.0f64;
    for (i, &mu) in sample.eigenvalues.iter().enumerate() {
        let target = pushforward_cdf(f1, f2, mu, theta_grid);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        worst = worst.max((target - lo).abs()).max((target - hi).abs());
    }
    worst
}
