//! Monte Carlo verification of the probabilistic statements: sampling
//! stationary centered Gaussian processes with spectral density f1,
//! quadratic forms in T_N^{-1}(f2), the CLT for their fluctuations and
//! the sharp large-deviation correction.
//!
//! Randomness is counter-based: every normal draw is a pure function of
//! `(seed, replicate, coordinate)`, so runs are bit-reproducible under any
//! parallel schedule.

use crate::asymptotics::{psi_series, rate_function, PsiDerivatives};
use crate::error::{LabError, LabResult};
use crate::special::{normal_cdf, pairwise_sum};
use crate::spectral::log_mgf;
use crate::toeplitz::{dense, gen_eigs, trace_ratio_power, TracePath};
use crate::FHSymbol;
use faer::linalg::solvers::Solve;
use faer::Mat;
use rayon::prelude::*;
use serde::Serialize;

/// SplitMix64-style finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// Standard normal draw keyed by `(seed, replicate, coordinate)`:
/// Box-Muller on two mixed uniforms.
pub fn gaussian_draw(seed: u64, replicate: u64, coordinate: u64) -> f64 {
    let key = mix64(seed ^ mix64(replicate.wrapping_mul(0xA24BAED4963EE407).wrapping_add(coordinate)));
    let key2 = mix64(key ^ 0x9FB21C651E98DF25);
    let u1 = ((key >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
    let u2 = ((key2 >> 11) as f64 + 0.5) / (1u64 << 53) as f64;
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Replicates of a stationary centered Gaussian vector with covariance
/// T_N(f1), stored one replicate per column.
pub struct ReplicateMatrix {
    pub data: Mat<f64>,
    pub n: usize,
    pub r: usize,
    pub seed: u64,
}

/// Draw `r` independent samples of X ~ N(0, T_N(f1)) via the dense
/// Cholesky factor of the covariance applied to counter-based normals.
pub fn sample_process(f1: &FHSymbol, n: usize, r: usize, seed: u64) -> LabResult<ReplicateMatrix> {
    let cov = dense::dense_toeplitz(&f1.fourier_coeffs(n), n);
    let llt = dense::cholesky(&cov)?;
    let l = llt.L().to_owned();
    let z = Mat::from_fn(n + 1, r, |i, j| gaussian_draw(seed, j as u64, i as u64));
    Ok(ReplicateMatrix { data: &l * &z, n, r, seed })
}

/// The quadratic form `X^t T_N^{-1}(f2) X` for one vector, via a
/// structured solve. Also usable through [`McEnsemble`] in batch.
pub fn quadratic_form(x: &[f64], f2: &FHSymbol) -> LabResult<f64> {
    let n = x.len() - 1;
    let pred = crate::toeplitz::predictor(&f2.fourier_coeffs(n), n)?;
    let y = pred.gs_inverse_apply(x)?;
    Ok(x.iter().zip(&y).map(|(a, b)| a * b).sum())
}

/// Monte Carlo ensemble of quadratic forms `Q = X^t T_N^{-1}(f2) X`.
#[derive(Debug, Clone, Serialize)]
pub struct McEnsemble {
    pub n: usize,
    pub r: usize,
    pub seed: u64,
    /// per-replicate values of Q
    pub q_values: Vec<f64>,
    /// exact mean E Q = Tr(T_N(f1) T_N^{-1}(f2)) (computed, not estimated)
    pub m_n: f64,
}

impl McEnsemble {
    /// Generate the ensemble. Replicate columns are drawn and reduced in a
    /// fixed order; the batched solve uses the dense Cholesky of T_N(f2).
    pub fn generate(f1: &FHSymbol, f2: &FHSymbol, n: usize, r: usize, seed: u64) -> LabResult<Self> {
        if r < 1000 {
            return Err(LabError::Config(format!(
                "replicate count R = {r} too small for statistical assertions (need >= 1000)"
            )));
        }
        let cov = dense::dense_toeplitz(&f1.fourier_coeffs(n), n);
        let llt1 = dense::cholesky(&cov)?;
        let l1 = llt1.L().to_owned();
        let t2 = dense::dense_toeplitz(&f2.fourier_coeffs(n), n);
        let llt2 = dense::cholesky(&t2)?;

        let chunk = 512usize;
        let starts: Vec<usize> = (0..r).step_by(chunk).collect();
        let mut q_values = vec![0.0f64; r];
        let chunks: Vec<(usize, Vec<f64>)> = starts
            .par_iter()
            .map(|&start| {
                let cols = chunk.min(r - start);
                let z = Mat::from_fn(n + 1, cols, |i, j| {
                    gaussian_draw(seed, (start + j) as u64, i as u64)
                });
                let x = &l1 * &z;
                let w = llt2.solve(&x);
                let q: Vec<f64> = (0..cols)
                    .map(|j| (0..=n).map(|i| x[(i, j)] * w[(i, j)]).sum())
                    .collect();
                (start, q)
            })
            .collect();
        for (start, q) in chunks {
            q_values[start..start + q.len()].copy_from_slice(&q);
        }
        let m_n = trace_ratio_power(f1, f2, n, 1, TracePath::Dense)?;
        Ok(McEnsemble { n, r, seed, q_values, m_n })
    }

    pub fn mean(&self) -> f64 {
        pairwise_sum(&self.q_values) / self.r as f64
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        let sq: Vec<f64> = self.q_values.iter().map(|&q| (q - m) * (q - m)).collect();
        pairwise_sum(&sq) / (self.r as f64 - 1.0)
    }

    /// Dump replicate values as CSV.
    pub fn write_csv(&self, path: &std::path::Path) -> LabResult<()> {
        use std::io::Write;
        let mut f = std::fs::File::create(path)?;
        writeln!(f, "replicate,q")?;
        for (i, q) in self.q_values.iter().enumerate() {
            writeln!(f, "{i},{q:.17e}")?;
        }
        Ok(())
    }
}

/// Kolmogorov-Smirnov distance of a sample to the standard normal law.
pub fn ks_distance_to_normal(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut worst = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let target = normal_cdf(x);
        worst = worst
            .max((target - i as f64 / n).abs())
            .max((target - (i + 1) as f64 / n).abs());
    }
    worst
}

/// Report of the central-limit experiment for standardized quadratic
/// forms `(Q - m_N)/sqrt(N)`.
#[derive(Debug, Clone, Serialize)]
pub struct CltReport {
    pub n: usize,
    pub r: usize,
    pub seed: u64,
    /// sample variance of the standardized statistic
    pub sample_variance: f64,
    /// the exact finite-N variance `2 Tr((T1 T2^{-1})^2)/N`
    pub exact_variance: f64,
    /// the limiting constant `(1/pi) int (f1/f2)^2`
    pub target_variance: f64,
    /// KS distance of the (exact-variance-)standardized sample to normal
    pub ks_normal: f64,
    /// sample skewness of the standardized statistic
    pub skewness: f64,
}

/// Run the CLT experiment at one order.
pub fn clt_experiment(
    f1: &FHSymbol,
    f2: &FHSymbol,
    n: usize,
    r: usize,
    seed: u64,
) -> LabResult<CltReport> {
    if !(f1.alpha() > 0.0 && f2.alpha() < 0.0) {
        return Err(LabError::MixHypothesis(f1.alpha(), f2.alpha()));
    }
    let ens = McEnsemble::generate(f1, f2, n, r, seed)?;
    let exact_variance = 2.0 * trace_ratio_power(f1, f2, n, 2, TracePath::Dense)? / n as f64;
    let target_variance = crate::asymptotics::ratio_power_mean(f1, f2, 2)? * 2.0;
    let scale = (n as f64).sqrt();
    let standardized: Vec<f64> = ens.q_values.iter().map(|&q| (q - ens.m_n) / scale).collect();
    let mean = pairwise_sum(&standardized) / r as f64;
    let var = standardized.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / (r as f64 - 1.0);
    let sd = var.sqrt();
    let skew = standardized.iter().map(|&v| ((v - mean) / sd).powi(3)).sum::<f64>() / r as f64;
    let unit: Vec<f64> =
        standardized.iter().map(|&v| v / exact_variance.sqrt()).collect();
    Ok(CltReport {
        n,
        r,
        seed,
        sample_variance: var,
        exact_variance,
        target_variance,
        ks_normal: ks_distance_to_normal(&unit),
        skewness: skew,
    })
}

/// One grid point of the sharp large-deviation experiment.
#[derive(Debug, Clone, Serialize)]
pub struct LdpRow {
    pub n: usize,
    pub t: f64,
    /// exact `L_N(t)` from the eigenvalues
    pub l_n: f64,
    /// rate integral `L(t)`
    pub l_limit: f64,
    /// first-order gap `L_N - L`
    pub gap: f64,
    /// second-order product `(N+1)(L_N - L)`
    pub scaled_gap: f64,
    /// predicted limit `Phi(2t)/2` from the mixing-functional derivatives
    pub predicted_correction: f64,
    /// propagated uncertainty of the prediction
    pub predicted_uncertainty: f64,
}

/// Sharp large-deviation experiment over (N, t) grids. The correction
/// series is truncated at the fitted derivative order of `derivs`.
pub fn ldp_experiment(
    f1: &FHSymbol,
    f2: &FHSymbol,
    n_grid: &[usize],
    t_grid: &[f64],
    derivs: &PsiDerivatives,
) -> LabResult<Vec<LdpRow>> {
    let mut rows = Vec::with_capacity(n_grid.len() * t_grid.len());
    for &n in n_grid {
        let sample = gen_eigs(f1, f2, n)?;
        for &t in t_grid {
            let l_n = log_mgf(&sample, t)?;
            let l_limit = rate_function(f1, f2, t)?;
            let (phi, phi_unc) = psi_series(derivs, 2.0 * t);
            rows.push(LdpRow {
                n,
                t,
                l_n,
                l_limit,
                gap: l_n - l_limit,
                scaled_gap: (n as f64 + 1.0) * (l_n - l_limit),
                predicted_correction: phi / 2.0,
                predicted_uncertainty: phi_unc / 2.0,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(alpha: f64, poly: &[f64]) -> FHSymbol {
        FHSymbol::new(alpha, poly.to_vec(), "t").unwrap()
    }

    #[test]
    fn draws_are_deterministic_and_standardized() {
        // same key -> same value
        assert_eq!(gaussian_draw(7, 11, 13), gaussian_draw(7, 11, 13));
        assert_ne!(gaussian_draw(7, 11, 13), gaussian_draw(8, 11, 13));
        // moments of a block of draws
        let m = 200_000u64;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for i in 0..m {
            let v = gaussian_draw(42, i / 512, i % 512);
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / m as f64;
        let var = sumsq / m as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }

    #[test]
    fn identity_covariance_sampling() {
        let f = sym(0.0, &[1.0]);
        let reps = sample_process(&f, 32, 4000, 5).unwrap();
        // entry variance ~ 1 within 3/sqrt(R)
        let var: f64 =
            (0..reps.r).map(|j| reps.data[(0, j)] * reps.data[(0, j)]).sum::<f64>() / reps.r as f64;
        assert!((var - 1.0).abs() < 3.0 / (reps.r as f64).sqrt() * 1.5, "var {var}");
        // same seed twice: identical draws
        let again = sample_process(&f, 32, 10, 5).unwrap();
        for j in 0..10 {
            for i in 0..=32 {
                assert_eq!(reps.data[(i, j)], again.data[(i, j)]);
            }
        }
    }

    #[test]
    fn sample_autocovariance_matches_symbol() {
        // lag-1 covariance of the f1 process ~ f1^(1) within 4 SE
        let f1 = sym(0.25, &[1.0]);
        let n = 48;
        let r = 60_000;
        let reps = sample_process(&f1, n, r, 11).unwrap();
        let c1 = f1.fourier_coeffs(2).get(1);
        let mut acc = 0.0;
        for j in 0..r {
            acc += reps.data[(10, j)] * reps.data[(11, j)];
        }
        let est = acc / r as f64;
        // Var(X_i X_{i+1}) = c0^2 + c1^2 for Gaussian pairs
        let c0 = f1.fourier_coeffs(2).get(0);
        let se = ((c0 * c0 + c1 * c1) / r as f64).sqrt();
        assert!((est - c1).abs() < 4.0 * se, "est {est} vs {c1} (se {se})");
    }

    #[test]
    fn quadratic_form_identity_symbol() {
        let f = sym(0.0, &[1.0]);
        let x = vec![1.0, -2.0, 3.0, 0.5];
        let q = quadratic_form(&x, &f).unwrap();
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        assert!((q - norm2).abs() < 1e-12);
    }

    #[test]
    fn quadratic_form_e0_gives_inverse_entry() {
        let f2 = sym(-0.25, &[1.0, -0.3]);
        let n = 24;
        let mut e0 = vec![0.0; n + 1];
        e0[0] = 1.0;
        let q = quadratic_form(&e0, &f2).unwrap();
        let t = dense::dense_toeplitz(&f2.fourier_coeffs(n), n);
        let inv = dense::dense_inverse(&dense::cholesky(&t).unwrap(), n);
        assert!((q - inv[(0, 0)]).abs() < 1e-10);
    }

    #[test]
    fn ensemble_mean_matches_trace_identity() {
        // E X^t M X = Tr(M Cov): MC mean within 4 SE of the exact trace
        let f1 = sym(0.25, &[1.0]);
        let f2 = sym(-0.25, &[1.0]);
        let n = 64;
        let ens = McEnsemble::generate(&f1, &f2, n, 4000, 99).unwrap();
        let se = (ens.variance() / ens.r as f64).sqrt();
        assert!(
            (ens.mean() - ens.m_n).abs() < 4.0 * se,
            "mean {} vs m_N {} (se {se})",
            ens.mean(),
            ens.m_n
        );
        // identity pair: mean ~ N + 1
        let ens = McEnsemble::generate(&f1, &f1, n, 4000, 99).unwrap();
        assert!((ens.m_n - (n + 1) as f64).abs() < 1e-8);
        let se = (ens.variance() / ens.r as f64).sqrt();
        assert!((ens.mean() - (n + 1) as f64).abs() < 4.0 * se);
    }

    #[test]
    fn variance_identity_chi_square() {
        // Var(X^t M X) = 2 Tr((M Cov)^2): MC variance within 5 SE
        let f1 = sym(0.25, &[1.0]);
        let f2 = sym(-0.25, &[1.0]);
        let n = 64;
        let r = 8000;
        let ens = McEnsemble::generate(&f1, &f2, n, r, 123).unwrap();
        let exact = 2.0 * trace_ratio_power(&f1, &f2, n, 2, TracePath::Dense).unwrap();
        let mc = ens.variance();
        // SE of a variance estimate ~ exact * sqrt(2/(R-1)) for normal-ish data
        let se = exact * (2.0 / (r as f64 - 1.0)).sqrt() * 2.0;
        assert!((mc - exact).abs() < 5.0 * se, "mc {mc} vs exact {exact} (se {se})");
    }

    #[test]
    fn ks_distance_sane() {
        // standard normal draws: small distance; shifted draws: large
        let vals: Vec<f64> = (0..4000).map(|i| gaussian_draw(3, i / 64, i % 64)).collect();
        let d = ks_distance_to_normal(&vals);
        assert!(d < 0.03, "d = {d}");
        let shifted: Vec<f64> = vals.iter().map(|v| v + 1.0).collect();
        assert!(ks_distance_to_normal(&shifted) > 0.3);
    }

    #[test]
    fn clt_identity_pair_reads_target_as_one_over_pi() {
        // f1 = f2: target = (1/pi) * 2pi = 2, exact = 2(N+1)/N -> 2;
        // this pins the (1/pi)-reading of the variance constant
        let f = sym(0.25, &[1.0]);
        let n = 64;
        let exact = 2.0 * trace_ratio_power(&f, &f, n, 2, TracePath::Dense).unwrap() / n as f64;
        assert!((exact - 2.0 * (n + 1) as f64 / n as f64).abs() < 1e-8);
        let target = crate::asymptotics::ratio_power_mean(&f, &f, 2).unwrap() * 2.0;
        assert!((target - 2.0).abs() < 1e-9);
    }
}
