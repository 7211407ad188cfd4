//! Least-squares fitting helpers: straight lines with confidence intervals,
//! power-law tails, and small polynomial fits in a scaled variable.

use crate::error::{LabError, LabResult};

/// Result of a straight-line fit y = intercept + slope * x.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// standard error of the slope
    pub slope_se: f64,
    /// half-width of a ~95% confidence interval for the slope (2 se)
    pub slope_ci: f64,
    /// coefficient of determination
    pub r2: f64,
}

/// Ordinary least squares line through `(x, y)` pairs.
pub fn fit_line(x: &[f64], y: &[f64]) -> LabResult<LineFit> {
    let n = x.len();
    if n < 2 || y.len() != n {
        return Err(LabError::TooFewPoints { need: 2, got: n.min(y.len()) });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|&v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|&v| (v - my) * (v - my)).sum();
    if sxx == 0.0 {
        return Err(LabError::TooFewPoints { need: 2, got: 1 });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(&a, &b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let dof = (n as isize - 2).max(1) as f64;
    let slope_se = (ss_res / dof / sxx).sqrt();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(LineFit { slope, intercept, slope_se, slope_ci: 2.0 * slope_se, r2 })
}

/// Fit `y ~ sum_j c_j phi_j(x)` by normal equations with a tiny ridge term.
/// Returns the coefficients and the per-coefficient standard errors.
pub fn fit_basis(
    x: &[f64],
    y: &[f64],
    basis: &[Box<dyn Fn(f64) -> f64>],
) -> LabResult<(Vec<f64>, Vec<f64>, f64)> {
    let n = x.len();
    let m = basis.len();
    if n < m {
        return Err(LabError::TooFewPoints { need: m, got: n });
    }
    // design matrix
    let a: Vec<Vec<f64>> = x.iter().map(|&xi| basis.iter().map(|b| b(xi)).collect()).collect();
    // normal equations A^T A c = A^T y
    let mut ata = vec![vec![0.0f64; m]; m];
    let mut aty = vec![0.0f64; m];
    for i in 0..n {
        for j in 0..m {
            aty[j] += a[i][j] * y[i];
            for k in 0..m {
                ata[j][k] += a[i][j] * a[i][k];
            }
        }
    }
    let inv = invert_small(&ata)?;
    let coeffs: Vec<f64> =
        (0..m).map(|j| (0..m).map(|k| inv[j][k] * aty[k]).sum()).collect();
    let ss_res: f64 = (0..n)
        .map(|i| {
            let pred: f64 = (0..m).map(|j| coeffs[j] * a[i][j]).sum();
            (y[i] - pred).powi(2)
        })
        .sum();
    let dof = (n as isize - m as isize).max(1) as f64;
    let sigma2 = ss_res / dof;
    let ses: Vec<f64> = (0..m).map(|j| (sigma2 * inv[j][j]).sqrt()).collect();
    Ok((coeffs, ses, (ss_res / n as f64).sqrt()))
}

/// Gauss-Jordan inverse for the small symmetric systems built above.
fn invert_small(a: &[Vec<f64>]) -> LabResult<Vec<Vec<f64>>> {
    let m = a.len();
    let mut w: Vec<Vec<f64>> = a.to_vec();
    let mut inv = vec![vec![0.0; m]; m];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..m {
        // partial pivot
        let piv = (col..m)
            .max_by(|&i, &j| w[i][col].abs().partial_cmp(&w[j][col].abs()).unwrap())
            .unwrap();
        if w[piv][col].abs() < 1e-300 {
            return Err(LabError::IllConditionedFit { unc: f64::INFINITY, bound: 0.0 });
        }
        w.swap(col, piv);
        inv.swap(col, piv);
        let d = w[col][col];
        for j in 0..m {
            w[col][j] /= d;
            inv[col][j] /= d;
        }
        for i in 0..m {
            if i != col {
                let factor = w[i][col];
                for j in 0..m {
                    w[i][j] -= factor * w[col][j];
                    inv[i][j] -= factor * inv[col][j];
                }
            }
        }
    }
    Ok(inv)
}

/// Fit a power law `y = A x^p` on positive data, returning `(A, p, r2)`.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> LabResult<(f64, f64, f64)> {
    let mut lx = Vec::with_capacity(x.len());
    let mut ly = Vec::with_capacity(x.len());
    for (&a, &b) in x.iter().zip(y) {
        if a > 0.0 && b != 0.0 {
            lx.push(a.ln());
            ly.push(b.abs().ln());
        }
    }
    let f = fit_line(&lx, &ly)?;
    Ok((f.intercept.exp(), f.slope, f.r2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (1..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|&v| 3.0 - 0.7 * v).collect();
        let f = fit_line(&x, &y).unwrap();
        assert!((f.slope + 0.7).abs() < 1e-12);
        assert!((f.intercept - 3.0).abs() < 1e-12);
        assert!(f.slope_se < 1e-12);
    }

    #[test]
    fn exact_power_law() {
        let x: Vec<f64> = (1..=8).map(|i| (1 << i) as f64).collect();
        let y: Vec<f64> = x.iter().map(|&v| 3.0 * v.powf(-0.7)).collect();
        let (a, p, r2) = fit_power_law(&x, &y).unwrap();
        assert!((a - 3.0).abs() < 1e-9);
        assert!((p + 0.7).abs() < 1e-12);
        assert!(r2 > 0.999999);
    }

    #[test]
    fn basis_fit_recovers_polynomial() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 / 19.0).collect();
        let y: Vec<f64> = x.iter().map(|&v| 1.0 - 2.0 * v + 0.5 * v * v).collect();
        let basis: Vec<Box<dyn Fn(f64) -> f64>> = vec![
            Box::new(|_| 1.0),
            Box::new(|v| v),
            Box::new(|v| v * v),
        ];
        let (c, se, rms) = fit_basis(&x, &y, &basis).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-10 && (c[1] + 2.0).abs() < 1e-9 && (c[2] - 0.5).abs() < 1e-9);
        assert!(se.iter().all(|&s| s < 1e-9));
        assert!(rms < 1e-10);
    }
}
