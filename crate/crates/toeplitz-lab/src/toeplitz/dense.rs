//! Dense oracle paths backed by `faer`: materialized Toeplitz matrices,
//! Cholesky-based solves, traces of products and the symmetric generalized
//! eigenvalue reduction. Everything here is O(N^2) storage / O(N^3) work
//! and exists to arbitrate the structured algorithms.

use crate::error::{LabError, LabResult};
use crate::symbols::FourierSeries;
use faer::linalg::solvers::{Llt, Solve};
use faer::{Mat, Side};

/// Materialize T_N(h) as a dense (N+1) x (N+1) matrix, entry (k, l) = h(l - k).
pub fn dense_toeplitz(series: &FourierSeries, n: usize) -> Mat<f64> {
    Mat::from_fn(n + 1, n + 1, |k, l| series.get(l as i64 - k as i64))
}

/// Cholesky factorization with the usual SPD failure mapped to a crate error.
pub fn cholesky(mat: &Mat<f64>) -> LabResult<Llt<f64>> {
    mat.llt(Side::Lower).map_err(|_| LabError::NotPositiveDefinite {
        order: mat.nrows(),
        reflection: f64::NAN,
    })
}

/// Rough 2-norm condition estimate of an SPD matrix from its Cholesky
/// factor diagonal (exact for diagonal matrices, adequate as a trust
/// indicator).
pub fn cond_estimate_from_llt(llt: &Llt<f64>) -> f64 {
    let l = llt.L();
    let n = l.nrows();
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for i in 0..n {
        let d = l[(i, i)];
        lo = lo.min(d);
        hi = hi.max(d);
    }
    (hi / lo).powi(2)
}

/// Trace of (T1 T2^{-1})^s by the Cholesky route: C = T2^{-1} T1 shares its
/// spectrum with the symmetric L^{-1} T1 L^{-T}, so traces of powers agree.
pub fn trace_product_power(t1: &Mat<f64>, llt2: &Llt<f64>, s: usize) -> LabResult<f64> {
    let n = t1.nrows();
    if s == 0 {
        return Err(LabError::ZeroPower);
    }
    let c = llt2.solve(t1);
    match s {
        1 => Ok((0..n).map(|i| c[(i, i)]).sum()),
        2 => {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += c[(i, j)] * c[(j, i)];
                }
            }
            Ok(acc)
        }
        _ => {
            // peel powers two at a time through explicit products
            let c2 = &c * &c;
            if s == 3 {
                let mut acc = 0.0;
                for i in 0..n {
                    for j in 0..n {
                        acc += c2[(i, j)] * c[(j, i)];
                    }
                }
                return Ok(acc);
            }
            let mut acc_mat = c2.clone();
            let mut k = 2usize;
            while k + 2 <= s {
                acc_mat = &acc_mat * &c2;
                k += 2;
            }
            if k < s {
                acc_mat = &acc_mat * &c;
            }
            Ok((0..n).map(|i| acc_mat[(i, i)]).sum())
        }
    }
}

/// Eigenvalues of L^{-1} T1 L^{-T} (ascending), where T2 = L L^T.
/// This is the symmetric reduction of the generalized problem
/// T1 x = mu T2 x, guaranteeing a real spectrum in floating point.
pub fn generalized_eigenvalues(t1: &Mat<f64>, llt2: &Llt<f64>) -> LabResult<Vec<f64>> {
    let n = t1.nrows();
    let l = llt2.L();
    // B = L^{-1} T1 L^{-T}
    let mut b = t1.clone();
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(
        l,
        b.as_mut(),
        faer::get_global_parallelism(),
    );
    let mut bt = b.transpose().to_owned();
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(
        l,
        bt.as_mut(),
        faer::get_global_parallelism(),
    );
    // symmetrize against rounding
    let sym = Mat::from_fn(n, n, |i, j| 0.5 * (bt[(i, j)] + bt[(j, i)]));
    let eig = sym
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| LabError::EigenFailure { n, cond: cond_estimate_from_llt(llt2) })?;
    let mut eig = eig;
    eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(eig)
}

/// Dense inverse (for small-N oracle comparisons only).
pub fn dense_inverse(llt: &Llt<f64>, n: usize) -> Mat<f64> {
    llt.solve(&Mat::<f64>::identity(n + 1, n + 1))
}

/// Log-determinant from the Cholesky factor.
pub fn log_det(llt: &Llt<f64>) -> f64 {
    let l = llt.L();
    (0..l.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0
}

/// Trace norm (sum of singular values) of a dense matrix; small-N oracle.
pub fn trace_norm(mat: &Mat<f64>) -> LabResult<f64> {
    let svd = mat.svd().map_err(|_| LabError::EigenFailure { n: mat.nrows(), cond: f64::NAN })?;
    let s = svd.S();
    Ok((0..mat.nrows().min(mat.ncols())).map(|i| s[i]).sum())
}
