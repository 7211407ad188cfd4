//! Asymptotic predictions for `Tr((T_N(f1) T_N^{-1}(f2))^s)`: the case
//! classifier, per-case expansion constants, the mixing functional Psi_1
//! and its derivatives at 0, product-trace limits and the large-deviation
//! rate function.
//!
//! The expansion constant of the main singular case (alpha_2 < 0,
//! alpha_1 > alpha_2) is defined by its limit,
//!
//! `Psi_1(t) = lim_N [ Tr(T_N(f1) T_N^{-1}(f2 + t f1)) - Tr T_N(f1/(f2 + t f1)) ]`,
//!
//! evaluated by Richardson extrapolation of the exact structured traces
//! over a dyadic N-grid (nine-digit accuracy at the default grid). The
//! candidate closed forms for this constant are also evaluated and
//! reported: the two differ in their third pairing and disagree with each
//! other and with the limit; the arbitration is part of every report (see
//! [`C1Report`]). Everything downstream (power traces, sharp
//! large-deviation corrections) is predicted from derivatives of the same
//! functional, which is what makes those checks independent.

use crate::error::{LabError, LabResult};
use crate::fit::{fit_basis, fit_line};
use crate::quad::integrate;
use crate::special::gamma;
use crate::symbols::{
    inner_half, mix_symbol, ratio_grid, singular_weight, FourierSeries, GridSymbol,
    InnerProductResult, Symmetry, TailInfo, Transform,
};
use crate::toeplitz::{predictor, trace_ratio_power, TracePath};
use crate::FHSymbol;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// The parameter-plane partition of the trace expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    /// alpha2 < 0, 0 < alpha2 - alpha1 < 1/2
    C1i,
    /// alpha2 < 0, -1 < alpha2 - alpha1 < 0
    C1ii,
    /// alpha2 > 0, 1/2 < alpha2 - alpha1 < 1
    C2i,
    /// alpha2 > 0, alpha1 < 0, |alpha2 - alpha1| < 1/2
    C2iia,
    /// alpha2 > 0, alpha1 > 0, |alpha2 - alpha1| < 1/2
    C2iib,
    /// boundary or unclassified parameters
    OutOfRange,
}

/// Classify `(alpha1, alpha2)`. The partition uses strict inequalities;
/// boundary ties land in `OutOfRange`.
pub fn classify_case(a1: f64, a2: f64) -> CaseTag {
    if !(a1.abs() < 0.5 && a2.abs() < 0.5) {
        return CaseTag::OutOfRange;
    }
    let d = a2 - a1;
    if a2 < 0.0 {
        if d > 0.0 && d < 0.5 {
            CaseTag::C1i
        } else if d > -1.0 && d < 0.0 {
            CaseTag::C1ii
        } else {
            CaseTag::OutOfRange
        }
    } else if a2 > 0.0 {
        if d > 0.5 && d < 1.0 {
            CaseTag::C2i
        } else if d.abs() < 0.5 && d != 0.0 && a1 < 0.0 {
            CaseTag::C2iia
        } else if d.abs() < 0.5 && d != 0.0 && a1 > 0.0 {
            CaseTag::C2iib
        } else {
            CaseTag::OutOfRange
        }
    } else {
        CaseTag::OutOfRange
    }
}

fn gtilde_inner_integrand(a2: f64, t: f64) -> f64 {
    // (1-t)^{2a} - 1 via expm1/ln_1p: the direct form cancels
    // catastrophically for small t and silently zeroes the singular mass
    let pow_m1 = (2.0 * a2 * (-t).ln_1p()).exp_m1();
    t.powf(2.0 * a2 - 2.0) * pow_m1 - t.powf(2.0 * a2) * (1.0 - t).powf(2.0 * a2 - 2.0)
}

/// The double integral `int_{1/2}^1 int_0^x g_{a2}(t) dt dx` shared by
/// [`gtilde_integral`] and the companion constant, evaluated by
/// swapping the order: `int_0^1 g(t) (1 - max(t, 1/2)) dt`, with the
/// `t -> 1` half written in the local variable `v = 1 - t` so the
/// endpoint singularity sits at 0.
pub fn gtilde_double_integral(a2: f64) -> LabResult<f64> {
    if !(a2 > 0.0 && a2 < 0.5) {
        return Err(LabError::AlphaOutOfRange(a2));
    }
    let part1 = integrate(|t: f64| gtilde_inner_integrand(a2, t) * 0.5, 0.0, 0.5, 1e-10)?;
    let part2 = integrate(
        |v: f64| {
            let t = 1.0 - v;
            (t.powf(2.0 * a2 - 2.0) * (v.powf(2.0 * a2) - 1.0)
                - t.powf(2.0 * a2) * v.powf(2.0 * a2 - 2.0))
                * v
        },
        0.0,
        0.5,
        1e-10,
    )?;
    Ok(part1 + part2)
}

/// `int_{1/2}^1 G~_{a2}(x) dx` where
/// `G~_{a2}(x) = int_0^x [t^{2a-2}((1-t)^{2a}-1) - t^{2a}(1-t)^{2a-2}] dt
///              + x^{2a-1}/(2a-1)`.
pub fn gtilde_integral(a2: f64) -> LabResult<f64> {
    Ok(gtilde_double_integral(a2)?
        + (1.0 - 0.5f64.powf(2.0 * a2)) / (2.0 * a2 * (2.0 * a2 - 1.0)))
}

/// Independent evaluation of `int_{1/2}^1 G~` on a fixed graded
/// Gauss-Legendre mesh (no adaptivity); oracle for [`gtilde_integral`].
///
/// Works on the order-swapped form `int_0^1 g(t) (1 - max(t, 1/2)) dt`
/// plus the elementary `x^{2a-1}/(2a-1)` part, with the mesh graded
/// toward each integrable endpoint singularity.
pub fn gtilde_integral_check(a2: f64) -> LabResult<f64> {
    if !(a2 > 0.0 && a2 < 0.5) {
        return Err(LabError::AlphaOutOfRange(a2));
    }
    let levels = 180;
    // t in [0, 1/2], singular like t^{2a-1} at 0, weight 1/2
    let left = crate::quad::integrate_graded(
        |t: f64| gtilde_inner_integrand(a2, t) * 0.5,
        0.0,
        0.5,
        levels,
    );
    // t in [1/2, 1] via v = 1 - t: integrand ~ v^{2a-1} at v = 0 after the
    // (1 - t) weight
    let right = crate::quad::integrate_graded(
        |v: f64| {
            let t = 1.0 - v;
            (t.powf(2.0 * a2 - 2.0) * (v.powf(2.0 * a2) - 1.0)
                - t.powf(2.0 * a2) * v.powf(2.0 * a2 - 2.0))
                * v
        },
        0.0,
        0.5,
        levels,
    );
    Ok(left + right + (1.0 - 0.5f64.powf(2.0 * a2)) / (2.0 * a2 * (2.0 * a2 - 1.0)))
}

/// The companion constant `K_{a2} = double integral + 1/(2 a2 (2 a2 - 1))`
/// in the form commonly quoted beside the trace-inverse expansion.
///
/// Note: the measured trace-inverse correction follows
/// `N^{2 a2} 2 (int G~) / (c2(1) Gamma(a2)^2)` with the full
/// [`gtilde_integral`], whose added term carries the factor
/// `1 - 2^{-2 a2}` from the lower integration limit; the quoted companion
/// drops that factor.
pub fn k_alpha2_companion(a2: f64) -> LabResult<f64> {
    Ok(gtilde_double_integral(a2)? + 1.0 / (2.0 * a2 * (2.0 * a2 - 1.0)))
}

/// Essential supremum of f1/f2 by dense sampling.
pub fn ratio_sup(f1: &FHSymbol, f2: &FHSymbol) -> f64 {
    let m = 1 << 16;
    let mut sup = 0.0f64;
    for j in 0..=m / 2 {
        let theta = 2.0 * PI * j as f64 / m as f64;
        let v = singular_weight(theta).powf(f1.alpha() - f2.alpha()) * f1.regular(theta)
            / f2.regular(theta);
        if v.is_finite() {
            sup = sup.max(v);
        }
    }
    sup
}

/// Mean of `(f1/f2)^s` over the circle by adaptive quadrature.
pub fn ratio_power_mean(f1: &FHSymbol, f2: &FHSymbol, s: usize) -> LabResult<f64> {
    let p = s as f64 * (f1.alpha() - f2.alpha());
    Ok(integrate(
        |theta: f64| {
            singular_weight(theta).powf(p) * (f1.regular(theta) / f2.regular(theta)).powi(s as i32)
        },
        0.0,
        PI,
        1e-10,
    )? / PI)
}

/// Coefficient data of a symbol pair used by the closed-form expansion
/// constants: for closed-form pairs everything comes from gamma-ratio
/// series; for mixed pairs `(f1, f2 + t f1)` the log and reciprocal run
/// through grid transforms with singularity subtraction.
pub struct PairSeries {
    pub f1_hat: FourierSeries,
    pub ln_f2_inv: FourierSeries,
    pub recip_f2: FourierSeries,
    /// coefficients of f1/f2
    pub ratio: FourierSeries,
    /// coefficients of ln f1
    pub ln_f1: FourierSeries,
    pub c2_at_zero: f64,
    pub a2: f64,
    /// set when a grid transform saw trailing coefficients above the
    /// resolution threshold
    pub coarse: bool,
}

impl PairSeries {
    /// Closed-form route, both symbols Fisher-Hartwig.
    pub fn closed(f1: &FHSymbol, f2: &FHSymbol, k_max: usize) -> Self {
        PairSeries {
            f1_hat: f1.fourier_coeffs(k_max),
            ln_f2_inv: f2.log_inverse_series(k_max),
            recip_f2: f2.reciprocal_coeffs(k_max),
            ratio: FHSymbol::ratio_power_coeffs(f1, f2, 1, k_max),
            ln_f1: f1.log_inverse_series(k_max).scaled(-1.0),
            c2_at_zero: f2.regular_at_zero(),
            a2: f2.alpha(),
            coarse: false,
        }
    }

    /// Grid route for the mixed pair `(f1, f_{2,t})`, `t >= 0`.
    pub fn mixed(f1: &FHSymbol, f2: &FHSymbol, t: f64, m: usize, k_max: usize) -> LabResult<Self> {
        let grid = mix_symbol(f1, f2, t, m)?;
        let ln_f2_inv = grid.fourier_coeffs(k_max, Transform::Log)?.scaled(-1.0);
        let recip_f2 = grid.fourier_coeffs(k_max, Transform::Reciprocal)?;
        let rgrid = ratio_grid(f1, f2, t, m)?;
        let ratio = rgrid.fourier_coeffs(k_max, Transform::Direct)?;
        let coarse = ln_f2_inv.coarse_grid || recip_f2.coarse_grid || ratio.coarse_grid;
        Ok(PairSeries {
            f1_hat: f1.fourier_coeffs(k_max),
            ln_f2_inv,
            recip_f2,
            ratio,
            ln_f1: f1.log_inverse_series(k_max).scaled(-1.0),
            c2_at_zero: f2.regular_at_zero(),
            a2: f2.alpha(),
            coarse,
        })
    }
}

/// The closed-form constant candidates, next to the limit value that
/// arbitrates them.
#[derive(Debug, Clone, Serialize)]
pub struct C1Report {
    /// `f1^(0) <ln f2^{-1}, 1/f2>` (the leading constant term)
    pub lead: f64,
    /// candidate with `<ln f1, 1/f2>` in the third pairing
    pub candidate_log_slot: f64,
    /// candidate with `<f1, 1/f2>` in the third pairing
    pub candidate_linear_slot: f64,
    /// `alpha2 f1^(0) B - (alpha2 + 1) A`: the combination the repaired
    /// constituent identities assemble to, short of a residual functional
    /// with no closed form (a few percent for c2 = 1 pairs)
    pub repaired_combination: f64,
    /// the limit `Psi_1(0)` from Richardson extrapolation (the arbiter)
    pub oracle: f64,
    /// oracle uncertainty (leave-one-out spread over the N-grid)
    pub oracle_uncertainty: f64,
    /// which candidate lies closer to the oracle
    pub closer_candidate: &'static str,
    /// `C1 = lead - Psi_1(0)`, the selected constant in the mixing
    /// functional's sign convention `Psi_1 = lead - C1`
    pub c1_selected: f64,
    /// pairing diagnostics (value, truncation, tail)
    pub pairings: Vec<(String, InnerProductResult)>,
}

/// Evaluate the candidate constants for a closed-form pair and arbitrate
/// them against the extrapolated limit.
pub fn c1_constant(f1: &FHSymbol, f2: &FHSymbol, k_max: usize) -> LabResult<C1Report> {
    let pair = PairSeries::closed(f1, f2, k_max);
    let oracle = psi1(f1, f2, 0.0, &Psi1Params::default())?;
    c1_from_parts(&pair, oracle.value, oracle.uncertainty)
}

/// The two closed-form candidates (third pairing `<ln f1, 1/f2>` vs
/// `<f1, 1/f2>`) evaluated from a coefficient bundle.
pub fn closed_form_candidates(pair: &PairSeries) -> LabResult<(f64, f64)> {
    let r = c1_from_parts(pair, f64::NAN, f64::NAN)?;
    Ok((r.candidate_log_slot, r.candidate_linear_slot))
}

pub(crate) fn c1_from_parts(
    pair: &PairSeries,
    oracle: f64,
    oracle_unc: f64,
) -> LabResult<C1Report> {
    let a2 = pair.a2;
    let f10 = pair.f1_hat.get(0);
    let b = inner_half(&pair.ln_f2_inv, &pair.recip_f2)?;
    let a = inner_half(&pair.ln_f2_inv, &pair.ratio)?;
    let c_lnf1 = inner_half(&pair.ln_f1, &pair.recip_f2)?;
    let c_f1 = inner_half(&pair.f1_hat, &pair.recip_f2)?;

    let lead = f10 * b.value;
    let bracket_common = a.value - b.value * f10;
    let log_slot = lead - 2.0 * (a2 + 1.0) * (bracket_common - c_lnf1.value);
    let linear_slot = lead - 2.0 * (a2 + 1.0) * (bracket_common - c_f1.value);
    let repaired = a2 * f10 * b.value - (a2 + 1.0) * a.value;
    let closer = if (log_slot - oracle).abs() <= (linear_slot - oracle).abs() {
        "log-slot"
    } else {
        "linear-slot"
    };
    Ok(C1Report {
        lead,
        candidate_log_slot: log_slot,
        candidate_linear_slot: linear_slot,
        repaired_combination: repaired,
        oracle,
        oracle_uncertainty: oracle_unc,
        closer_candidate: closer,
        c1_selected: lead - oracle,
        pairings: vec![
            ("<ln f2^-1, 1/f2>".into(), b),
            ("<ln f2^-1, f1/f2>".into(), a),
            ("<ln f1, 1/f2>".into(), c_lnf1),
            ("<f1, 1/f2>".into(), c_f1),
        ],
    })
}

/// Controls for the extrapolated mixing functional.
#[derive(Debug, Clone)]
pub struct Psi1Params {
    /// dyadic N-grid for the structured traces (ascending)
    pub n_grid: Vec<usize>,
    /// quadrature tolerance for the comparison term
    pub quad_tol: f64,
}

impl Default for Psi1Params {
    fn default() -> Self {
        Psi1Params { n_grid: vec![2048, 4096, 8192, 16384], quad_tol: 1e-11 }
    }
}

/// One evaluation of the mixing functional.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Psi1Value {
    pub t: f64,
    pub value: f64,
    /// leave-one-out spread of the extrapolation
    pub uncertainty: f64,
}

/// `Psi_1(t)`: the limit of the trace residual for the mixed pair
/// `(f1, f2 + t f1)`, by extrapolation in `{1, 1/N, ln N / N}` over the
/// configured grid. Requires `alpha1 > 0 > alpha2` and `t >= 0` (the
/// mixed symbol leaves the positive cone for t < 0).
pub fn psi1(f1: &FHSymbol, f2: &FHSymbol, t: f64, params: &Psi1Params) -> LabResult<Psi1Value> {
    if t < 0.0 {
        return Err(LabError::NegativeMixWeight(t));
    }
    if !(f1.alpha() > 0.0 && f2.alpha() < 0.0) {
        return Err(LabError::MixHypothesis(f1.alpha(), f2.alpha()));
    }
    let rows: LabResult<Vec<(f64, f64)>> = params
        .n_grid
        .iter()
        .map(|&n| Ok((n as f64, trace_residual_mixed(f1, f2, t, n, params.quad_tol)?)))
        .collect();
    let rows = rows?;
    let (value, uncertainty) = extrapolate_constant(&rows)?;
    Ok(Psi1Value { t, value, uncertainty })
}

/// Exact finite-N residual
/// `Tr(T_N(f1) T_N^{-1}(f_{2,t})) - Tr T_N(f1/f_{2,t})` via the
/// structured trace (Levinson + Gohberg-Semencul diagonal sums); the
/// comparison term's zeroth coefficient comes from adaptive quadrature.
pub fn trace_residual_mixed(
    f1: &FHSymbol,
    f2: &FHSymbol,
    t: f64,
    n: usize,
    quad_tol: f64,
) -> LabResult<f64> {
    let c1 = f1.fourier_coeffs(n);
    let c2 = f2.fourier_coeffs(n);
    let mixed: Vec<f64> = (0..=n).map(|k| t * c1.get(k as i64) + c2.get(k as i64)).collect();
    let series = FourierSeries::new(mixed, Symmetry::Even, TailInfo::unknown());
    let pred = predictor(&series, n)?;
    let d = pred.diagonal_sums();
    let mut tr = c1.get(0) * d[0];
    for s in 1..=n {
        tr += 2.0 * c1.get(s as i64) * d[s];
    }
    let mean = integrate(
        |theta: f64| {
            let a = singular_weight(theta).powf(f1.alpha()) * f1.regular(theta);
            let b = singular_weight(theta).powf(f2.alpha()) * f2.regular(theta);
            a / (t * a + b)
        },
        0.0,
        PI,
        quad_tol,
    )? / PI;
    Ok(tr - (n + 1) as f64 * mean)
}

/// Extrapolate the N -> infinity limit of a sequence by fitting
/// `K + a/N + b ln N / N`; returns the constant and a leave-first-out
/// spread as uncertainty. Needs at least three (N, value) rows.
pub fn extrapolate_constant(rows: &[(f64, f64)]) -> LabResult<(f64, f64)> {
    if rows.len() < 3 {
        return Err(LabError::TooFewPoints { need: 3, got: rows.len() });
    }
    let fit = |pts: &[(f64, f64)]| -> LabResult<f64> {
        let xs: Vec<f64> = pts.iter().map(|r| r.0).collect();
        let ys: Vec<f64> = pts.iter().map(|r| r.1).collect();
        let basis: Vec<Box<dyn Fn(f64) -> f64>> = vec![
            Box::new(|_| 1.0),
            Box::new(|n: f64| 1.0 / n),
            Box::new(|n: f64| n.ln() / n),
        ];
        let (c, _, _) = fit_basis(&xs, &ys, &basis)?;
        Ok(c[0])
    };
    let full = fit(rows)?;
    let unc = if rows.len() > 3 {
        (full - fit(&rows[1..])?).abs()
    } else {
        (full - rows[rows.len() - 1].1).abs() * 0.05
    };
    Ok((full, unc.max(5e-10)))
}

/// Derivatives of the mixing functional at 0+.
#[derive(Debug, Clone, Serialize)]
pub struct PsiDerivatives {
    /// `Psi_1^{(l)}(0)` for l = 0..=p
    pub values: Vec<f64>,
    /// propagated fit uncertainties, same indexing
    pub uncertainties: Vec<f64>,
    /// set when some uncertainty exceeds 1e-3 |value|
    pub ill_conditioned: bool,
    pub t_fit: f64,
    pub degree: usize,
    pub rms_residual: f64,
    /// supremum of f1/f2 fixing the fitting window
    pub ratio_sup: f64,
}

/// Fit `Psi_1` on a Chebyshev grid in `[0, t_fit]` by a degree-(p+4)
/// polynomial and read the one-sided derivatives at 0. The window starts
/// at half of `t_max = 1/(2 sup(f1/f2))` and shrinks until the fit
/// residual drops below 1e-7. Derivatives are fitted on t >= 0 only (the
/// mixed symbol must stay positive).
pub fn psi_derivatives(
    f1: &FHSymbol,
    f2: &FHSymbol,
    p: usize,
    params: &Psi1Params,
) -> LabResult<PsiDerivatives> {
    if p > 6 {
        return Err(LabError::Config("derivative order p must be <= 6".into()));
    }
    let sup = ratio_sup(f1, f2);
    let t_max = 1.0 / (2.0 * sup);
    let degree = p + 4;
    let nodes = degree + 5;
    let mut t_fit = 0.5 * t_max;
    let mut last_err: Option<LabError> = None;
    for _ in 0..3 {
        // Chebyshev points mapped to [0, t_fit], endpoints included
        let ts: Vec<f64> = (0..nodes)
            .map(|i| {
                let x = (PI * i as f64 / (nodes - 1) as f64).cos();
                0.5 * t_fit * (1.0 - x)
            })
            .collect();
        let vals: Vec<LabResult<Psi1Value>> =
            ts.par_iter().map(|&t| psi1(f1, f2, t, params)).collect();
        let mut ys = Vec::with_capacity(nodes);
        let mut node_unc = 0.0f64;
        let mut failed = None;
        for v in vals {
            match v {
                Ok(pv) => {
                    node_unc = node_unc.max(pv.uncertainty);
                    ys.push(pv.value);
                }
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        if let Some(e) = failed {
            last_err = Some(e);
            break;
        }
        // scaled fit u = t / t_fit
        let us: Vec<f64> = ts.iter().map(|&t| t / t_fit).collect();
        let monomials = |deg: usize| -> Vec<Box<dyn Fn(f64) -> f64>> {
            (0..=deg)
                .map(|j| {
                    let jj = j as i32;
                    Box::new(move |u: f64| u.powi(jj)) as Box<dyn Fn(f64) -> f64>
                })
                .collect()
        };
        let (coef, ses, rms) = fit_basis(&us, &ys, &monomials(degree))?;
        if rms > 1e-7 {
            t_fit *= 0.7;
            continue;
        }
        // truncation control: refit one degree higher and take the
        // coefficient spread as part of the uncertainty
        let (coef_hi, _, _) = fit_basis(&us, &ys, &monomials(degree + 1))?;
        let mut values = Vec::with_capacity(p + 1);
        let mut unc = Vec::with_capacity(p + 1);
        let mut factorial = 1.0f64;
        for l in 0..=p {
            if l > 0 {
                factorial *= l as f64;
            }
            let scale = factorial / t_fit.powi(l as i32);
            values.push(coef[l] * scale);
            unc.push((ses[l] + node_unc + (coef[l] - coef_hi[l]).abs()) * scale);
        }
        let ill = values.iter().zip(&unc).any(|(v, u)| *u > 1e-3 * v.abs().max(1e-12));
        return Ok(PsiDerivatives {
            values,
            uncertainties: unc,
            ill_conditioned: ill,
            t_fit,
            degree,
            rms_residual: rms,
            ratio_sup: sup,
        });
    }
    Err(last_err.unwrap_or(LabError::IllConditionedFit { unc: f64::INFINITY, bound: 1e-7 }))
}

/// Truncated correction series of the sharp large-deviation statement,
/// `Phi(u) = sum_{p>=1} ((-1)^{p-1}/p) u^p Psi_1^{(p-1)}(0)/(p-1)!`,
/// so that `(N+1)(L_N(t) - L(t)) -> Phi(2t)/2`. Returns the value and a
/// propagated uncertainty.
///
/// (A variant of this series circulates with the derivative index shifted
/// by one; the form here is consistent with the power-trace limits it is
/// summed from and with the Neumann expansion of the resolvent trace, and
/// it is the one the finite-N data reproduces.)
pub fn psi_series(derivs: &PsiDerivatives, u: f64) -> (f64, f64) {
    let mut value = 0.0;
    let mut unc = 0.0;
    let mut factorial = 1.0f64;
    for (idx, (v, du)) in derivs.values.iter().zip(&derivs.uncertainties).enumerate() {
        let p = (idx + 1) as f64;
        if idx > 0 {
            factorial *= idx as f64;
        }
        let sign = if idx % 2 == 0 { 1.0 } else { -1.0 };
        let weight = sign / p * u.powi(idx as i32 + 1) / factorial;
        value += weight * v;
        unc += weight.abs() * du;
    }
    // series-truncation estimate from the highest available derivative
    let p_top = derivs.values.len();
    let top = derivs.values.last().copied().unwrap_or(0.0).abs();
    let trunc =
        top * u.abs().powi(p_top as i32 + 1) / ((p_top + 1) as f64 * factorial * p_top.max(1) as f64);
    (value, unc + trunc)
}

/// `lim_N Tr(T_N(h1) T_N(h2))^s / N = (1/2pi) int (h1 h2)^s`, both
/// exponents positive (the product symbol is continuous and vanishes at 0).
pub fn product_trace_limit(h1: &FHSymbol, h2: &FHSymbol, s: usize) -> LabResult<f64> {
    if !(h1.alpha() > 0.0 && h2.alpha() > 0.0) {
        return Err(LabError::MixHypothesis(h1.alpha(), h2.alpha()));
    }
    if s == 0 {
        return Err(LabError::ZeroPower);
    }
    Ok(integrate(
        |theta: f64| {
            (singular_weight(theta).powf(h1.alpha() + h2.alpha())
                * h1.regular(theta)
                * h2.regular(theta))
            .powi(s as i32)
        },
        0.0,
        PI,
        1e-10,
    )? / PI)
}

/// Large-deviation rate integral
/// `L(t) = -(1/4pi) int_0^{2pi} ln(1 - 2 t (f1/f2)(theta)) dtheta`,
/// defined for `2t` in `(-1/delta, 1/delta)`, `delta = sup f1/f2`. The
/// integrand vanishes smoothly at theta = 0 (f1/f2 -> 0 there).
pub fn rate_function(f1: &FHSymbol, f2: &FHSymbol, t: f64) -> LabResult<f64> {
    let delta = ratio_sup(f1, f2);
    if 2.0 * t.abs() >= 1.0 / delta {
        return Err(LabError::LdpDomain(2.0 * t, delta));
    }
    let a = f1.alpha() - f2.alpha();
    Ok(-integrate(
        |theta: f64| {
            let r = singular_weight(theta).powf(a) * f1.regular(theta) / f2.regular(theta);
            (1.0 - 2.0 * t * r).ln()
        },
        0.0,
        PI,
        1e-10,
    )? / (2.0 * PI))
}

/// Provenance of an expansion constant.
#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub enum Provenance {
    /// evaluated from the closed-form branch expression
    Explicit,
    /// fitted from exact finite-N residuals, exponent fixed by the theorem
    Fitted,
    /// limit extrapolated from exact finite-N residuals (adopted where the
    /// closed-form candidates fail their arbitration)
    OracleExtrapolated,
}

/// One term `constant * N^exponent` of a trace expansion.
#[derive(Debug, Clone, Serialize)]
pub struct PredictionTerm {
    pub exponent: f64,
    pub constant: f64,
    pub provenance: Provenance,
}

/// A trace expansion prediction: main term, correction terms and the
/// claimed error exponent, with full provenance.
#[derive(Debug, Clone, Serialize)]
pub struct ExpansionPrediction {
    pub case: CaseTag,
    pub a1: f64,
    pub a2: f64,
    /// zeroth Fourier coefficient of f1/f2 (main term is (N+1) times it);
    /// zero when the ratio symbol is not integrable (case 2(i))
    pub main_coeff: f64,
    pub terms: Vec<PredictionTerm>,
    /// the O(N^e) exponent attached to the expansion
    pub error_exponent: f64,
    /// grid metadata and branch-specific caveats
    pub notes: Vec<String>,
}

impl ExpansionPrediction {
    /// Evaluate the predicted trace at order N.
    pub fn predicted(&self, n: usize) -> f64 {
        let mut acc = (n + 1) as f64 * self.main_coeff;
        for t in &self.terms {
            acc += t.constant * (n as f64).powf(t.exponent);
        }
        acc
    }
}

/// Default N-grid for fitting or extrapolating expansion constants.
pub const DEFAULT_FIT_GRID: [usize; 4] = [512, 1024, 2048, 4096];

/// Build the trace expansion prediction for a symbol pair.
///
/// Branches: case 1(i) carries its second-order term with a fitted
/// constant (its closed-form integrals sit on coefficient asymptotics
/// that fail their own oracle; the growing `N^{2(a2-a1)}` term is treated as a
/// second-order term, not an error bound). Case 1(ii) adopts the
/// extrapolated limit constant, with the closed-form candidates arbitrated
/// in the notes. Cases 2(i)/2(ii)a fit their constants with the
/// theorem-fixed exponent. Case 2(ii)b evaluates the explicit closed-form
/// constant (kept with its caveat: the finite-N residuals do not carry
/// that term).
pub fn predict_trace(
    f1: &FHSymbol,
    f2: &FHSymbol,
    fit_grid: &[usize],
) -> LabResult<ExpansionPrediction> {
    let a1 = f1.alpha();
    let a2 = f2.alpha();
    let case = classify_case(a1, a2);
    let nu = 2.0 * (a2 - a1);
    let mut notes = Vec::new();

    let residual_rows = |main_coeff: f64| -> LabResult<Vec<(f64, f64)>> {
        fit_grid
            .iter()
            .map(|&n| {
                let tr = trace_ratio_power(f1, f2, n, 1, TracePath::Structured)?;
                Ok((n as f64, tr - (n + 1) as f64 * main_coeff))
            })
            .collect()
    };
    // fit the constant of a fixed power law on the tail of the grid
    let fit_const = |rows: &[(f64, f64)], expo: f64| -> f64 {
        let tail = &rows[rows.len().saturating_sub(3)..];
        tail.iter().map(|&(n, r)| r / n.powf(expo)).sum::<f64>() / tail.len() as f64
    };

    match case {
        CaseTag::OutOfRange => Err(LabError::OutOfRangeCase { a1, a2 }),
        CaseTag::C1i => {
            let main = FHSymbol::ratio_power_coeffs(f1, f2, 1, 16).get(0);
            let rows = residual_rows(main)?;
            let c = fit_const(&rows, nu);
            notes.push(format!(
                "case 1(i): N^{nu:.3} grows; the term is a second-order term, not an error bound; constant fitted on N = {fit_grid:?}"
            ));
            Ok(ExpansionPrediction {
                case,
                a1,
                a2,
                main_coeff: main,
                terms: vec![PredictionTerm {
                    exponent: nu,
                    constant: c,
                    provenance: Provenance::Fitted,
                }],
                error_exponent: nu,
                notes,
            })
        }
        CaseTag::C1ii => {
            let main = FHSymbol::ratio_power_coeffs(f1, f2, 1, 16).get(0);
            let rows = residual_rows(main)?;
            let (k_inf, unc) = extrapolate_constant(&rows)?;
            let pair = PairSeries::closed(f1, f2, 1 << 17);
            let report = c1_from_parts(&pair, k_inf, unc)?;
            notes.push(format!(
                "case 1(ii) constant arbitration: log-slot candidate {:+.6} / linear-slot candidate {:+.6} / repaired {:+.6} vs limit {:+.6} (closer candidate: {}); both candidates rejected, limit adopted",
                report.candidate_log_slot,
                report.candidate_linear_slot,
                report.repaired_combination,
                report.oracle,
                report.closer_candidate,
            ));
            Ok(ExpansionPrediction {
                case,
                a1,
                a2,
                main_coeff: main,
                terms: vec![PredictionTerm {
                    exponent: 0.0,
                    constant: k_inf,
                    provenance: Provenance::OracleExtrapolated,
                }],
                error_exponent: nu.max(-1.0),
                notes,
            })
        }
        CaseTag::C2i => {
            // f1/f2 is not integrable here; the expansion has no (N+1)-term
            let rows = fit_grid
                .iter()
                .map(|&n| Ok((n as f64, trace_ratio_power(f1, f2, n, 1, TracePath::Structured)?)))
                .collect::<LabResult<Vec<_>>>()?;
            let c = fit_const(&rows, nu);
            notes.push("case 2(i): constant fitted (no closed form available)".into());
            Ok(ExpansionPrediction {
                case,
                a1,
                a2,
                main_coeff: 0.0,
                terms: vec![PredictionTerm {
                    exponent: nu,
                    constant: c,
                    provenance: Provenance::Fitted,
                }],
                error_exponent: nu,
                notes,
            })
        }
        CaseTag::C2iia => {
            let main = FHSymbol::ratio_power_coeffs(f1, f2, 1, 16).get(0);
            let rows = residual_rows(main)?;
            let c = fit_const(&rows, nu);
            notes.push("case 2(ii)a: constant fitted (no closed form available)".into());
            Ok(ExpansionPrediction {
                case,
                a1,
                a2,
                main_coeff: main,
                terms: vec![PredictionTerm {
                    exponent: nu,
                    constant: c,
                    provenance: Provenance::Fitted,
                }],
                error_exponent: nu,
                notes,
            })
        }
        CaseTag::C2iib => {
            let main = FHSymbol::ratio_power_coeffs(f1, f2, 1, 16).get(0);
            let gt = gtilde_integral(a2)?;
            let konst = gt * 2.0 * f1.fourier_coeffs(2).get(0)
                / (f2.regular_at_zero() * gamma(a2).powi(2));
            notes.push(format!(
                "case 2(ii)b: explicit closed-form constant {konst:+.6} on N^{:.3}; the measured residuals carry no such term (it cancels against the vanishing total mass of the numerator coefficients) and grow like N^{nu:.3} instead; the G~ law is verified on Tr(T_N^{{-1}}) where it genuinely lives",
                2.0 * a2,
            ));
            Ok(ExpansionPrediction {
                case,
                a1,
                a2,
                main_coeff: main,
                terms: vec![PredictionTerm {
                    exponent: 2.0 * a2,
                    constant: konst,
                    provenance: Provenance::Explicit,
                }],
                error_exponent: 2.0 * a2,
                notes,
            })
        }
    }
}

/// Predicted coefficient of `N^{2 a2}` in the trace-inverse law
/// `Tr(T_N^{-1}(f2)) = (N+1)(1/f2)^(0) + coeff N^{2 a2} + o(N^{2 a2})`
/// for a positive-exponent symbol: `2 (int G~) / (c2(1) Gamma(a2)^2)`.
pub fn trace_inverse_correction_coeff(f2: &FHSymbol) -> LabResult<f64> {
    let a2 = f2.alpha();
    Ok(gtilde_integral(a2)? * 2.0 / (f2.regular_at_zero() * gamma(a2).powi(2)))
}

/// Exact `Tr(T_N^{-1}(f2))` via the structured inverse.
pub fn trace_inverse(f2: &FHSymbol, n: usize) -> LabResult<f64> {
    let pred = predictor(&f2.fourier_coeffs(n), n)?;
    Ok(pred.diagonal_sums()[0])
}

/// Least-squares slope of `ln |residual|` against `ln N` with a ~95%
/// half-width; `flagged_sign_change` marks residual sign flips (the fit
/// then runs on absolute values).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RateFit {
    pub slope: f64,
    pub ci: f64,
    pub flagged_sign_change: bool,
    pub r2: f64,
}

/// Fit the decay (or growth) rate of residuals over an N-grid.
pub fn fit_rate(rows: &[(f64, f64)]) -> LabResult<RateFit> {
    let usable: Vec<(f64, f64)> = rows.iter().copied().filter(|&(_, r)| r != 0.0).collect();
    if usable.len() < 4 {
        return Err(LabError::TooFewPoints { need: 4, got: usable.len() });
    }
    let signs_differ = usable.windows(2).any(|w| (w[0].1 > 0.0) != (w[1].1 > 0.0));
    let xs: Vec<f64> = usable.iter().map(|&(n, _)| n.ln()).collect();
    let ys: Vec<f64> = usable.iter().map(|&(_, r)| r.abs().ln()).collect();
    let f = fit_line(&xs, &ys)?;
    Ok(RateFit { slope: f.slope, ci: f.slope_ci, flagged_sign_change: signs_differ, r2: f.r2 })
}

impl GridSymbol {
    /// Candidate constants via the grid route (mixed symbols); returns
    /// the (log-slot, linear-slot) pair.
    pub fn c1_candidates(&self, f1: &FHSymbol, k_max: usize) -> LabResult<(f64, f64)> {
        let ln_f2_inv = self.fourier_coeffs(k_max, Transform::Log)?.scaled(-1.0);
        let recip_f2 = self.fourier_coeffs(k_max, Transform::Reciprocal)?;
        let f1_hat = f1.fourier_coeffs(k_max);
        let b = inner_half(&ln_f2_inv, &recip_f2)?;
        let f10 = f1_hat.get(0);
        let lead = f10 * b.value;
        let a2 = self.singularity_exponent();
        let ratio = f1_hat.convolve_truncated(&recip_f2, k_max / 2);
        let a = inner_half(&ln_f2_inv, &ratio)?;
        let c_lnf1 = inner_half(&f1.log_inverse_series(k_max).scaled(-1.0), &recip_f2)?;
        let c_f1 = inner_half(&f1_hat, &recip_f2)?;
        let bracket = a.value - b.value * f10;
        Ok((
            lead - 2.0 * (a2 + 1.0) * (bracket - c_lnf1.value),
            lead - 2.0 * (a2 + 1.0) * (bracket - c_f1.value),
        ))
    }
}
