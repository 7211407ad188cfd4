//! Power traces against derivatives of the mixing functional: fit
//! Psi_1(t) on a window at 0, then check that
//! Tr((T_N f1 T_N^{-1} f2)^s) - Tr T_N((f1/f2)^s) approaches
//! (-1)^{s-1} Psi_1^{(s-1)}(0)/(s-1)! as N grows.

use toeplitz_lab::asymptotics::{psi1, psi_derivatives, Psi1Params};
use toeplitz_lab::toeplitz::{trace_ratio_power, TracePath};
use toeplitz_lab::FHSymbol;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f1 = FHSymbol::new(0.25, vec![1.0], "f1")?;
    let f2 = FHSymbol::new(-0.25, vec![1.0], "f2")?;

    // keep the N-grid modest so the example runs in seconds
    let params = Psi1Params { n_grid: vec![1024, 2048, 4096, 8192], quad_tol: 1e-11 };

    let at_zero = psi1(&f1, &f2, 0.0, &params)?;
    println!(
        "Psi_1(0) = {:.8} +- {:.1e}   (for this pair the limit is -1/pi = {:.8})",
        at_zero.value,
        at_zero.uncertainty,
        -1.0 / std::f64::consts::PI
    );

    let derivs = psi_derivatives(&f1, &f2, 2, &params)?;
    println!(
        "fit window [0, {:.4}], degree {}, rms {:.1e}",
        derivs.t_fit, derivs.degree, derivs.rms_residual
    );
    for (l, (v, u)) in derivs.values.iter().zip(&derivs.uncertainties).enumerate() {
        println!("  Psi_1^({l})(0) = {v:+.6} +- {u:.1e}");
    }

    for s in [2usize, 3] {
        let mut factorial = 1.0;
        for j in 1..s {
            factorial *= j as f64;
        }
        let sign = if s % 2 == 1 { 1.0 } else { -1.0 };
        let target = sign * derivs.values[s - 1] / factorial;
        println!("\ns = {s}: predicted limit {target:+.6}");
        let ratio_s = FHSymbol::ratio_power_coeffs(&f1, &f2, s, 16);
        for n in [256usize, 512, 1024, 2048] {
            let tr = trace_ratio_power(&f1, &f2, n, s, TracePath::Dense)?;
            let d = tr - (n + 1) as f64 * ratio_s.get(0);
            println!("  N={n:5}: d_s = {d:+.6}   gap {:+.1e}", d - target);
        }
    }
    Ok(())
}
