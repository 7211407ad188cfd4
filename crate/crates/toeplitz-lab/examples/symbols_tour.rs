//! Tour of the symbol layer: build singular symbols, inspect their
//! Fourier/log/Wiener-Hopf coefficient sequences, pair them in the
//! weighted inner product and export a series as CSV.

use toeplitz_lab::symbols::{inner_half, Transform};
use toeplitz_lab::FHSymbol;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // f(theta) = |1 - e^{i theta}|^{2 alpha} |P(e^{i theta})|^2
    let f1 = FHSymbol::new(0.25, vec![1.0], "zero-quarter")?;
    let f2 = FHSymbol::new(-0.25, vec![1.0, -0.3], "pole-quarter")?;

    println!("f1 at pi: {:.6}  (sqrt 2 = {:.6})", f1.eval(std::f64::consts::PI), 2f64.sqrt());
    println!("f2 at 0+: {:?} (pole)", f2.eval(0.0));

    let k = 32;
    let c2 = f2.fourier_coeffs(k);
    println!("\nfirst Fourier coefficients of f2:");
    for m in 0..6 {
        println!("  h({m}) = {:+.8}", c2.get(m));
    }

    let beta = f2.beta_series(k);
    println!("\nWiener-Hopf sequence of f2 (one-sided):");
    for m in 0..6 {
        println!("  beta_{m} = {:+.8}", beta.get(m));
    }

    // the pairing that drives every expansion constant
    let big = 1 << 16;
    let pairing = inner_half(&f2.log_inverse_series(big), &f2.reciprocal_coeffs(big))?;
    println!(
        "\n<ln f2^-1, 1/f2>_(2,1/2) = {:.8}  (truncation {}, tail {:.1e}, stable {})",
        pairing.value, pairing.truncation, pairing.tail_estimate, pairing.stable
    );

    // grid route with singularity subtraction reproduces the closed form
    let grid = f2.to_grid(1 << 14)?;
    let direct = grid.fourier_coeffs(256, Transform::Direct)?;
    let exact = f2.fourier_coeffs(256);
    let worst = (0..=256)
        .map(|m| (direct.get(m) - exact.get(m)).abs())
        .fold(0.0f64, f64::max);
    println!("grid-vs-closed coefficient agreement: {worst:.2e}");

    let out = std::env::temp_dir().join("f2_coefficients.csv");
    c2.write_csv(&out)?;
    println!("\nwrote {}", out.display());
    Ok(())
}
