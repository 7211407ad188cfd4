//! Monte Carlo CLT check for quadratic forms of a long-memory Gaussian
//! process: X ~ N(0, T_N(f1)), Q = X^t T_N^{-1}(f2) X. The fluctuations
//! of (Q - m_N)/sqrt(N) carry the chi-square variance identity exactly
//! and look normal as N grows.

use toeplitz_lab::stochastic::{clt_experiment, McEnsemble};
use toeplitz_lab::FHSymbol;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f1 = FHSymbol::new(0.25, vec![1.0], "f1")?;
    let f2 = FHSymbol::new(-0.25, vec![1.0], "f2")?;
    let seed = 2;
    let r = 10_000;

    let ens = McEnsemble::generate(&f1, &f2, 512, r, seed)?;
    println!(
        "N = 512, R = {r}: MC mean {:.4} vs exact m_N = {:.4} (SE {:.4})",
        ens.mean(),
        ens.m_n,
        (ens.variance() / r as f64).sqrt()
    );

    for n in [256usize, 512, 1024] {
        let c = clt_experiment(&f1, &f2, n, r, seed)?;
        println!(
            "N = {n:5}: sample var {:.4} | exact 2Tr((T1 T2^-1)^2)/N = {:.4} | limit (1/pi) int (f1/f2)^2 = {:.4} | KS {:.4} | skew {:+.3}",
            c.sample_variance, c.exact_variance, c.target_variance, c.ks_normal, c.skewness
        );
    }
    println!("\n(KS distance and skewness fall as N grows; the variance identity holds at every N)");
    Ok(())
}
