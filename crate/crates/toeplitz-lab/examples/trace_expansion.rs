//! Trace expansions across the built-in bank: classify each pair, build
//! its prediction (explicit, fitted or extrapolated constants) and print
//! the residual table with the fitted convergence rate.

use toeplitz_lab::experiment::{bank, run_experiment};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in bank::names() {
        let mut config = bank::by_name(name)?;
        config.n_grid = vec![256, 512, 1024, 2048];
        config.timestamp = false;
        let report = run_experiment(&config)?;
        println!("== {name} (case {:?}) -> {:?}", report.case, report.verdict);
        for c in &report.constants {
            println!("   constant {:+.6} on N^{:.3}  [{}]", c.value, c.exponent, c.provenance);
        }
        for row in &report.rows {
            println!(
                "   N={:5}  exact {:+.6e}  predicted {:+.6e}  residual {:+.3e}",
                row.n, row.exact, row.predicted, row.residual
            );
        }
        if let Some(rate) = report.fitted_rate {
            println!("   fitted residual rate: {:.3} +- {:.3}", rate.slope, rate.ci);
        }
        for note in &report.notes {
            println!("   note: {note}");
        }
        for err in &report.errors {
            println!("   error: {err}");
        }
        println!();
    }
    Ok(())
}
