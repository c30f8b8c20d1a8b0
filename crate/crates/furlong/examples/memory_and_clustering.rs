//! Time-dependence battery: autocorrelation, power-law decay of the
//! absolute-return ACF (volatility clustering), and the R/S Hurst
//! exponent.
//!
//! Run with: cargo run --example memory_and_clustering

use furlong::stats::{acf, fit_powerlaw_acf, hurst_rs};
use furlong::synth::{generate_series, Family, GeneratorSpec};

fn draw(family: Family, n: usize, seed: u64) -> Vec<f64> {
    generate_series(&GeneratorSpec { family, n, seed })
        .unwrap()
        .values()
}

fn main() -> furlong::Result<()> {
    // linear autocorrelation of an AR(1)
    let ar = draw(Family::Ar1 { phi: 0.8 }, 100_000, 11);
    let result = acf(&ar, 10)?;
    println!("AR(1) phi = 0.8 autocorrelations (band +-{:.4}):", result.band);
    for (lag, rho) in &result.correlations[..6] {
        println!("  lag {lag}: {rho:+.4}  (theory {:+.4})", 0.8f64.powi(*lag as i32));
    }

    // volatility clustering: persistent GARCH absolute returns decay as a
    // power law over the fitted lag range
    let garch = draw(
        Family::Garch11 { omega: 0.005, a1: 0.05, b1: 0.945 },
        100_000,
        12,
    );
    let abs_returns: Vec<f64> = garch.iter().map(|v| v.abs()).collect();
    let rho = acf(&abs_returns, 200)?;
    let fit = fit_powerlaw_acf(&rho.correlations, 200)?;
    println!(
        "\nGARCH(1,1) |returns| ACF decay: alpha = {:.3} (R^2 = {:.3}, {} lags used)",
        fit.exponent, fit.r_squared, fit.used_lags
    );

    // long-memory diagnostics via rescaled range
    println!("\nHurst exponents (R/S):");
    for (name, series) in [
        ("white noise", draw(Family::Gaussian { mean: 0.0, std: 1.0 }, 1 << 16, 13)),
        ("AR(1) phi = -0.5 (mean-reverting)", draw(Family::Ar1 { phi: -0.5 }, 1 << 16, 14)),
        ("random walk levels (trending)", draw(Family::RandomWalk, 1 << 16, 15)),
    ] {
        let h = hurst_rs(&series, None)?;
        println!("  {name}: H = {:.3} (R^2 = {:.3})", h.estimate, h.r_squared);
    }
    Ok(())
}
