//! Kerr-coefficient extraction from a power ladder.
//!
//! Simulates the standard calibration: step the drive power, record the
//! shifted resonance frequency versus intracavity photon number, and fit
//! the line f0(n) = f_r0 + K n. With 5 kHz of frequency scatter per point
//! the -20 kHz/photon Kerr coefficient comes back within its standard
//! error.
//!
//! Run with: cargo run --example kerr_slope

use paramp_lab::fit::kerr_slope_fit;
use paramp_lab::synth::kerr_ladder;
use paramp_lab::Result;

fn main() -> Result<()> {
    let f0 = 6.4e9;
    let k_true = -20e3;
    let sigma = 5e3;
    let ns: Vec<f64> = (1..=40).map(|i| 50.0 * i as f64).collect();

    let (n, f) = kerr_ladder(f0, k_true, &ns, sigma, 11)?;
    println!(
        "ladder: {} points, n = {:.0}..{:.0} photons, {:.0} kHz scatter",
        n.len(),
        n[0],
        n[n.len() - 1],
        sigma / 1e3
    );
    println!("  {:>8}  {:>14}", "n", "f0(n) (GHz)");
    for i in (0..n.len()).step_by(8) {
        println!("  {:>8.0}  {:>14.6}", n[i], f[i] / 1e9);
    }
    println!();

    let points: Vec<(f64, f64)> = n.iter().copied().zip(f.iter().copied()).collect();
    let fit = kerr_slope_fit(&points)?;
    let (k, k_err) = fit.get("K").expect("named parameter");
    let (f_r0, f_r0_err) = fit.get("f_r0").expect("named parameter");

    println!("weighted line fit f0(n) = f_r0 + K n:");
    println!("  K    = {:.3} +- {:.3} kHz/photon  (truth {:.1})", k / 1e3, k_err / 1e3, k_true / 1e3);
    println!("  f_r0 = {:.6} +- {:.6} MHz offset from truth", (f_r0 - f0) / 1e6, f_r0_err / 1e6);
    println!("  pull of K: {:+.2} sigma", (k - k_true) / k_err);
    Ok(())
}
