//! Quantum-limited noise accounting: SNR improvement over the HEMT.
//!
//! Prints the standard quantum limit expressed as a noise temperature at
//! the operating frequency, then the measurement SNR improvement a
//! quantum-limited preamplifier of gain G provides in front of a 2.2 K
//! HEMT, including the large-gain asymptote where the HEMT contribution is
//! fully diluted.
//!
//! Run with: cargo run --example snr_improvement

use paramp_lab::kerr::{
    quantum_limit_temperature, snr_improvement_asymptote_db, snr_improvement_db,
};
use paramp_lab::Result;

fn main() -> Result<()> {
    let f = 6.3139e9;
    let t_hemt = 2.2;

    let t_ql = quantum_limit_temperature(f)?;
    println!("standard quantum limit at {:.4} GHz: T_QL = {:.1} mK", f / 1e9, t_ql * 1e3);
    println!("HEMT noise temperature: {t_hemt} K");
    println!();

    let asymptote = snr_improvement_asymptote_db(t_hemt, f)?;
    println!("SNR improvement vs preamplifier gain:");
    println!("  {:>9}  {:>14}", "G (dB)", "dSNR (dB)");
    for g_db in [0.0, 3.0, 6.0, 10.0, 15.0, 20.0, 25.0, 30.0] {
        let d = snr_improvement_db(10f64.powf(g_db / 10.0), t_hemt, f)?;
        println!("  {g_db:>9.0}  {d:>14.2}");
    }
    println!("  {:>9}  {asymptote:>14.2}", "inf");
    println!();
    println!(
        "a measured improvement of 7 dB sits {:.2} dB below the asymptote:",
        asymptote - 7.0
    );
    println!("residual added noise above the quantum limit, loss between the");
    println!("device and the HEMT, or gain shortfall all show up in that gap.");
    Ok(())
}
