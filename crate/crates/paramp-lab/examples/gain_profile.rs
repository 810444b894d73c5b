//! Operating-point search and signal/idler gain profile.
//!
//! Finds the pump frequency and power that bias the reference mode to 20 dB
//! of phase-insensitive gain on a stable branch, prints the resulting
//! profile metrics (peak, 3 dB bandwidth, sqrt(G)-bandwidth product), and
//! samples the profile across the band.
//!
//! Run with: cargo run --example gain_profile

use paramp_lab::constants::watts_to_dbm;
use paramp_lab::kerr::{gain_profile, optimal_pump_search, pump_steady_states};
use paramp_lab::presets;
use paramp_lab::Result;

fn main() -> Result<()> {
    let mode = presets::amplifier_mode();
    let kappa = mode.kappa_c + mode.kappa_i;

    let op = optimal_pump_search(&mode, 20.0)?;
    println!("operating point for 20 dB:");
    println!("  f_pump   = {:.6} GHz", op.f_pump / 1e9);
    println!(
        "  detuning = {:+.2} MHz ({:+.3} kappa)",
        (op.f_pump - mode.f0) / 1e6,
        (op.f_pump - mode.f0) / kappa
    );
    println!("  P_pump   = {:.2} dBm at the device port", watts_to_dbm(op.pump_power_watts));
    println!("  n_pump   = {:.0} photons (branch {})", op.n_pump, op.branch);
    println!("  achieved = {:.2} dB", op.achieved_gain_db);
    println!();

    let pump = pump_steady_states(&mode, op.f_pump, op.pump_power_watts)?;
    let profile = gain_profile(
        &mode,
        &pump,
        op.branch,
        op.f_pump - 4e8,
        op.f_pump + 4e8,
        1601,
    )?;
    let m = &profile.metrics;
    println!("gain profile metrics:");
    println!("  peak gain       = {:.2} dB at {:.6} GHz", m.peak_gain_db, m.peak_freq_hz / 1e9);
    if let Some(fwhm) = m.fwhm_hz {
        println!("  3 dB bandwidth  = {:.2} MHz", fwhm / 1e6);
    }
    if let Some(gbw) = m.gain_bandwidth_hz {
        println!("  sqrt(G) x BW    = {:.1} MHz", gbw / 1e6);
    }
    println!();

    println!("profile samples (signal and idler):");
    println!("  {:>12}  {:>10}  {:>10}", "offset (MHz)", "G_s (dB)", "G_i (dB)");
    let n = profile.freq_hz.len();
    for i in (0..n).step_by(n / 16) {
        let f = profile.freq_hz[i];
        let gi = 10.0 * profile.g_idler[i].norm_sqr().log10();
        println!(
            "  {:>12.1}  {:>10.2}  {:>10.2}",
            (f - op.f_pump) / 1e6,
            profile.gain_db(i),
            gi
        );
    }
    Ok(())
}
