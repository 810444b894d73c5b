//! Pump steady states and the bistability threshold of the Kerr mode.
//!
//! Prints the critical photon number, critical detuning and critical input
//! power of the reference amplifier mode, then walks the pump power upward
//! at a fixed red-detuned pump and shows the single-valued region, the fold
//! into three coexisting steady states, and which branches are stable.
//!
//! Run with: cargo run --example pump_bistability

use paramp_lab::constants::watts_to_dbm;
use paramp_lab::kerr::{bistability_threshold, pump_steady_states};
use paramp_lab::presets;
use paramp_lab::Result;

fn main() -> Result<()> {
    let mode = presets::amplifier_mode();
    let kappa = mode.kappa_c + mode.kappa_i;

    let th = bistability_threshold(&mode)?;
    println!("bistability threshold of the reference mode:");
    println!("  kappa        = {:.2} MHz", kappa / 1e6);
    println!("  K            = {:.1} kHz/photon", mode.kerr / 1e3);
    println!("  n_crit       = {:.0} photons", th.n_crit);
    println!("  delta_crit   = {:+.2} MHz ({:+.3} kappa)", th.delta_crit / 1e6, th.delta_crit / kappa);
    println!("  P_crit       = {:.2} dBm at the device port", watts_to_dbm(th.critical_power_watts));
    println!();

    // Pump above the critical detuning: the response folds as power rises.
    let f_pump = mode.f0 + 1.2 * th.delta_crit;
    println!(
        "steady states at delta = {:+.2} MHz (1.2 x critical detuning):",
        (f_pump - mode.f0) / 1e6
    );
    println!("  {:>10}  {:>28}", "P (dBm)", "n per branch (* = stable)");
    for rel_db in [-6.0, -3.0, -1.0, 0.0, 1.0, 3.0] {
        let p = th.critical_power_watts * 10f64.powf(rel_db / 10.0);
        let state = pump_steady_states(&mode, f_pump, p)?;
        let mut desc = String::new();
        for b in &state.branches {
            let mark = if b.stable { "*" } else { " " };
            desc.push_str(&format!("{:>9.1}{mark}", b.n_photons));
        }
        println!("  {:>10.2}  {desc}", watts_to_dbm(p));
    }
    println!();
    println!("below threshold the response is single-valued; above it the");
    println!("middle branch is dynamically unstable and the mode latches");
    println!("between the two outer branches.");
    Ok(())
}
