//! Gain compression and the 1 dB compression point.
//!
//! Biases the reference mode to 20 dB, then raises the signal power and
//! recomputes the self-consistent pump occupation at each step: the signal
//! steals pump photons, the gain sags, and the sweep reports the input
//! power where it has dropped by exactly 1 dB.
//!
//! Run with: cargo run --example compression

use paramp_lab::constants::{dbm_to_watts, watts_to_dbm};
use paramp_lab::kerr::{compression_sweep, optimal_pump_search};
use paramp_lab::presets;
use paramp_lab::Result;

fn main() -> Result<()> {
    let mode = presets::amplifier_mode();
    let op = optimal_pump_search(&mode, 20.0)?;
    println!(
        "operating point: {:.2} dB at f_pump = {:.6} GHz, P_pump = {:.2} dBm",
        op.achieved_gain_db,
        op.f_pump / 1e9,
        watts_to_dbm(op.pump_power_watts)
    );
    println!();

    let powers: Vec<f64> = (0..46)
        .map(|i| dbm_to_watts(-150.0 + i as f64))
        .collect();
    let sweep = compression_sweep(&mode, &op, &powers)?;

    println!("signal power sweep at {:.6} GHz:", sweep.f_signal / 1e9);
    println!("  {:>10}  {:>9}  {:>10}  {:>10}", "P_in (dBm)", "G (dB)", "n_pump", "n_signal");
    for p in sweep.points.iter().step_by(5) {
        println!(
            "  {:>10.1}  {:>9.2}  {:>10.0}  {:>10.1}",
            watts_to_dbm(p.p_signal_watts),
            p.gain_db,
            p.n_pump,
            p.n_signal
        );
    }
    println!();
    println!("small-signal gain = {:.2} dB", sweep.small_signal_gain_db);
    match sweep.p1db_input_watts {
        Some(w) => println!("P_1dB (input)     = {:.2} dBm", watts_to_dbm(w)),
        None => println!("P_1dB not reached inside the sweep"),
    }
    Ok(())
}
