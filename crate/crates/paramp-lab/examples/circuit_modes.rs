//! Mode structure of the nanowire-loaded quarter-wave resonator.
//!
//! Computes the kinetic-inductance participation ratio, the critical current
//! of an equally inductive Josephson junction, and the first few loaded mode
//! frequencies, showing how far the nanowire pushes the fundamental below
//! the bare quarter-wave frequency while the higher modes stay out of band.
//!
//! Run with: cargo run --example circuit_modes

use paramp_lab::circuit::{
    equivalent_critical_current, fundamental_frequency, inductance_fraction,
    loaded_mode_frequencies,
};
use paramp_lab::presets;
use paramp_lab::Result;

fn main() -> Result<()> {
    let res = presets::nanowire_resonator();
    let l_nw = res.l_nanowire_zero;

    println!("nanowire-loaded quarter-wave resonator");
    println!("  line:      L = {:.3} nH, C = {:.1} fF", res.l_line_total * 1e9, res.c_line_total * 1e15);
    println!("  nanowire:  L_nw = {:.3} nH", l_nw * 1e9);
    println!("  char. impedance Z0 = {:.2} ohm", res.characteristic_impedance());
    println!("  bare quarter-wave frequency = {:.4} GHz", res.quarter_wave_frequency() / 1e9);
    println!();

    let alpha = inductance_fraction(l_nw, res.l_line_total)?;
    let i_c = equivalent_critical_current(l_nw)?;
    println!("kinetic-inductance participation alpha = {alpha:.3}");
    println!("junction-equivalent critical current   = {:.3} uA", i_c * 1e6);
    println!();

    let modes = loaded_mode_frequencies(&res, l_nw, 4)?;
    println!("loaded mode frequencies:");
    for (k, f) in modes.iter().enumerate() {
        println!("  mode {k}: {:.4} GHz", f / 1e9);
    }
    let f0 = fundamental_frequency(&res, l_nw)?;
    println!();
    println!(
        "fundamental sits {:.1} MHz below the bare quarter-wave line",
        (res.quarter_wave_frequency() - f0) / 1e6
    );
    println!(
        "first higher mode at {:.2} GHz = {:.2} x fundamental (strongly anharmonic ladder)",
        modes[1] / 1e9,
        modes[1] / f0
    );
    Ok(())
}
