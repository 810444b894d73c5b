//! Cryogenic line budgets: attenuation, compression and cascade noise.
//!
//! Prints the stage-by-stage power budget of the probe input line (-99.0 dB
//! total) and of the pump/readout chain, flags amplifier stages driven past
//! their input compression point, and computes the Friis cascade noise
//! temperature showing how a cold first-stage amplifier dilutes everything
//! behind it.
//!
//! Run with: cargo run --example chain_budget

use paramp_lab::calibration::{
    budget_table, chain_attenuation, friis_noise_temperature, AmplifierChain, Stage,
    LINE_SYSTEMATIC_UNCERTAINTY_DB,
};
use paramp_lab::presets;
use paramp_lab::Result;

fn main() -> Result<()> {
    let probe = presets::probe_line_chain();
    println!(
        "probe input line: {:.1} dB total (+-{} dB systematic)",
        chain_attenuation(&probe),
        LINE_SYSTEMATIC_UNCERTAINTY_DB
    );
    println!("{}", budget_table(&probe, -20.0));
    println!();

    let pump = presets::pump_line_chain();
    println!("pump + readout chain driven at -1.2 dBm:");
    println!("{}", budget_table(&pump, -1.2));
    println!();

    // Readout cascade seen from the device output: HEMT first, then the
    // room-temperature post-amplifier.
    let readout = AmplifierChain::new(vec![
        Stage::amplifier("cryo hemt", 40.0, 2.2),
        Stage::amplifier("room amplifier", 40.0, 100.0),
    ])?;
    let t_readout = friis_noise_temperature(&readout)?;

    // The same cascade behind a near-quantum-limited 20 dB preamplifier.
    let with_preamp = AmplifierChain::new(vec![
        Stage::amplifier("paramp", 20.0, 0.3),
        Stage::amplifier("cryo hemt", 40.0, 2.2),
        Stage::amplifier("room amplifier", 40.0, 100.0),
    ])?;
    let t_pre = friis_noise_temperature(&with_preamp)?;

    println!("readout cascade noise temperature (device output reference):");
    println!("  HEMT + room amplifier:              {t_readout:.3} K");
    println!("  with a 0.3 K, 20 dB paramp first:   {t_pre:.3} K");
    println!(
        "the preamplifier divides everything behind it by its gain, so the\n\
         system noise falls from the HEMT's {t_readout:.2} K to nearly the paramp's\n\
         own 0.3 K."
    );
    Ok(())
}
