//! Gate-voltage and in-plane-field tuning of the amplifier mode.
//!
//! Sweeps the gate window, showing the monotone 15 MHz logistic tuning
//! curve, then sweeps the in-plane field and shows the even, strictly
//! softening frequency shift calibrated to -170 MHz at 0.5 T.
//!
//! Run with: cargo run --example gate_field_tuning

use paramp_lab::circuit::{field_frequency_shift, gate_frequency};
use paramp_lab::presets;
use paramp_lab::Result;

fn main() -> Result<()> {
    let res = presets::nanowire_resonator();
    let gate = presets::gate_map();
    let field = presets::field_map();

    println!("gate tuning over [{:+.1} V, {:+.1} V]:", gate.v_low, gate.v_high);
    let f_low = gate_frequency(&gate, &res, gate.v_low)?;
    for i in 0..=10 {
        let v = gate.v_low + (gate.v_high - gate.v_low) * i as f64 / 10.0;
        let f = gate_frequency(&gate, &res, v)?;
        println!("  V_g = {v:+5.1} V  ->  f = {:.6} GHz  (shift {:+7.3} MHz)", f / 1e9, (f - f_low) / 1e6);
    }
    let f_high = gate_frequency(&gate, &res, gate.v_high)?;
    println!("  total span {:.3} MHz", (f_high - f_low) / 1e6);
    println!();

    println!("in-plane field tuning (b_star = {:.3} T):", field.b_star);
    for b in [0.0, 0.1, 0.2, 0.3, 0.4, 0.5] {
        let shift = field_frequency_shift(&field, &res, b)?;
        println!("  B = {b:.1} T  ->  shift {:+9.3} MHz", shift / 1e6);
    }
    let s_pos = field_frequency_shift(&field, &res, 0.35)?;
    let s_neg = field_frequency_shift(&field, &res, -0.35)?;
    println!("  even in B: shift(+0.35 T) - shift(-0.35 T) = {:+.3e} Hz", s_pos - s_neg);
    Ok(())
}
