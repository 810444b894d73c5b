//! Photon-number calibration from transmon dispersive measurements.
//!
//! Recovers the dispersive shift chi and the photons-per-milliwatt factor c
//! from the two measured slopes (qubit frequency shift and induced
//! dephasing versus generator power), converts a generator setting into an
//! intracavity photon number and into the power leaving the cavity, and
//! cross-checks the transmon frequency formula that anchors the dispersive
//! model.
//!
//! Run with: cargo run --example photon_calibration

use paramp_lab::calibration::{
    cavity_output_power, dispersive_shift_calibration, kappa_from_fwhm,
    measurement_dephasing, transmon_frequency,
};
use paramp_lab::constants::dbm_to_watts;
use paramp_lab::presets;
use paramp_lab::Result;

fn main() -> Result<()> {
    let cal = presets::transmon_calibration();

    // The two measured slopes implied by the reference calibration.
    let slope_dfq = 2.0 * cal.chi_hz * cal.c_photons_per_mw; // Hz per mW
    let slope_gamma =
        8.0 * cal.chi_hz * cal.chi_hz * cal.c_photons_per_mw / cal.kappa_hz; // Hz per mW
    println!("measured slopes vs generator power:");
    println!("  d(delta f_q)/dP = {:.3} MHz/mW", slope_dfq / 1e6);
    println!("  d(Gamma_phi)/dP = {:.3} MHz/mW", slope_gamma / 1e6);
    println!("  cavity linewidth kappa = {:.2} MHz", cal.kappa_hz / 1e6);
    println!();

    let (chi, c) = dispersive_shift_calibration(slope_gamma, slope_dfq, cal.kappa_hz)?;
    println!("recovered calibration:");
    println!("  chi = {:.3} MHz (2 chi = {:.3} MHz)", chi / 1e6, 2.0 * chi / 1e6);
    println!("  c   = {c:.3} photons/mW of generator power");
    println!();

    let p_gen_dbm = -20.0;
    let n = c * dbm_to_watts(p_gen_dbm) * 1e3;
    let p_out = cavity_output_power(cal.kappa_hz, cal.f_r_hz, n)?;
    let dephasing = measurement_dephasing(chi, n, cal.kappa_hz)?;
    println!("at a generator setting of {p_gen_dbm} dBm:");
    println!("  n photons        = {n:.4}");
    println!("  cavity output    = {p_out:.2} dBm (kappa h f_r n)");
    println!("  dephasing rate   = {:.3} MHz", dephasing / 1e6);
    println!();

    // Dispersive-model anchors.
    let kappa = kappa_from_fwhm(cal.f_r_hz, 517.0)?;
    println!("linewidth from f_r / Q at Q = 517: {:.2} MHz", kappa / 1e6);
    let ec = 250e6;
    let fq = 4.8e9;
    let ej = (fq + ec) * (fq + ec) / (8.0 * ec);
    let t = transmon_frequency(ej, ec)?;
    println!(
        "transmon with E_C = {:.0} MHz needs E_J = {:.2} GHz for f_q = {:.1} GHz \
         (E_J/E_C = {:.1}, validity {})",
        ec / 1e6,
        ej / 1e9,
        t.f_q_hz / 1e9,
        t.ej_over_ec,
        if t.within_validity { "ok" } else { "marginal" }
    );
    Ok(())
}
