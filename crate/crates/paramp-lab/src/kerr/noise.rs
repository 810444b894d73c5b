//! Signal-to-noise accounting for a quantum-limited preamplifier in front of
//! a warmer transistor amplifier.
//!
//! All temperatures are noise temperatures in kelvin. The preamplifier is
//! taken at its standard quantum limit, adding half a photon of input noise;
//! expressed as a temperature that is `T_ql = h f / k_B` for the half-photon
//! pair (signal plus idler port contributions in a phase-preserving
//! amplifier).

use crate::constants::{BOLTZMANN, PLANCK};
use crate::error::{Error, Result};

fn check_frequency(f_hz: f64) -> Result<()> {
    if !(f_hz.is_finite() && f_hz > 0.0) {
        return Err(Error::Domain(format!(
            "frequency must be finite and positive, got {f_hz:e} Hz"
        )));
    }
    Ok(())
}

/// Quantum-limit noise temperature `h f / k_B` of a phase-preserving
/// amplifier at frequency `f_hz` [K].
pub fn quantum_limit_temperature(f_hz: f64) -> Result<f64> {
    check_frequency(f_hz)?;
    Ok(PLANCK * f_hz / BOLTZMANN)
}

/// SNR improvement from inserting a quantum-limited preamplifier of power
/// gain `gain_linear` in front of a stage with noise temperature `t_hemt_k`.
///
/// Without the preamplifier the system noise is `T_ql + T_h` (the signal
/// still carries its half-photon vacuum noise into the transistor stage);
/// with it, `T_ql + T_h / G` referred to the input. The improvement in dB is
///
/// ```text
/// dSNR = 10 log10( G (T_ql + T_h) / (G T_ql + T_h) )
/// ```
///
/// which vanishes at `G = 1` and saturates at
/// [`snr_improvement_asymptote_db`] as `G -> inf`.
pub fn snr_improvement_db(gain_linear: f64, t_hemt_k: f64, f_hz: f64) -> Result<f64> {
    check_frequency(f_hz)?;
    if !(gain_linear.is_finite() && gain_linear >= 1.0) {
        return Err(Error::Domain(format!(
            "preamplifier power gain must be >= 1, got {gain_linear}"
        )));
    }
    if !(t_hemt_k.is_finite() && t_hemt_k >= 0.0) {
        return Err(Error::Domain(format!(
            "stage noise temperature must be non-negative, got {t_hemt_k} K"
        )));
    }
    let t_ql = quantum_limit_temperature(f_hz)?;
    Ok(10.0
        * (gain_linear * (t_ql + t_hemt_k) / (gain_linear * t_ql + t_hemt_k)).log10())
}

/// Large-gain limit of [`snr_improvement_db`]:
/// `10 log10(1 + T_h / T_ql)` [dB].
pub fn snr_improvement_asymptote_db(t_hemt_k: f64, f_hz: f64) -> Result<f64> {
    check_frequency(f_hz)?;
    if !(t_hemt_k.is_finite() && t_hemt_k >= 0.0) {
        return Err(Error::Domain(format!(
            "stage noise temperature must be non-negative, got {t_hemt_k} K"
        )));
    }
    let t_ql = quantum_limit_temperature(f_hz)?;
    Ok(10.0 * (1.0 + t_hemt_k / t_ql).log10())
}
