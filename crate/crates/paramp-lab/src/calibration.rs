//! Amplification-chain budgets and transmon-based power calibration.
//!
//! Two families of procedures live here. The chain budget treats the
//! measurement setup as an ordered cascade of gain/attenuation stages:
//! total line attenuation, per-stage power referral with compression flags,
//! and the Friis input-referred system noise temperature. The transmon
//! calibration converts a generator power into an absolute intracavity
//! photon number (and cavity output power) via the dispersive shift and
//! measurement-induced dephasing of a qubit coupled to the readout
//! resonator.

use serde::{Deserialize, Serialize};

use crate::constants::{watts_to_dbm, PLANCK};
use crate::error::{Error, Result};

/// One stage of an amplification/attenuation chain.
///
/// `gain_db` is negative for attenuators. Amplifiers carry an (input
/// referred) `noise_temperature_k`; attenuators instead carry the physical
/// temperature of the dissipative element, from which their effective noise
/// temperature `(1/G - 1) T_phys` follows. A stage with neither is treated
/// as noiseless.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Stage {
    pub name: String,
    pub gain_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_temperature_k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub physical_temperature_k: Option<f64>,
    /// Input-referred 1-dB compression point (dBm).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p1db_input_dbm: Option<f64>,
}

impl Stage {
    /// Attenuator stage at an explicit physical temperature.
    pub fn attenuator(name: &str, gain_db: f64, physical_temperature_k: f64) -> Self {
        Stage {
            name: name.to_string(),
            gain_db,
            noise_temperature_k: None,
            physical_temperature_k: Some(physical_temperature_k),
            p1db_input_dbm: None,
        }
    }

    /// Amplifier stage with a noise temperature.
    pub fn amplifier(name: &str, gain_db: f64, noise_temperature_k: f64) -> Self {
        Stage {
            name: name.to_string(),
            gain_db,
            noise_temperature_k: Some(noise_temperature_k),
            physical_temperature_k: None,
            p1db_input_dbm: None,
        }
    }

    /// Builder-style setter for the compression point.
    pub fn with_p1db(mut self, p1db_input_dbm: f64) -> Self {
        self.p1db_input_dbm = Some(p1db_input_dbm);
        self
    }

    /// Effective input-referred noise temperature of this stage alone.
    fn noise_temperature(&self) -> f64 {
        if let Some(t) = self.noise_temperature_k {
            t
        } else if let Some(tp) = self.physical_temperature_k {
            let g = 10f64.powf(self.gain_db / 10.0);
            (1.0 / g - 1.0).max(0.0) * tp
        } else {
            0.0
        }
    }
}

/// An ordered cascade of stages, input side first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AmplifierChain {
    pub stages: Vec<Stage>,
}

impl AmplifierChain {
    /// Build a chain, validating the type invariants: at least one stage,
    /// finite gains, non-negative temperatures.
    pub fn new(stages: Vec<Stage>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::InvalidArgument(
                "a chain needs at least one stage".into(),
            ));
        }
        for s in &stages {
            if !s.gain_db.is_finite() {
                return Err(Error::Domain(format!(
                    "stage '{}' has non-finite gain",
                    s.name
                )));
            }
            for t in [s.noise_temperature_k, s.physical_temperature_k] {
                if let Some(t) = t {
                    if !(t.is_finite() && t >= 0.0) {
                        return Err(Error::Domain(format!(
                            "stage '{}' has invalid temperature {t}",
                            s.name
                        )));
                    }
                }
            }
        }
        Ok(AmplifierChain { stages })
    }
}

/// Systematic uncertainty attached to every line-budget result (dB).
///
/// Component-wise attenuation budgets and end-to-end calibrations of the
/// same cryogenic line disagree at the few-dB level (cable aging, connector
/// repeatability, stage-temperature drift), so summed budgets are quoted
/// with this ± band rather than as exact.
pub const LINE_SYSTEMATIC_UNCERTAINTY_DB: f64 = 4.0;

/// Net gain of the chain: the algebraic sum of stage gains (dB). Negative
/// for a net-attenuating line.
pub fn chain_attenuation(chain: &AmplifierChain) -> f64 {
    chain.stages.iter().map(|s| s.gain_db).sum()
}

/// Power level after one stage of the chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StagePower {
    pub name: String,
    /// Power arriving at the stage input (dBm).
    pub input_dbm: f64,
    /// Power leaving the stage (dBm).
    pub output_dbm: f64,
    /// True when the stage input meets or exceeds its 1-dB compression
    /// point.
    pub compressed: bool,
}

/// Refer an input power through the chain, stage by stage, flagging any
/// stage driven at or beyond its input-referred compression point.
pub fn referred_power(chain: &AmplifierChain, input_dbm: f64) -> Vec<StagePower> {
    let mut level = input_dbm;
    chain
        .stages
        .iter()
        .map(|s| {
            let input = level;
            let compressed = s.p1db_input_dbm.is_some_and(|p| input >= p);
            level += s.gain_db;
            StagePower {
                name: s.name.clone(),
                input_dbm: input,
                output_dbm: level,
                compressed,
            }
        })
        .collect()
}

/// Input-referred system noise temperature of the cascade (Friis):
///
/// ```text
/// T_sys = sum_k T_k / prod_{j<k} G_j     (linear gains G_j)
/// ```
///
/// Amplifiers contribute their noise temperature; attenuators contribute
/// `(1/G - 1) T_physical`. Requires at least one gain stage.
pub fn friis_noise_temperature(chain: &AmplifierChain) -> Result<f64> {
    if !chain.stages.iter().any(|s| s.gain_db > 0.0) {
        return Err(Error::InvalidArgument(
            "Friis cascade needs at least one amplifier stage".into(),
        ));
    }
    let mut gain_before = 1.0;
    let mut t_sys = 0.0;
    for s in &chain.stages {
        t_sys += s.noise_temperature() / gain_before;
        gain_before *= 10f64.powf(s.gain_db / 10.0);
    }
    Ok(t_sys)
}

/// Aligned-column text table of a chain budget for a given input power.
pub fn budget_table(chain: &AmplifierChain, input_dbm: f64) -> String {
    let rows = referred_power(chain, input_dbm);
    let name_w = rows
        .iter()
        .map(|r| r.name.len())
        .chain(std::iter::once("stage".len()))
        .max()
        .unwrap_or(5);
    let mut out = format!(
        "{:<name_w$}  {:>9}  {:>10}  {:>10}  {}\n",
        "stage", "gain (dB)", "in (dBm)", "out (dBm)", "compressed"
    );
    for (row, stage) in rows.iter().zip(&chain.stages) {
        out.push_str(&format!(
            "{:<name_w$}  {:>9.2}  {:>10.2}  {:>10.2}  {}\n",
            row.name,
            stage.gain_db,
            row.input_dbm,
            row.output_dbm,
            if row.compressed { "YES" } else { "-" }
        ));
    }
    out.push_str(&format!(
        "{:<name_w$}  {:>9.2}  {:>10.2}  {:>10.2}\n",
        "total",
        chain_attenuation(chain),
        input_dbm,
        input_dbm + chain_attenuation(chain)
    ));
    out
}

/// Transmon-based photon-number calibration of a readout resonator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmonCalibration {
    /// Total resonator linewidth (FWHM, Hz).
    pub kappa_hz: f64,
    /// Dispersive shift (Hz).
    pub chi_hz: f64,
    /// Photons per milliwatt of generator power.
    pub c_photons_per_mw: f64,
    /// Readout resonator frequency (Hz).
    pub f_r_hz: f64,
}

impl TransmonCalibration {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa_hz.is_finite() && self.kappa_hz > 0.0) {
            return Err(Error::Domain(format!(
                "kappa must be positive, got {:e}",
                self.kappa_hz
            )));
        }
        if !(self.c_photons_per_mw.is_finite() && self.c_photons_per_mw >= 0.0) {
            return Err(Error::Domain(format!(
                "conversion factor must be non-negative, got {:e}",
                self.c_photons_per_mw
            )));
        }
        if !(self.f_r_hz.is_finite() && self.f_r_hz > 0.0) {
            return Err(Error::Domain(format!(
                "resonator frequency must be positive, got {:e}",
                self.f_r_hz
            )));
        }
        Ok(())
    }

    /// Photon number for a generator power in milliwatts: `n = c P`.
    pub fn photon_number(&self, p_generator_mw: f64) -> f64 {
        self.c_photons_per_mw * p_generator_mw
    }

    /// Cavity output power (dBm) for a generator power in milliwatts.
    pub fn output_power_dbm(&self, p_generator_mw: f64) -> Result<f64> {
        self.validate()?;
        cavity_output_power(self.kappa_hz, self.f_r_hz, self.photon_number(p_generator_mw))
    }
}

/// Extract the dispersive shift and the power-to-photon conversion factor
/// from the measured power slopes of the qubit dephasing rate and frequency
/// shift:
///
/// ```text
/// chi = (kappa/4) * (dGamma_phi/dP) / (dDelta_f_q/dP)
/// c   = (dDelta_f_q/dP) / (2 chi)          [photons per mW]
/// ```
///
/// Both slopes are in Hz per milliwatt of generator power.
pub fn dispersive_shift_calibration(
    slope_gamma_phi_per_mw: f64,
    slope_delta_fq_per_mw: f64,
    kappa_hz: f64,
) -> Result<(f64, f64)> {
    if !(slope_gamma_phi_per_mw.is_finite() && slope_delta_fq_per_mw.is_finite()) {
        return Err(Error::Domain("slopes must be finite".into()));
    }
    if !(kappa_hz.is_finite() && kappa_hz > 0.0) {
        return Err(Error::Domain(format!(
            "kappa must be positive, got {kappa_hz:e}"
        )));
    }
    if slope_delta_fq_per_mw == 0.0 {
        return Err(Error::Domain(
            "frequency-shift slope is zero; dispersive shift undefined".into(),
        ));
    }
    let chi = 0.25 * kappa_hz * slope_gamma_phi_per_mw / slope_delta_fq_per_mw;
    if chi == 0.0 {
        return Err(Error::Domain(
            "dephasing slope is zero; conversion factor undefined".into(),
        ));
    }
    let c = slope_delta_fq_per_mw / (2.0 * chi);
    Ok((chi, c))
}

/// Measurement-induced dephasing rate `Gamma_phi = 8 chi^2 n / kappa` (Hz).
pub fn measurement_dephasing(chi_hz: f64, n_photons: f64, kappa_hz: f64) -> Result<f64> {
    if !(kappa_hz.is_finite() && kappa_hz > 0.0) {
        return Err(Error::Domain(format!(
            "kappa must be positive, got {kappa_hz:e}"
        )));
    }
    if !(chi_hz.is_finite() && n_photons.is_finite() && n_photons >= 0.0) {
        return Err(Error::Domain(
            "chi must be finite and the photon number non-negative".into(),
        ));
    }
    Ok(8.0 * chi_hz * chi_hz * n_photons / kappa_hz)
}

/// Power leaking out of a cavity holding `n` photons, in dBm:
///
/// ```text
/// P = 2 pi * kappa_hz * h * f_r * n    (watts)
/// ```
///
/// The explicit `2 pi` matters: `kappa_hz` is a FWHM linewidth in ordinary
/// Hz, while the energy decay rate in `P = kappa_angular h f_r n` is
/// angular. With kappa = 11.34 MHz, f_r = 5.862 GHz and n = 0.0565 this
/// gives -138.1 dBm; dropping the 2 pi would be 8 dB off.
pub fn cavity_output_power(kappa_hz: f64, f_r_hz: f64, n_photons: f64) -> Result<f64> {
    for (label, v) in [
        ("kappa", kappa_hz),
        ("resonator frequency", f_r_hz),
        ("photon number", n_photons),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::Domain(format!("{label} must be >= 0, got {v:e}")));
        }
    }
    let watts = 2.0 * std::f64::consts::PI * kappa_hz * PLANCK * f_r_hz * n_photons;
    Ok(watts_to_dbm(watts))
}

/// Total linewidth from the resonance frequency and loaded quality factor:
/// `kappa = f_r / Q`.
pub fn kappa_from_fwhm(f_r_hz: f64, q_total: f64) -> Result<f64> {
    if !(f_r_hz.is_finite() && f_r_hz > 0.0) {
        return Err(Error::Domain(format!(
            "resonator frequency must be positive, got {f_r_hz:e}"
        )));
    }
    if !(q_total.is_finite() && q_total > 0.0) {
        return Err(Error::Domain(format!(
            "quality factor must be positive, got {q_total:e}"
        )));
    }
    Ok(f_r_hz / q_total)
}

/// Transmon frequency in the transmon-limit approximation, with a validity
/// marker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmonFrequency {
    /// `f_q = sqrt(8 E_C E_J) - E_C`, all quantities as frequencies (Hz).
    pub f_q_hz: f64,
    /// The ratio governing the approximation.
    pub ej_over_ec: f64,
    /// False when `E_J/E_C < 10`, where the asymptotic formula loses
    /// accuracy; the value is still returned.
    pub within_validity: bool,
}

/// Transmon qubit frequency `sqrt(8 E_C E_J) - E_C` (energies as Hz).
///
/// For `E_J/E_C < 10` the result carries `within_validity = false` instead
/// of an error: the number is still the formula's output, just outside the
/// regime where it approximates the real spectrum well.
pub fn transmon_frequency(ej_hz: f64, ec_hz: f64) -> Result<TransmonFrequency> {
    if !(ej_hz.is_finite() && ej_hz > 0.0 && ec_hz.is_finite() && ec_hz > 0.0) {
        return Err(Error::Domain(format!(
            "E_J and E_C must be positive, got {ej_hz:e}, {ec_hz:e}"
        )));
    }
    let ratio = ej_hz / ec_hz;
    Ok(TransmonFrequency {
        f_q_hz: (8.0 * ec_hz * ej_hz).sqrt() - ec_hz,
        ej_over_ec: ratio,
        within_validity: ratio >= 10.0,
    })
}
