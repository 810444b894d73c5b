//! Canonical parameter sets for the reference device, used by the examples,
//! the CLI defaults and the test suite.
//!
//! These encode one self-consistent gate-tunable kinetic-inductance amplifier:
//! a 45.8-ohm quarter-wave line shorted by a 0.79 nH nanowire (fundamental
//! near 6.3 GHz), strongly overcoupled to 128 MHz with a -20 kHz/photon Kerr
//! coefficient, gate-tunable over 15 MHz across a -3 V..+7 V window, and
//! softening by 170 MHz under a 0.5 T in-plane field.

use crate::calibration::{AmplifierChain, Stage, TransmonCalibration};
use crate::circuit::{FieldMap, GateMap, LoadedResonator};
use crate::kerr::KerrMode;

/// Reference nanowire-loaded quarter-wave resonator.
pub fn nanowire_resonator() -> LoadedResonator {
    LoadedResonator {
        c_line_total: 511e-15,
        l_line_total: 1.07e-9,
        c_coupling: 55e-15,
        l_nanowire_zero: 0.79e-9,
        port_impedance: 50.0,
    }
}

/// Reference gate tuning map: 15 MHz of total shift across -3 V to +7 V.
pub fn gate_map() -> GateMap {
    GateMap::new(-3.0, 7.0, 15e6).expect("built-in gate map must validate")
}

/// Reference in-plane-field map, calibrated to a -170 MHz shift at 0.5 T.
pub fn field_map() -> FieldMap {
    FieldMap::calibrated(&nanowire_resonator(), 0.5, -170e6)
        .expect("built-in field map must calibrate")
}

/// Reference pumped amplifier mode: strongly overcoupled, weakly lossy,
/// negative Kerr.
pub fn amplifier_mode() -> KerrMode {
    KerrMode {
        f0: 6.4e9,
        kappa_c: 128e6,
        kappa_i: 1.6e6,
        kerr: -20e3,
    }
}

/// Input (probe) line of the reference cryostat: five lossy segments
/// totalling -99.0 dB between the room-temperature generator and the
/// device port.
pub fn probe_line_chain() -> AmplifierChain {
    AmplifierChain::new(vec![
        Stage::attenuator("fixed attenuators", -50.0, 0.02),
        Stage::attenuator("input coax", -40.0, 77.0),
        Stage::attenuator("directional coupler", -3.3, 0.02),
        Stage::attenuator("circulator", -3.2, 0.02),
        Stage::attenuator("device cable", -2.5, 4.0),
    ])
    .expect("built-in probe chain must validate")
}

/// Pump delivery and readout chain: a -78.9 dB pump line into the device,
/// followed by the cryogenic HEMT and a room-temperature post-amplifier
/// whose input compresses at -42 dBm.
pub fn pump_line_chain() -> AmplifierChain {
    AmplifierChain::new(vec![
        Stage::attenuator("pump line", -78.9, 0.02),
        Stage::amplifier("cryo hemt", 40.0, 2.2).with_p1db(-48.0),
        Stage::amplifier("room amplifier", 40.0, 100.0).with_p1db(-42.0),
    ])
    .expect("built-in pump chain must validate")
}

/// Transmon-derived photon-number calibration of the readout resonator.
pub fn transmon_calibration() -> TransmonCalibration {
    TransmonCalibration {
        kappa_hz: 11.34e6,
        chi_hz: 1.33e6,
        c_photons_per_mw: 5.65,
        f_r_hz: 5.862e9,
    }
}
