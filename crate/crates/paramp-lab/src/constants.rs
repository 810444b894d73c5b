//! Physical constants (SI, CODATA exact values) and unit helpers.
//!
//! Conventions used throughout the crate:
//! - every rate, linewidth, detuning and Kerr coefficient is an ordinary
//!   frequency in Hz (cycles per second), never an angular frequency;
//! - powers are in watts internally, with dBm only at the interfaces;
//! - photon fluxes are photons per second.

/// Planck constant [J s]
pub const PLANCK: f64 = 6.62607015e-34;

/// Boltzmann constant [J/K]
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Elementary charge [C]
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;

/// Magnetic flux quantum Phi_0 = h / (2 e) [Wb]
pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);

/// Convert a power in watts to dBm. Zero or negative power maps to -inf.
pub fn watts_to_dbm(p_watts: f64) -> f64 {
    if p_watts <= 0.0 {
        return f64::NEG_INFINITY;
    }
    10.0 * (p_watts / 1e-3).log10()
}

/// Convert a power in dBm to watts.
pub fn dbm_to_watts(p_dbm: f64) -> f64 {
    1e-3 * 10f64.powf(p_dbm / 10.0)
}

/// Convert a power ratio in dB to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Convert a linear power ratio to dB. Zero or negative maps to -inf.
pub fn linear_to_db(ratio: f64) -> f64 {
    if ratio <= 0.0 {
        return f64::NEG_INFINITY;
    }
    10.0 * ratio.log10()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flux_quantum_value() {
        // h/(2e) = 2.067833848...e-15 Wb
        assert!(
            (FLUX_QUANTUM - 2.067833848e-15).abs() < 1e-24,
            "flux quantum {FLUX_QUANTUM:e} off from 2.067833848e-15"
        );
    }

    #[test]
    fn dbm_round_trip() {
        for &dbm in &[-138.0, -80.1, -20.0, 0.0, 7.5] {
            let back = watts_to_dbm(dbm_to_watts(dbm));
            assert!((back - dbm).abs() < 1e-12, "round trip {dbm} -> {back}");
        }
        assert_eq!(watts_to_dbm(1e-3), 0.0);
        assert!(watts_to_dbm(0.0).is_infinite());
    }

    #[test]
    fn db_linear_round_trip() {
        assert!((db_to_linear(20.0) - 100.0).abs() < 1e-12);
        assert!((linear_to_db(100.0) - 20.0).abs() < 1e-12);
        assert!(linear_to_db(0.0).is_infinite());
    }
}
