//! Kerr (Duffing) dynamics of the pumped nonlinear mode.
//!
//! # Conventions
//!
//! All rates are ordinary frequencies in Hz: the total linewidth
//! `kappa = kappa_c + kappa_i` is the FWHM of the linear response, detunings
//! are `delta = f_pump - f0`, and the Kerr coefficient `K` is in Hz per
//! photon. The stiff-pump steady state obeys the cubic
//!
//! ```text
//! n * [ (delta + K n)^2 + (kappa/2)^2 ] = kappa_c * Phi_in
//! ```
//!
//! with `Phi_in = P / (h f_pump)` the drive photon flux. Starting from the
//! rotating-frame Langevin equation in angular units and dividing through by
//! `(2 pi)^2`, every squared rate becomes an ordinary frequency and the drive
//! term becomes `kappa_c * Phi / (2 pi)`; the residual `2 pi` is absorbed
//! into the port flux normalization, which this crate applies identically at
//! every input and output port. Gains, bandwidths, thresholds and any other
//! ratio of rates are independent of that choice.
//!
//! With the sign convention of the cubic above, bistability requires
//! `delta * K < 0`; the default nanowire mode has `K < 0`, so the pump sits
//! at positive `delta`. The linearized fluctuation matrix around a steady
//! state has determinant (at zero offset)
//!
//! ```text
//! D = (delta + 2 K n)^2 + (kappa/2)^2 - (K n)^2
//! ```
//!
//! which equals the slope of the cubic's left-hand side in `n`. `D > 0` on
//! dynamically stable branches; on the middle branch of a bistable response
//! the slope is negative and the branch is unstable. Parametric gain diverges
//! as `D -> 0+`.

mod gain;
mod noise;

pub use gain::{
    compression_sweep, gain_profile, optimal_pump_search, signal_idler_gain, CompressionPoint,
    CompressionSweep, GainMetrics, GainProfile, OperatingPoint, SignalIdlerGain,
};
pub use noise::{quantum_limit_temperature, snr_improvement_asymptote_db, snr_improvement_db};

use serde::{Deserialize, Serialize};

use crate::constants::PLANCK;
use crate::error::{Error, Result};

/// A single Kerr-nonlinear mode of the loaded resonator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KerrMode {
    /// Resonance frequency at vanishing occupation [Hz].
    pub f0: f64,
    /// External (coupling) linewidth contribution, f0/Q_c [Hz].
    pub kappa_c: f64,
    /// Internal loss contribution, f0/Q_i [Hz].
    pub kappa_i: f64,
    /// Kerr coefficient [Hz per photon], signed as in the steady-state cubic;
    /// negative for the kinetic-inductance nanowire mode.
    pub kerr: f64,
}

impl KerrMode {
    pub fn new(f0: f64, kappa_c: f64, kappa_i: f64, kerr: f64) -> Result<Self> {
        let m = Self {
            f0,
            kappa_c,
            kappa_i,
            kerr,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f0.is_finite() && self.f0 > 0.0) {
            return Err(Error::Domain(format!("f0 must be positive, got {}", self.f0)));
        }
        if !(self.kappa_c.is_finite() && self.kappa_c > 0.0) {
            return Err(Error::Domain(format!(
                "kappa_c must be positive, got {}",
                self.kappa_c
            )));
        }
        if !(self.kappa_i.is_finite() && self.kappa_i >= 0.0) {
            return Err(Error::Domain(format!(
                "kappa_i must be non-negative, got {}",
                self.kappa_i
            )));
        }
        if !self.kerr.is_finite() {
            return Err(Error::Domain("kerr must be finite".into()));
        }
        Ok(())
    }

    /// Total linewidth kappa = kappa_c + kappa_i [Hz].
    pub fn kappa_total(&self) -> f64 {
        self.kappa_c + self.kappa_i
    }
}

/// One root of the steady-state cubic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PumpBranch {
    /// Intracavity pump photon number on this branch.
    pub n_photons: f64,
    /// Dynamical stability from the sign of the linearization determinant.
    pub stable: bool,
}

/// Steady-state response of the pumped mode at one drive point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PumpState {
    /// Pump frequency [Hz].
    pub f_pump: f64,
    /// Drive photon flux at the port [photons/s].
    pub photon_flux_in: f64,
    /// All physical roots, ascending in photon number (1 or 3 generically).
    pub branches: Vec<PumpBranch>,
}

impl PumpState {
    /// Index of the lowest-occupation stable branch, if any.
    pub fn lowest_stable(&self) -> Option<usize> {
        self.branches.iter().position(|b| b.stable)
    }
}

/// Solve the monic cubic x^3 + b x^2 + c x + d = 0, returning all real roots.
///
/// Trigonometric method in the three-real-root regime, Cardano otherwise;
/// callers are expected to polish the roots on their own residual.
fn monic_cubic_roots(b: f64, c: f64, d: f64) -> Vec<f64> {
    // Depressed form t^3 + p t + q with x = t - b/3.
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let shift = -b / 3.0;
    let disc = -4.0 * p * p * p - 27.0 * q * q;
    if disc > 0.0 {
        // Three distinct real roots (requires p < 0).
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() + shift)
            .collect()
    } else {
        // One real root; stable Cardano avoiding cancellation.
        let t = if p == 0.0 && q == 0.0 {
            0.0
        } else {
            let rad = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
            let a = -(q / 2.0) - q.signum() * rad;
            // a = -q/2 - sign(q)*rad has the larger magnitude of the two
            // Cardano terms; the companion follows from Vieta.
            let u = a.cbrt();
            if u == 0.0 {
                // q != 0 but both terms vanished: fall back to the sum form.
                (-q / 2.0 + rad).cbrt() + (-q / 2.0 - rad).cbrt()
            } else {
                u - p / (3.0 * u)
            }
        };
        vec![t + shift]
    }
}

/// Steady-state intracavity pump occupation(s) for a drive of `power` watts
/// at `f_pump`.
///
/// The cubic is solved in the dimensionless occupation `nu = n |K| / kappa`
/// so its coefficients stay O(1) regardless of how weak the nonlinearity is;
/// roots are polished by Newton steps on the original residual and classified
/// by the sign of the linearization determinant.
pub fn pump_steady_states(mode: &KerrMode, f_pump: f64, power: f64) -> Result<PumpState> {
    mode.validate()?;
    if !(f_pump.is_finite() && f_pump > 0.0) {
        return Err(Error::Domain(format!(
            "f_pump must be positive, got {f_pump:e}"
        )));
    }
    if !(power.is_finite() && power >= 0.0) {
        return Err(Error::Domain(format!(
            "pump power must be non-negative, got {power:e}"
        )));
    }
    let flux = power / (PLANCK * f_pump);
    let kappa = mode.kappa_total();
    let delta = f_pump - mode.f0;
    let drive = mode.kappa_c * flux; // right-hand side of the cubic [Hz^3]

    if power == 0.0 {
        return Ok(PumpState {
            f_pump,
            photon_flux_in: 0.0,
            branches: vec![PumpBranch {
                n_photons: 0.0,
                stable: true,
            }],
        });
    }

    let branches = if mode.kerr == 0.0 {
        // Linear mode: plain Lorentzian response, always stable.
        let n = drive / (delta * delta + 0.25 * kappa * kappa);
        vec![PumpBranch {
            n_photons: n,
            stable: true,
        }]
    } else {
        // Dimensionless cubic: nu^3 + 2 s dh nu^2 + (dh^2 + 1/4) nu - phi = 0
        // with nu = n |K| / kappa, dh = delta / kappa, s = sign(K),
        // phi = kappa_c Phi |K| / kappa^3.
        let s = mode.kerr.signum();
        let dh = delta / kappa;
        let phi = drive * mode.kerr.abs() / (kappa * kappa * kappa);
        let b = 2.0 * s * dh;
        let c = dh * dh + 0.25;
        let residual = |nu: f64| nu * nu * nu + b * nu * nu + c * nu - phi;
        let dresidual = |nu: f64| 3.0 * nu * nu + 2.0 * b * nu + c;

        let mut roots: Vec<f64> = monic_cubic_roots(b, c, -phi)
            .into_iter()
            .filter(|&nu| nu.is_finite() && nu > 0.0)
            .collect();
        // Newton polish on the well-scaled residual.
        for nu in roots.iter_mut() {
            for _ in 0..6 {
                let r = residual(*nu);
                let dr = dresidual(*nu);
                if dr == 0.0 {
                    break;
                }
                let step = r / dr;
                *nu -= step;
                if step.abs() <= 1e-16 * nu.abs() {
                    break;
                }
            }
        }
        roots.sort_by(|a, v| a.partial_cmp(v).unwrap());
        roots.dedup_by(|a, v| (*a - *v).abs() <= 1e-9 * a.abs().max(v.abs()));
        // Verify each polished root against the cubic.
        let scale = phi.max(c * roots.last().copied().unwrap_or(1.0)).max(1e-300);
        for &nu in &roots {
            let rel = residual(nu).abs() / scale;
            if rel > 1e-10 {
                return Err(Error::Bracketing {
                    context: format!("steady-state cubic residual {rel:e} too large"),
                    lo: 0.0,
                    hi: nu,
                });
            }
        }
        roots
            .into_iter()
            .map(|nu| PumpBranch {
                n_photons: nu * kappa / mode.kerr.abs(),
                stable: dresidual(nu) > 0.0,
            })
            .collect()
    };

    Ok(PumpState {
        f_pump,
        photon_flux_in: flux,
        branches,
    })
}

/// Onset of pump bistability for a Kerr mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BistabilityThreshold {
    /// Critical intracavity photon number, kappa / (sqrt(3) |K|).
    pub n_crit: f64,
    /// Critical pump detuning from f0, -sign(K) sqrt(3) kappa / 2 [Hz].
    pub delta_crit: f64,
    /// Port power that drives the mode exactly to the cusp [W].
    pub critical_power_watts: f64,
}

/// Closed-form bistability threshold. Fails with a no-threshold error for a
/// linear (K = 0) mode.
pub fn bistability_threshold(mode: &KerrMode) -> Result<BistabilityThreshold> {
    mode.validate()?;
    if mode.kerr == 0.0 {
        return Err(Error::NoThreshold);
    }
    let kappa = mode.kappa_total();
    let n_crit = kappa / (3f64.sqrt() * mode.kerr.abs());
    let delta_crit = -mode.kerr.signum() * 3f64.sqrt() * kappa / 2.0;
    // Drive at the cusp: kappa_c Phi = n_crit kappa^2 / 3.
    let flux = n_crit * kappa * kappa / (3.0 * mode.kappa_c);
    let f_pump = mode.f0 + delta_crit;
    Ok(BistabilityThreshold {
        n_crit,
        delta_crit,
        critical_power_watts: flux * PLANCK * f_pump,
    })
}
