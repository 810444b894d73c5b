//! Linearized signal/idler gain, gain profiles, operating-point search and
//! the stiff-pump-breakdown compression model.
//!
//! Fluctuations around a pump steady state obey a 2x2 linear system in the
//! `(d, d-dagger)` basis. At signal offset `omega = f_signal - f_pump`:
//!
//! ```text
//! M = [ kappa/2 - i (dt + omega)      -i mu              ]
//!     [ +i mu                          kappa/2 + i (dt - omega) ]
//! ```
//!
//! with effective detuning `dt = delta + 2 K n_pump` and parametric coupling
//! `mu = K n_pump` (pump phase chosen real). Input-output gives the signal
//! reflection `g_s = 1 - kappa_c (M^-1)_00` and the idler conversion
//! `g_i = -kappa_c (M^-1)_01`. For a lossless mode these satisfy the
//! phase-preserving amplifier condition `|g_s|^2 - |g_i|^2 = 1` identically.

use num_complex::Complex64;
use serde::Serialize;

use crate::constants::PLANCK;
use crate::error::{Error, Result};
use crate::kerr::{pump_steady_states, KerrMode, PumpState};

/// Signal and idler amplitude gains at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalIdlerGain {
    /// Amplitude gain of the reported signal at `f_signal`.
    pub g_signal: Complex64,
    /// Amplitude conversion onto the idler at `2 f_pump - f_signal`.
    pub g_idler: Complex64,
}

/// First row of `M^-1` for the linearization at (`delta_tilde`, `mu`, `omega`).
fn inverse_row(
    kappa: f64,
    delta_tilde: f64,
    mu: f64,
    omega: f64,
) -> (Complex64, Complex64) {
    let m00 = Complex64::new(0.5 * kappa, -(delta_tilde + omega));
    let m11 = Complex64::new(0.5 * kappa, delta_tilde - omega);
    let det = m00 * m11 - Complex64::new(mu * mu, 0.0);
    (m11 / det, Complex64::new(0.0, mu) / det)
}

fn gains_at(mode: &KerrMode, delta_tilde: f64, mu: f64, omega: f64) -> SignalIdlerGain {
    let (inv00, inv01) = inverse_row(mode.kappa_total(), delta_tilde, mu, omega);
    SignalIdlerGain {
        g_signal: Complex64::new(1.0, 0.0) - mode.kappa_c * inv00,
        g_idler: -mode.kappa_c * inv01,
    }
}

/// Linearized signal/idler gain on a stable pump branch.
///
/// Evaluating on an unstable branch is a contract violation: the linearization
/// has a growing eigenmode there and no stationary gain exists.
pub fn signal_idler_gain(
    mode: &KerrMode,
    pump: &PumpState,
    branch: usize,
    f_signal: f64,
) -> Result<SignalIdlerGain> {
    mode.validate()?;
    let br = pump.branches.get(branch).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "branch {branch} out of range ({} branches)",
            pump.branches.len()
        ))
    })?;
    if !br.stable {
        return Err(Error::UnstableBranch { branch });
    }
    let n = br.n_photons;
    let delta = pump.f_pump - mode.f0;
    let delta_tilde = delta + 2.0 * mode.kerr * n;
    let mu = mode.kerr * n;
    Ok(gains_at(mode, delta_tilde, mu, f_signal - pump.f_pump))
}

/// Scalar figures extracted from a sampled gain profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GainMetrics {
    /// Peak signal power gain over the grid [dB].
    pub peak_gain_db: f64,
    /// Frequency of the peak sample [Hz].
    pub peak_freq_hz: f64,
    /// FWHM of the excess gain |g_s|^2 - 1 around the peak [Hz], if both
    /// half-maximum crossings lie inside the grid.
    pub fwhm_hz: Option<f64>,
    /// Gain-bandwidth product sqrt(G0,linear) * fwhm [Hz].
    pub gain_bandwidth_hz: Option<f64>,
    /// The peak sits on the first or last grid point; metrics unreliable.
    pub peak_on_boundary: bool,
    /// The pump branch carries zero photons; the profile is linear response.
    pub degenerate_pump: bool,
}

/// Signal/idler gain sampled on a uniform frequency grid, with metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct GainProfile {
    pub freq_hz: Vec<f64>,
    pub g_signal: Vec<Complex64>,
    pub g_idler: Vec<Complex64>,
    pub metrics: GainMetrics,
}

impl GainProfile {
    /// Signal power gain in dB at grid index `i`.
    pub fn gain_db(&self, i: usize) -> f64 {
        10.0 * self.g_signal[i].norm_sqr().log10()
    }
}

/// Sample the linearized gain on `[f_lo, f_hi]` and extract peak, FWHM and
/// gain-bandwidth product.
pub fn gain_profile(
    mode: &KerrMode,
    pump: &PumpState,
    branch: usize,
    f_lo: f64,
    f_hi: f64,
    n_points: usize,
) -> Result<GainProfile> {
    if !(f_lo.is_finite() && f_hi.is_finite() && f_lo < f_hi) {
        return Err(Error::InvalidArgument(format!(
            "need f_lo < f_hi, got [{f_lo:e}, {f_hi:e}]"
        )));
    }
    if n_points < 3 {
        return Err(Error::InvalidArgument(format!(
            "need at least 3 grid points, got {n_points}"
        )));
    }
    let step = (f_hi - f_lo) / (n_points - 1) as f64;
    let mut freq = Vec::with_capacity(n_points);
    let mut gs = Vec::with_capacity(n_points);
    let mut gi = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let f = f_lo + i as f64 * step;
        let g = signal_idler_gain(mode, pump, branch, f)?;
        freq.push(f);
        gs.push(g.g_signal);
        gi.push(g.g_idler);
    }

    let power: Vec<f64> = gs.iter().map(|g| g.norm_sqr()).collect();
    let (peak_idx, &peak_lin) = power
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    let peak_on_boundary = peak_idx == 0 || peak_idx == n_points - 1;

    // FWHM of the excess gain, linearly interpolated at the crossings.
    let half = 0.5 * (peak_lin - 1.0);
    let fwhm = if half > 0.0 && !peak_on_boundary {
        let cross = |range: &mut dyn Iterator<Item = usize>| -> Option<f64> {
            let mut prev = peak_idx;
            for i in range {
                let (ei, ep) = (power[i] - 1.0, power[prev] - 1.0);
                if ei <= half {
                    let t = (ep - half) / (ep - ei);
                    return Some(freq[prev] + t * (freq[i] - freq[prev]));
                }
                prev = i;
            }
            None
        };
        let left = cross(&mut (0..peak_idx).rev());
        let right = cross(&mut (peak_idx + 1..n_points));
        match (left, right) {
            (Some(l), Some(r)) => Some(r - l),
            _ => None,
        }
    } else {
        None
    };

    let metrics = GainMetrics {
        peak_gain_db: 10.0 * peak_lin.log10(),
        peak_freq_hz: freq[peak_idx],
        fwhm_hz: fwhm,
        gain_bandwidth_hz: fwhm.map(|w| peak_lin.sqrt() * w),
        peak_on_boundary,
        degenerate_pump: pump.branches[branch].n_photons == 0.0,
    };
    Ok(GainProfile {
        freq_hz: freq,
        g_signal: gs,
        g_idler: gi,
        metrics,
    })
}

/// A pump drive condition selected for amplifier operation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatingPoint {
    /// Pump frequency [Hz].
    pub f_pump: f64,
    /// Pump power at the amplifier port [W].
    pub pump_power_watts: f64,
    /// Peak small-signal gain realized at this point [dB].
    pub achieved_gain_db: f64,
    /// Index of the operating branch in the corresponding [`PumpState`].
    pub branch: usize,
    /// Intracavity pump photon number on that branch.
    pub n_pump: f64,
    /// Default signal placement above the pump for compression sweeps [Hz].
    pub signal_offset_hz: f64,
}

/// Zero-offset gain in dB for an occupation `n` at detuning `delta`.
fn zero_offset_gain_db(mode: &KerrMode, delta: f64, n: f64) -> f64 {
    let g = gains_at(
        mode,
        delta + 2.0 * mode.kerr * n,
        mode.kerr * n,
        0.0,
    );
    10.0 * g.g_signal.norm_sqr().log10()
}

/// Largest lower-branch occupation to consider at detuning `delta`: just
/// below the fold when bistable, at the gain maximum otherwise.
fn occupation_cap(mode: &KerrMode, delta: f64) -> f64 {
    let kappa = mode.kappa_total();
    let k_abs = mode.kerr.abs();
    let disc = delta * delta - 0.75 * kappa * kappa;
    if disc > 0.0 {
        (2.0 * delta.abs() - disc.sqrt()) / (3.0 * k_abs) * (1.0 - 1e-9)
    } else {
        2.0 * delta.abs() / (3.0 * k_abs)
    }
}

/// Port power that sustains occupation `n` at detuning `delta` [W].
fn power_for_occupation(mode: &KerrMode, delta: f64, n: f64) -> f64 {
    let kappa = mode.kappa_total();
    let flux = n * ((delta + mode.kerr * n).powi(2) + 0.25 * kappa * kappa) / mode.kappa_c;
    flux * PLANCK * (mode.f0 + delta)
}

/// Grid-plus-refinement search for the lowest-power pump achieving a target
/// peak gain.
///
/// Detuning is scanned on the amplifying side (`delta * K < 0`) in units of
/// the total linewidth: a coarse grid `0.30..=1.50` in steps of `0.05`, then
/// two local refinements (step 0.01, then 0.002) around the best candidate.
/// At each detuning the lower-branch occupation is bisected against the
/// zero-offset gain, which is monotone up to the fold. The returned point is
/// verified on a full sampled profile.
pub fn optimal_pump_search(mode: &KerrMode, target_gain_db: f64) -> Result<OperatingPoint> {
    mode.validate()?;
    if !target_gain_db.is_finite() || !(0.0..40.0).contains(&target_gain_db) {
        return Err(Error::InvalidArgument(format!(
            "target gain must lie in [0, 40) dB, got {target_gain_db}"
        )));
    }
    if target_gain_db <= 1e-9 {
        // Trivial target: the undriven mode already reflects with 0 dB.
        return Ok(OperatingPoint {
            f_pump: mode.f0,
            pump_power_watts: 0.0,
            achieved_gain_db: 0.0,
            branch: 0,
            n_pump: 0.0,
            signal_offset_hz: 0.5e6,
        });
    }
    if mode.kerr == 0.0 {
        return Err(Error::SearchFailed(
            "mode has zero Kerr coefficient: no parametric gain at any pump".into(),
        ));
    }
    let kappa = mode.kappa_total();
    let side = -mode.kerr.signum();

    let candidate_at = |x: f64| -> Option<(f64, f64, f64)> {
        // x is |delta| / kappa; returns (delta, n, power).
        let delta = side * x * kappa;
        let cap = occupation_cap(mode, delta);
        if zero_offset_gain_db(mode, delta, cap) < target_gain_db {
            return None;
        }
        let (mut lo, mut hi) = (0.0, cap);
        for _ in 0..70 {
            let mid = 0.5 * (lo + hi);
            if zero_offset_gain_db(mode, delta, mid) < target_gain_db {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let n = 0.5 * (lo + hi);
        Some((delta, n, power_for_occupation(mode, delta, n)))
    };

    let mut best: Option<(f64, f64, f64, f64)> = None; // (x, delta, n, power)
    let scan = |xs: &[f64], best: &mut Option<(f64, f64, f64, f64)>| {
        for &x in xs {
            if x < 0.05 || x > 3.0 {
                continue;
            }
            if let Some((delta, n, p)) = candidate_at(x) {
                if best.map_or(true, |b| p < b.3) {
                    *best = Some((x, delta, n, p));
                }
            }
        }
    };

    let coarse: Vec<f64> = (0..=24).map(|j| 0.30 + 0.05 * j as f64).collect();
    scan(&coarse, &mut best);
    if let Some((x0, ..)) = best {
        let fine: Vec<f64> = (0..=8).map(|j| x0 - 0.04 + 0.01 * j as f64).collect();
        scan(&fine, &mut best);
    }
    if let Some((x0, ..)) = best {
        let finer: Vec<f64> = (0..=8).map(|j| x0 - 0.008 + 0.002 * j as f64).collect();
        scan(&finer, &mut best);
    }

    let (_, delta, _n, power) = best.ok_or_else(|| {
        Error::SearchFailed(format!(
            "target {target_gain_db} dB not reached on detuning grid 0.05..3.0 linewidths \
             (side {side:+}), powers up to the fold"
        ))
    })?;

    let f_pump = mode.f0 + delta;
    let state = pump_steady_states(mode, f_pump, power)?;
    let branch = state
        .lowest_stable()
        .ok_or_else(|| Error::SearchFailed("no stable branch at selected point".into()))?;
    let profile = gain_profile(mode, &state, branch, f_pump - 2.0 * kappa, f_pump + 2.0 * kappa, 1601)?;
    let achieved = profile.metrics.peak_gain_db;
    if (achieved - target_gain_db).abs() > 0.5 {
        return Err(Error::SearchFailed(format!(
            "profile peak {achieved:.2} dB missed target {target_gain_db:.2} dB by more than 0.5 dB"
        )));
    }
    Ok(OperatingPoint {
        f_pump,
        pump_power_watts: power,
        achieved_gain_db: achieved,
        branch,
        n_pump: state.branches[branch].n_photons,
        signal_offset_hz: 0.5e6,
    })
}

/// One point of a signal-power sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompressionPoint {
    /// Signal power at the amplifier port [W].
    pub p_signal_watts: f64,
    /// Signal gain at the self-consistent operating state [dB].
    pub gain_db: f64,
    /// Pump occupation at the fixed point.
    pub n_pump: f64,
    /// Signal occupation at the fixed point.
    pub n_signal: f64,
}

/// Gain-versus-signal-power sweep with the extracted 1 dB compression point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompressionSweep {
    /// Gain in the vanishing-signal limit [dB].
    pub small_signal_gain_db: f64,
    /// Signal frequency used for the sweep [Hz].
    pub f_signal: f64,
    pub points: Vec<CompressionPoint>,
    /// Input-referred 1 dB compression power [W], interpolated in log power;
    /// absent when the sweep never crosses 1 dB below the small-signal gain.
    pub p1db_input_watts: Option<f64>,
}

/// Self-consistent (n_pump, n_signal) state under the shared-Kerr-shift model.
///
/// The signal's own photons detune the pump cubic through `K * n_signal`, and
/// the linearization around the shifted pump uses the total occupation in the
/// effective detuning while the parametric coupling stays `K * n_pump`. This
/// is the minimal stiff-pump-breakdown mechanism: a strong signal walks the
/// pump off its operating point and the gain collapses.
fn compression_fixed_point(
    mode: &KerrMode,
    delta_pump: f64,
    flux_pump: f64,
    omega_signal: f64,
    flux_signal: f64,
    n_pump_init: f64,
) -> Result<(f64, f64, SignalIdlerGain)> {
    let kappa = mode.kappa_total();
    let mut n_p = n_pump_init;
    let mut n_s = 0.0;
    let mut converged = false;
    for _ in 0..200 {
        // Pump cubic with the signal's shared Kerr shift folded into the
        // detuning seen by the pump.
        let delta_eff = delta_pump + mode.kerr * n_s;
        let state = pump_steady_states(
            mode,
            mode.f0 + delta_eff,
            flux_pump * PLANCK * (mode.f0 + delta_eff),
        )?;
        let n_p_raw = state
            .branches
            .iter()
            .map(|b| b.n_photons)
            .min_by(|a, b| {
                (a - n_p).abs().partial_cmp(&(b - n_p).abs()).unwrap()
            })
            .unwrap();
        let delta_tilde = delta_pump + 2.0 * mode.kerr * (n_p + n_s);
        let mu = mode.kerr * n_p;
        let (inv00, inv01) = inverse_row(kappa, delta_tilde, mu, omega_signal);
        let n_s_raw = mode.kappa_c * flux_signal * (inv00.norm_sqr() + inv01.norm_sqr());

        let (next_p, next_s) = (n_p + 0.5 * (n_p_raw - n_p), n_s + 0.5 * (n_s_raw - n_s));
        let settled = (next_p - n_p).abs() <= 1e-8 * next_p.abs().max(1.0)
            && (next_s - n_s).abs() <= 1e-8 * next_s.abs().max(1.0);
        n_p = next_p;
        n_s = next_s;
        if settled {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::FixedPoint {
            iterations: 200,
            n_pump: n_p,
            n_signal: n_s,
        });
    }
    let delta_tilde = delta_pump + 2.0 * mode.kerr * (n_p + n_s);
    let gain = gains_at(mode, delta_tilde, mode.kerr * n_p, omega_signal);
    if !gain.g_signal.norm_sqr().is_finite() {
        return Err(Error::FixedPoint {
            iterations: 200,
            n_pump: n_p,
            n_signal: n_s,
        });
    }
    Ok((n_p, n_s, gain))
}

/// Sweep signal power at a fixed pump operating point and locate the input
/// 1 dB compression point.
///
/// `signal_powers` must be strictly ascending port powers in watts.
pub fn compression_sweep(
    mode: &KerrMode,
    op: &OperatingPoint,
    signal_powers: &[f64],
) -> Result<CompressionSweep> {
    mode.validate()?;
    if signal_powers.is_empty() {
        return Err(Error::InvalidArgument("empty signal power sweep".into()));
    }
    if signal_powers
        .windows(2)
        .any(|w| !(w[1] > w[0]) || !w[0].is_finite())
        || signal_powers[0] <= 0.0
    {
        return Err(Error::InvalidArgument(
            "signal powers must be positive, finite and strictly ascending".into(),
        ));
    }
    let delta_pump = op.f_pump - mode.f0;
    let flux_pump = op.pump_power_watts / (PLANCK * op.f_pump);
    let f_signal = op.f_pump + op.signal_offset_hz;
    let omega = op.signal_offset_hz;

    let (_, _, g0) =
        compression_fixed_point(mode, delta_pump, flux_pump, omega, 0.0, op.n_pump)?;
    let small_signal_gain_db = 10.0 * g0.g_signal.norm_sqr().log10();

    let mut points = Vec::with_capacity(signal_powers.len());
    let mut n_p_seed = op.n_pump;
    for &p_s in signal_powers {
        let flux_s = p_s / (PLANCK * f_signal);
        let (n_p, n_s, g) =
            compression_fixed_point(mode, delta_pump, flux_pump, omega, flux_s, n_p_seed)?;
        n_p_seed = n_p;
        points.push(CompressionPoint {
            p_signal_watts: p_s,
            gain_db: 10.0 * g.g_signal.norm_sqr().log10(),
            n_pump: n_p,
            n_signal: n_s,
        });
    }

    // Input-referred 1 dB compression: first crossing below G0 - 1 after the
    // sweep maximum, interpolated in log power.
    let threshold = small_signal_gain_db - 1.0;
    let i_max = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.gain_db.partial_cmp(&b.1.gain_db).unwrap())
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut p1db = None;
    for i in i_max..points.len() {
        if points[i].gain_db <= threshold {
            if i == 0 {
                break; // already compressed at the lowest swept power
            }
            let (a, b) = (&points[i - 1], &points[i]);
            let t = (a.gain_db - threshold) / (a.gain_db - b.gain_db);
            let logp = a.p_signal_watts.log10()
                + t * (b.p_signal_watts.log10() - a.p_signal_watts.log10());
            p1db = Some(10f64.powf(logp));
            break;
        }
    }

    Ok(CompressionSweep {
        small_signal_gain_db,
        f_signal,
        points,
        p1db_input_watts: p1db,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::watts_to_dbm;
    use crate::kerr::bistability_threshold;
    use crate::presets;

    fn mode() -> KerrMode {
        presets::amplifier_mode()
    }

    #[test]
    fn undriven_lossless_mode_is_all_pass() {
        let m = KerrMode::new(6.4e9, 128e6, 0.0, -20e3).unwrap();
        let st = pump_steady_states(&m, m.f0 + 50e6, 0.0).unwrap();
        for df in [-200e6, -30e6, 0.0, 17e6, 250e6] {
            let g = signal_idler_gain(&m, &st, 0, m.f0 + df).unwrap();
            assert!(
                (g.g_signal.norm() - 1.0).abs() < 1e-12,
                "|g_s| = {} at offset {df:e}",
                g.g_signal.norm()
            );
            assert_eq!(g.g_idler.norm(), 0.0);
        }
    }

    #[test]
    fn undriven_lossy_mode_dips_at_resonance() {
        let m = mode();
        let st = pump_steady_states(&m, m.f0 + 50e6, 0.0).unwrap();
        let at = |f: f64| {
            signal_idler_gain(&m, &st, 0, f)
                .unwrap()
                .g_signal
                .norm()
        };
        let on_res = at(m.f0);
        let expected = (m.kappa_i - m.kappa_c).abs() / m.kappa_total();
        assert!(
            (on_res - expected).abs() < 1e-12,
            "on-resonance |g_s| {on_res} vs {expected}"
        );
        // The dip is the global minimum: no frequency reflects less.
        for df in [-300e6, -100e6, -10e6, 10e6, 100e6, 300e6] {
            assert!(at(m.f0 + df) > on_res, "dip not minimal at offset {df:e}");
        }
        assert!(on_res < 1.0, "lossy reflection must dip below unity");
    }

    #[test]
    fn closed_form_oracle_matches_matrix_inverse() {
        // Independent algebra: fully expanded scalar expressions for g_s, g_i.
        let m = mode();
        let thr = bistability_threshold(&m).unwrap();
        let f_pump = m.f0 + 1.0 * thr.delta_crit;
        let st = pump_steady_states(&m, f_pump, 0.6 * thr.critical_power_watts).unwrap();
        let b = st.lowest_stable().unwrap();
        let n = st.branches[b].n_photons;
        let kappa = m.kappa_total();
        let dt = (f_pump - m.f0) + 2.0 * m.kerr * n;
        let mu = m.kerr * n;
        for df in [-90e6, -12e6, 0.0, 3e6, 41e6, 160e6] {
            let f_s = f_pump + df;
            let w = df;
            let det = Complex64::new(
                0.25 * kappa * kappa + dt * dt - w * w - mu * mu,
                -kappa * w,
            );
            let gs_closed = Complex64::new(1.0, 0.0)
                - m.kappa_c * Complex64::new(0.5 * kappa, dt - w) / det;
            let gi_closed = -m.kappa_c * Complex64::new(0.0, mu) / det;
            let g = signal_idler_gain(&m, &st, b, f_s).unwrap();
            assert!(
                (g.g_signal - gs_closed).norm() < 1e-12 * gs_closed.norm().max(1.0),
                "g_s mismatch at offset {df:e}"
            );
            assert!(
                (g.g_idler - gi_closed).norm() < 1e-12 * gi_closed.norm().max(1.0),
                "g_i mismatch at offset {df:e}"
            );
        }
    }

    #[test]
    fn lossless_gain_is_symplectic() {
        let m = KerrMode::new(6.4e9, 128e6, 0.0, -20e3).unwrap();
        let thr = bistability_threshold(&m).unwrap();
        let f_pump = m.f0 + 1.05 * thr.delta_crit;
        let st = pump_steady_states(&m, f_pump, 0.8 * thr.critical_power_watts).unwrap();
        let b = st.lowest_stable().unwrap();
        for df in [-150e6, -40e6, -1e6, 0.5e6, 12e6, 88e6] {
            let g = signal_idler_gain(&m, &st, b, f_pump + df).unwrap();
            let inv = g.g_signal.norm_sqr() - g.g_idler.norm_sqr();
            assert!(
                (inv - 1.0).abs() < 1e-9,
                "|g_s|^2 - |g_i|^2 = {inv} at offset {df:e}"
            );
        }
    }

    #[test]
    fn unstable_branch_is_rejected() {
        let m = mode();
        let thr = bistability_threshold(&m).unwrap();
        let f_pump = m.f0 + 1.3 * thr.delta_crit;
        let st = pump_steady_states(&m, f_pump, 1.52 * thr.critical_power_watts).unwrap();
        assert_eq!(st.branches.len(), 3);
        let e = signal_idler_gain(&m, &st, 1, m.f0).unwrap_err();
        assert!(matches!(e, Error::UnstableBranch { branch: 1 }), "got {e:?}");
    }

    #[test]
    fn profile_with_zero_pump_is_flagged_degenerate() {
        let m = KerrMode::new(6.4e9, 128e6, 0.0, -20e3).unwrap();
        let st = pump_steady_states(&m, m.f0 + 50e6, 0.0).unwrap();
        let p = gain_profile(&m, &st, 0, m.f0 - 300e6, m.f0 + 300e6, 401).unwrap();
        assert!(p.metrics.degenerate_pump);
        for i in 0..p.freq_hz.len() {
            assert!(p.gain_db(i).abs() < 1e-9, "lossless linear profile not flat");
        }
    }

    #[test]
    fn high_gain_attainable_near_threshold() {
        let m = mode();
        let op = optimal_pump_search(&m, 20.0).unwrap();
        assert!(
            (op.achieved_gain_db - 20.0).abs() <= 0.5,
            "achieved {:.2} dB",
            op.achieved_gain_db
        );
        assert!(op.pump_power_watts > 0.0 && op.n_pump > 0.0);
    }

    #[test]
    fn search_hits_zero_power_for_zero_target() {
        let op = optimal_pump_search(&mode(), 0.0).unwrap();
        assert_eq!(op.pump_power_watts, 0.0);
        assert_eq!(op.achieved_gain_db, 0.0);
    }

    #[test]
    fn search_rejects_linear_mode() {
        let mut m = mode();
        m.kerr = 0.0;
        assert!(matches!(
            optimal_pump_search(&m, 20.0),
            Err(Error::SearchFailed(_))
        ));
    }

    #[test]
    fn search_rejects_out_of_range_targets() {
        let m = mode();
        for bad in [40.0, 55.0, -1.0, f64::NAN] {
            assert!(matches!(
                optimal_pump_search(&m, bad),
                Err(Error::InvalidArgument(_))
            ));
        }
    }

    #[test]
    fn search_detuning_is_comparable_to_critical() {
        // The low-power high-gain operating points cluster around the
        // bistability wedge: |delta| within a factor ~2 of |delta_crit|.
        let m = mode();
        let thr = bistability_threshold(&m).unwrap();
        let op = optimal_pump_search(&m, 20.0).unwrap();
        let delta = op.f_pump - m.f0;
        assert!(
            delta / thr.delta_crit > 0.5 && delta / thr.delta_crit < 2.0,
            "search delta {:.3e} vs critical {:.3e}",
            delta,
            thr.delta_crit
        );
        // And the pump power stays below the cusp drive.
        assert!(
            op.pump_power_watts < thr.critical_power_watts * 1.5,
            "power {:.3e} W vs cusp {:.3e} W",
            op.pump_power_watts,
            thr.critical_power_watts
        );
    }

    #[test]
    fn gain_sorted_in_power_up_to_the_cusp() {
        // For a lossless mode at the critical detuning, d(mu/D)/dn > 0 holds
        // exactly for n < n_crit, so the zero-offset gain over a 50-point
        // power sweep must come out sorted all the way to the cusp.
        let m = KerrMode::new(6.4e9, 129.6e6, 0.0, -20e3).unwrap();
        let thr = bistability_threshold(&m).unwrap();
        let f_pump = m.f0 + thr.delta_crit;
        let gain_at = |p: f64| {
            let st = pump_steady_states(&m, f_pump, p).unwrap();
            let b = st.lowest_stable().unwrap();
            signal_idler_gain(&m, &st, b, f_pump)
                .unwrap()
                .g_signal
                .norm_sqr()
        };
        let grid: Vec<f64> = (1..=50)
            .map(|i| gain_at(thr.critical_power_watts * i as f64 / 51.0))
            .collect();
        for (i, w) in grid.windows(2).enumerate() {
            assert!(
                w[1] > w[0],
                "gain not sorted towards the cusp at index {i}: {} !< {}",
                w[0],
                w[1]
            );
        }
        assert!(
            grid[grid.len() - 1] / grid[0] > 10.0,
            "gain near the cusp ({:.1}) should dwarf the weak-drive value ({:.3})",
            grid[grid.len() - 1],
            grid[0]
        );
    }

    #[test]
    fn profile_metrics_stable_under_grid_refinement() {
        let m = mode();
        let op = optimal_pump_search(&m, 20.0).unwrap();
        let st = pump_steady_states(&m, op.f_pump, op.pump_power_watts).unwrap();
        let b = st.lowest_stable().unwrap();
        let kappa = m.kappa_total();
        let coarse = gain_profile(&m, &st, b, op.f_pump - 1.5 * kappa, op.f_pump + 1.5 * kappa, 1201).unwrap();
        let fine = gain_profile(&m, &st, b, op.f_pump - 1.5 * kappa, op.f_pump + 1.5 * kappa, 4801).unwrap();
        let (mc, mf) = (coarse.metrics, fine.metrics);
        assert!(
            ((mc.peak_gain_db - mf.peak_gain_db) / mf.peak_gain_db).abs() < 0.01,
            "peak changed under refinement: {} vs {}",
            mc.peak_gain_db,
            mf.peak_gain_db
        );
        let (wc, wf) = (mc.fwhm_hz.unwrap(), mf.fwhm_hz.unwrap());
        assert!(
            ((wc - wf) / wf).abs() < 0.01,
            "FWHM changed under refinement: {wc:e} vs {wf:e}"
        );
    }

    #[test]
    fn compression_recovers_small_signal_limit() {
        let m = mode();
        let op = optimal_pump_search(&m, 20.0).unwrap();
        let powers: Vec<f64> = (0..5).map(|i| 1e-21 * 10f64.powf(i as f64 * 0.5)).collect();
        let sweep = compression_sweep(&m, &op, &powers).unwrap();
        assert!(
            (sweep.points[0].gain_db - sweep.small_signal_gain_db).abs() < 0.01,
            "weak-signal gain {:.3} vs small-signal {:.3}",
            sweep.points[0].gain_db,
            sweep.small_signal_gain_db
        );
    }

    #[test]
    fn compression_tail_is_monotone_beyond_tenth_of_ncrit() {
        let m = mode();
        let op = optimal_pump_search(&m, 20.0).unwrap();
        let thr = bistability_threshold(&m).unwrap();
        let powers: Vec<f64> = (0..120)
            .map(|i| 10f64.powf(-17.0 + 5.0 * i as f64 / 119.0))
            .collect();
        let sweep = compression_sweep(&m, &op, &powers).unwrap();
        let mut prev: Option<f64> = None;
        let mut saw_tail = false;
        for pt in &sweep.points {
            if pt.n_signal >= 0.1 * thr.n_crit {
                saw_tail = true;
                if let Some(p) = prev {
                    assert!(
                        pt.gain_db <= p + 1e-9,
                        "gain rose in the saturated tail: {} -> {} at {:.3e} W",
                        p,
                        pt.gain_db,
                        pt.p_signal_watts
                    );
                }
                prev = Some(pt.gain_db);
            }
        }
        assert!(saw_tail, "sweep never reached 0.1 n_crit");
    }

    #[test]
    fn compression_point_lands_in_plausible_power_range() {
        let m = mode();
        let op = optimal_pump_search(&m, 20.0).unwrap();
        let powers: Vec<f64> = (0..160)
            .map(|i| 10f64.powf(-18.0 + 6.0 * i as f64 / 159.0))
            .collect();
        let sweep = compression_sweep(&m, &op, &powers).unwrap();
        let p1db = sweep.p1db_input_watts.expect("sweep must reach 1 dB compression");
        let p1db_dbm = watts_to_dbm(p1db);
        assert!(
            (-140.0..=-100.0).contains(&p1db_dbm),
            "P_1dB = {p1db_dbm:.1} dBm"
        );
    }

    #[test]
    fn compression_rejects_unsorted_powers() {
        let m = mode();
        let op = optimal_pump_search(&m, 20.0).unwrap();
        assert!(matches!(
            compression_sweep(&m, &op, &[1e-15, 1e-16]),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            compression_sweep(&m, &op, &[]),
            Err(Error::InvalidArgument(_))
        ));
    }
}
