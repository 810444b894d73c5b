//! Seeded synthetic data generation.
//!
//! Everything here is deterministic given a seed: the same seed produces the
//! same trace bit-for-bit, which makes fixtures reproducible across machines
//! and lets the test suite pin Monte-Carlo statistics without flakiness. The
//! generator is ChaCha8 — fast, portable, and stable across releases of the
//! `rand` ecosystem.
//!
//! The forward models live elsewhere ([`crate::kerr`], [`crate::fit`]);
//! this module only adds measurement noise on top and packages the result in
//! the I/O containers from [`crate::io`].

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::io::{ComplexTrace, GainTrace, Spectrum};
use crate::kerr::KerrMode;

/// Create the crate-wide deterministic RNG from a seed.
///
/// All synthetic-data helpers accept an explicit seed rather than an RNG so
/// that callers (CLI, tests, examples) only have to thread a single integer.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Parameters for a synthetic resonator reflection trace, generated from the
/// reflection model in [`crate::fit::reflection_s21`].
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReflectionScenario {
    /// Resonance frequency (Hz).
    pub f0: f64,
    /// Loaded quality factor.
    pub q_total: f64,
    /// Magnitude of the coupling quality factor.
    pub q_c_mag: f64,
    /// Impedance-mismatch angle (radians).
    pub phi: f64,
    /// Off-resonant amplitude.
    pub a: f64,
    /// Global phase offset (radians).
    pub alpha: f64,
    /// Cable delay (seconds).
    pub tau_s: f64,
    /// Measurement span as a multiple of the loaded linewidth `f0/Q`.
    pub span_linewidths: f64,
    /// Number of frequency points.
    pub n_points: usize,
    /// Per-point complex signal-to-noise ratio in dB: the ratio of the
    /// off-resonant amplitude `a` to the standard deviation of the complex
    /// noise added to each point.
    pub snr_db: f64,
}

impl Default for ReflectionScenario {
    fn default() -> Self {
        ReflectionScenario {
            f0: 4.2e9,
            q_total: 49.43,
            q_c_mag: 50.0,
            phi: 0.0,
            a: 1.0,
            alpha: 0.3,
            tau_s: 40e-9,
            span_linewidths: 8.0,
            n_points: 2001,
            snr_db: 30.0,
        }
    }
}

/// Generate a noisy reflection trace for the given scenario.
///
/// Noise is additive circular complex Gaussian: each point receives
/// independent real and imaginary perturbations with standard deviation
/// `sigma / sqrt(2)` where `sigma = a * 10^(-snr_db/20)`, so the *complex*
/// noise magnitude has RMS `sigma` and the per-point SNR is `snr_db`.
pub fn noisy_reflection_trace(sc: &ReflectionScenario, seed: u64) -> Result<ComplexTrace> {
    if sc.n_points < 8 {
        return Err(Error::InvalidArgument(format!(
            "reflection scenario needs at least 8 points, got {}",
            sc.n_points
        )));
    }
    if !(sc.f0 > 0.0 && sc.q_total > 0.0 && sc.q_c_mag > 0.0 && sc.a > 0.0) {
        return Err(Error::InvalidArgument(
            "reflection scenario needs positive f0, Q, |Qc| and amplitude".into(),
        ));
    }
    let span = sc.span_linewidths * sc.f0 / sc.q_total;
    let f_lo = sc.f0 - span / 2.0;
    let step = span / (sc.n_points - 1) as f64;
    let sigma = sc.a * 10f64.powf(-sc.snr_db / 20.0);
    let normal = Normal::new(0.0, sigma / std::f64::consts::SQRT_2)
        .map_err(|e| Error::InvalidArgument(format!("bad noise level: {e}")))?;
    let mut rng = rng_from_seed(seed);

    let mut freq = Vec::with_capacity(sc.n_points);
    let mut s21 = Vec::with_capacity(sc.n_points);
    for i in 0..sc.n_points {
        let f = f_lo + step * i as f64;
        let clean = crate::fit::reflection_s21(
            f, sc.f0, sc.q_total, sc.q_c_mag, sc.phi, sc.a, sc.alpha, sc.tau_s,
        );
        let noise = Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
        freq.push(f);
        s21.push(clean + noise);
    }
    ComplexTrace::new(freq, s21)
}

/// Generate a noisy power-gain trace from a Kerr amplifier operating point.
///
/// The clean curve is the forward model's signal gain at the given pump
/// settings; `sigma_db` of Gaussian noise is added to each point in dB.
pub fn noisy_gain_trace(
    mode: &KerrMode,
    f_pump: f64,
    pump_power_watts: f64,
    span_hz: f64,
    n_points: usize,
    sigma_db: f64,
    seed: u64,
) -> Result<GainTrace> {
    if n_points < 12 {
        return Err(Error::InvalidArgument(format!(
            "gain trace needs at least 12 points, got {n_points}"
        )));
    }
    let pump = crate::kerr::pump_steady_states(mode, f_pump, pump_power_watts)?;
    let branch = pump.lowest_stable().ok_or(Error::UnstableBranch { branch: 0 })?;
    let profile = crate::kerr::gain_profile(
        mode,
        &pump,
        branch,
        f_pump - span_hz / 2.0,
        f_pump + span_hz / 2.0,
        n_points,
    )?;
    let normal = Normal::new(0.0, sigma_db)
        .map_err(|e| Error::InvalidArgument(format!("bad noise level: {e}")))?;
    let mut rng = rng_from_seed(seed);
    let gain_db: Vec<f64> = (0..profile.freq_hz.len())
        .map(|i| profile.gain_db(i) + normal.sample(&mut rng))
        .collect();
    let mut trace = GainTrace::new(profile.freq_hz.clone(), gain_db)?;
    trace.f_pump_hz = Some(f_pump);
    trace.p_pump_watts = Some(pump_power_watts);
    Ok(trace)
}

/// A synthetic pump-power ladder for Kerr-coefficient extraction: resonance
/// frequency versus intracavity photon number, with Gaussian scatter on the
/// frequencies.
///
/// Returns `(photon_numbers, resonance_frequencies_hz)`.
pub fn kerr_ladder(
    f0: f64,
    kerr_hz_per_photon: f64,
    photon_numbers: &[f64],
    sigma_hz: f64,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if photon_numbers.len() < 2 {
        return Err(Error::InvalidArgument(
            "Kerr ladder needs at least 2 points".into(),
        ));
    }
    let normal = Normal::new(0.0, sigma_hz)
        .map_err(|e| Error::InvalidArgument(format!("bad noise level: {e}")))?;
    let mut rng = rng_from_seed(seed);
    let freqs = photon_numbers
        .iter()
        .map(|&n| f0 + kerr_hz_per_photon * n + normal.sample(&mut rng))
        .collect();
    Ok((photon_numbers.to_vec(), freqs))
}

/// Generate a matched pair of output spectra (amplifier off, amplifier on)
/// containing a coherent tone at `f_tone` over a flat noise floor.
///
/// * Off: tone at `tone_power_dbm` over a floor at `floor_dbm`.
/// * On: tone raised by `gain_db`, floor raised by `gain_db - delta_snr_db`,
///   so the spectrum-analyser SNR improves by `delta_snr_db`.
///
/// `sigma_db` of Gaussian scatter is added per bin (independent between the
/// two spectra). Returns `(off, on)`.
#[allow(clippy::too_many_arguments)]
pub fn on_off_spectra(
    f_center: f64,
    span_hz: f64,
    n_points: usize,
    f_tone: f64,
    tone_power_dbm: f64,
    floor_dbm: f64,
    gain_db: f64,
    delta_snr_db: f64,
    sigma_db: f64,
    seed: u64,
) -> Result<(Spectrum, Spectrum)> {
    if n_points < 16 {
        return Err(Error::InvalidArgument(format!(
            "spectrum needs at least 16 points, got {n_points}"
        )));
    }
    let f_lo = f_center - span_hz / 2.0;
    let step = span_hz / (n_points - 1) as f64;
    let freq: Vec<f64> = (0..n_points).map(|i| f_lo + step * i as f64).collect();
    // The tone lands in the nearest bin.
    let tone_bin = freq
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - f_tone)
                .abs()
                .partial_cmp(&(b.1 - f_tone).abs())
                .expect("finite grid")
        })
        .map(|(i, _)| i)
        .expect("non-empty grid");

    let normal = Normal::new(0.0, sigma_db)
        .map_err(|e| Error::InvalidArgument(format!("bad noise level: {e}")))?;
    let mut rng = rng_from_seed(seed);
    let mut build = |tone_dbm: f64, floor: f64| -> Result<Spectrum> {
        let power: Vec<f64> = (0..n_points)
            .map(|i| {
                let base = if i == tone_bin { tone_dbm } else { floor };
                base + normal.sample(&mut rng)
            })
            .collect();
        Spectrum::new(freq.clone(), power)
    };
    let off = build(tone_power_dbm, floor_dbm)?;
    let on = build(
        tone_power_dbm + gain_db,
        floor_dbm + gain_db - delta_snr_db,
    )?;
    Ok((off, on))
}
