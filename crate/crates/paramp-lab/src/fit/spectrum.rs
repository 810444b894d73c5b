//! Signal-to-noise extraction from spectrum-analyzer traces.
//!
//! The SNR of a coherent tone over a noise floor is the tone's bin power
//! minus the median power over a designated noise band, both in dBm at equal
//! resolution bandwidth. The median makes the floor estimate robust against
//! stray tones inside the band. An on/off SNR *improvement* is simply the
//! difference of two such extractions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::Spectrum;

/// Result of [`spectrum_snr`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpectrumSnr {
    /// Signal-bin power minus median noise power (dB).
    pub snr_db: f64,
    /// Power in the signal bin (dBm).
    pub signal_dbm: f64,
    /// Median power over the noise band (dBm).
    pub noise_floor_dbm: f64,
    /// Index of the bin used for the signal.
    pub signal_bin: usize,
    /// Number of bins that entered the noise median.
    pub noise_bins: usize,
}

/// Extract the SNR of the tone nearest `f_signal_hz` against the median
/// floor over `noise_band` (inclusive frequency bounds, Hz).
///
/// The signal bin is the grid point closest to `f_signal_hz`; it is excluded
/// from the noise median if the band happens to cover it. The caller is
/// responsible for choosing a band clear of the idler and other tones.
///
/// Errors: `f_signal_hz` outside the spectrum → [`Error::OutOfRange`];
/// a noise band containing no usable bins → [`Error::InvalidArgument`].
pub fn spectrum_snr(
    spectrum: &Spectrum,
    f_signal_hz: f64,
    noise_band: (f64, f64),
) -> Result<SpectrumSnr> {
    let f = &spectrum.freq_hz;
    let n = f.len();
    if !(f_signal_hz >= f[0] && f_signal_hz <= f[n - 1]) {
        return Err(Error::OutOfRange {
            what: "signal frequency (Hz)".into(),
            value: f_signal_hz,
            lo: f[0],
            hi: f[n - 1],
        });
    }
    let (lo, hi) = noise_band;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::InvalidArgument(format!(
            "noise band [{lo:e}, {hi:e}] Hz is empty or malformed"
        )));
    }

    let signal_bin = (0..n)
        .min_by(|&i, &j| {
            (f[i] - f_signal_hz)
                .abs()
                .partial_cmp(&(f[j] - f_signal_hz).abs())
                .expect("finite axis")
        })
        .expect("non-empty spectrum");

    let mut noise: Vec<f64> = (0..n)
        .filter(|&i| i != signal_bin && f[i] >= lo && f[i] <= hi)
        .map(|i| spectrum.power_dbm[i])
        .collect();
    if noise.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "noise band [{lo:e}, {hi:e}] Hz contains no bins"
        )));
    }
    noise.sort_by(|a, b| a.partial_cmp(b).expect("finite powers"));
    let m = noise.len();
    let noise_floor_dbm = if m % 2 == 1 {
        noise[m / 2]
    } else {
        0.5 * (noise[m / 2 - 1] + noise[m / 2])
    };

    let signal_dbm = spectrum.power_dbm[signal_bin];
    Ok(SpectrumSnr {
        snr_db: signal_dbm - noise_floor_dbm,
        signal_dbm,
        noise_floor_dbm,
        signal_bin,
        noise_bins: m,
    })
}
