//! Double-Lorentzian gain-profile fits.
//!
//! Measured gain spectra of the pumped amplifier show a broadband
//! amplification window with a narrow pump-centered mode on top. Both are
//! captured by a two-component Lorentzian model *in linear power* (the
//! additive decomposition is physical in power, not in dB):
//!
//! ```text
//! G(f) = 1 + A1 L(f; f1, df1) + A2 L(f; f2, df2),
//! L(f; fc, df) = 1 / (1 + u^2),   u = 2 (f - fc) / df
//! ```
//!
//! with unit-peak Lorentzians of full width at half maximum `df`. Fitting
//! runs on linear-power residuals with an analytic Jacobian; results are
//! reported with per-component FWHM and peak gain in dB. Components are
//! labeled with the broader one first; a second component whose amplitude is
//! negligible sorts last regardless of its (unconstrained) width.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{levenberg_marquardt, FitResult, LmConfig};
use crate::io::GainTrace;

/// One fitted Lorentzian component.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LorentzianComponent {
    /// Amplitude `A` in linear power above the unit baseline.
    pub amplitude: f64,
    /// Center frequency (Hz).
    pub f_center_hz: f64,
    /// Full width at half maximum (Hz).
    pub fwhm_hz: f64,
    /// Peak gain of this component alone over the baseline,
    /// `10 log10(1 + A)` dB (NaN if `1 + A <= 0`).
    pub peak_gain_db: f64,
}

/// Result of [`double_lorentzian_fit`].
#[derive(Debug, Clone, Serialize)]
pub struct DoubleLorentzianFit {
    /// Fitted components, broader first. Holds a single entry when the
    /// two-component fit collapsed.
    pub components: Vec<LorentzianComponent>,
    /// True when the two components converged onto the same center and
    /// width, so the model was refit with a single component.
    pub collapsed: bool,
    /// The underlying fit; parameters are named `a1, f1_hz, fwhm1_hz, ...`
    /// in the same order as `components`.
    pub fit: FitResult,
}

/// Linear-power value of the multi-Lorentzian gain model at one frequency:
/// `1 + sum_k A_k / (1 + (2 (f - f_k) / w_k)^2)`. `comps` holds parameter
/// triplets `[A, f_center, fwhm, ...]` — the same layout as
/// [`FitResult::params`](crate::fit::FitResult) returned by
/// [`double_lorentzian_fit`]. Useful for rendering a fitted curve.
pub fn lorentzian_model_value(f: f64, comps: &[f64]) -> f64 {
    let mut g = 1.0;
    for c in comps.chunks_exact(3) {
        let u = 2.0 * (f - c[1]) / c[2];
        g += c[0] / (1.0 + u * u);
    }
    g
}

/// Analytic Jacobian row of [`lorentzian_model_value`] at one frequency:
/// derivatives with respect to `[A, f_center, fwhm]` of each component, in
/// parameter order.
pub fn lorentzian_model_jacobian(f: f64, comps: &[f64]) -> Vec<f64> {
    let mut row = Vec::with_capacity(comps.len());
    for c in comps.chunks_exact(3) {
        let (a, fc, w) = (c[0], c[1], c[2]);
        let u = 2.0 * (f - fc) / w;
        let l = 1.0 / (1.0 + u * u);
        row.push(l);
        row.push(4.0 * a * u * l * l / w);
        row.push(2.0 * a * u * u * l * l / w);
    }
    row
}

/// Fit the gain trace with the two-component model.
///
/// Preconditions: at least 12 points and a peak at least 1 dB above the
/// unit baseline. Components whose centers and widths coincide (centers
/// closer than 5% of the smaller width, widths within a factor of 2) are
/// degenerate — the data cannot tell them apart — and trigger a
/// single-component refit flagged by `collapsed`.
///
/// Errors: [`Error::InvalidArgument`] on a flat trace,
/// [`Error::FitConvergence`] (carrying the best iterate) if 500 damping
/// iterations do not converge.
pub fn double_lorentzian_fit(trace: &GainTrace) -> Result<DoubleLorentzianFit> {
    trace.validate_for_fit()?;
    let peak_db = trace
        .gain_db
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    if peak_db < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "peak gain {peak_db:.2} dB is below the 1 dB threshold; nothing to fit"
        )));
    }

    let f = &trace.freq_hz;
    let n = f.len();
    let g: Vec<f64> = trace.gain_db.iter().map(|d| 10f64.powf(d / 10.0)).collect();
    let span = f[n - 1] - f[0];
    let step = span / (n - 1) as f64;
    let excess: Vec<f64> = g.iter().map(|x| (x - 1.0).max(0.0)).collect();

    // Initialization per the two-scale structure of the data: the global
    // peak seeds the narrow component, the second moment of the
    // above-baseline mass seeds the broad one.
    let peak_idx = excess
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("finite gains"))
        .map(|(i, _)| i)
        .expect("non-empty trace");
    let peak_excess = excess[peak_idx];

    let mass: f64 = excess.iter().sum();
    let f_bar = f
        .iter()
        .zip(&excess)
        .map(|(fi, e)| fi * e)
        .sum::<f64>()
        / mass;
    let var = f
        .iter()
        .zip(&excess)
        .map(|(fi, e)| (fi - f_bar) * (fi - f_bar) * e)
        .sum::<f64>()
        / mass;
    let w_broad = if var > 0.0 {
        (2.355 * var.sqrt()).clamp(4.0 * step, span)
    } else {
        span / 2.0
    };
    let w_narrow = half_max_width(f, &excess, peak_idx)
        .unwrap_or(span / 10.0)
        .clamp(2.0 * step, w_broad);

    // Integral of A*L over frequency is A*pi*w/2, so the mass fixes the
    // broad amplitude given its width.
    let a_broad = (2.0 * mass * step / (std::f64::consts::PI * w_broad))
        .clamp(1e-3 * peak_excess, peak_excess);
    let a_narrow = (peak_excess - a_broad).max(0.05 * peak_excess);

    let init = [a_narrow, f[peak_idx], w_narrow, a_broad, f_bar, w_broad];
    let fitted = run_fit(f, &g, &init)?;

    // Degeneracy checks. Same center and comparable width means the split
    // between the two amplitudes is arbitrary; a vanishing amplitude means
    // the second component fits nothing and its center and width are
    // unconstrained. Either way the data supports only one Lorentzian.
    let p = &fitted.params;
    let (w1, w2) = (p[2].abs(), p[5].abs());
    let overlapping = (p[1] - p[4]).abs() < 0.05 * w1.min(w2);
    let same_scale = w1.max(w2) < 2.0 * w1.min(w2);
    let dominant = if p[0].abs() >= p[3].abs() { 0 } else { 3 };
    let other = 3 - dominant;
    let negligible = p[other].abs() < 1e-3 * p[dominant].abs();
    if (overlapping && same_scale) || negligible {
        let single_init = [p[dominant] + p[other], p[dominant + 1], p[dominant + 2]];
        let single = run_fit(f, &g, &single_init)?;
        return Ok(package(single, true));
    }
    Ok(package(fitted, false))
}

/// Run the Levenberg-Marquardt fit for any number of components.
fn run_fit(f: &[f64], g: &[f64], init: &[f64]) -> Result<FitResult> {
    let residuals = |p: &[f64]| -> Vec<f64> {
        f.iter()
            .zip(g)
            .map(|(&fi, &gi)| lorentzian_model_value(fi, p) - gi)
            .collect()
    };
    let jacobian =
        |p: &[f64]| -> Vec<Vec<f64>> { f.iter().map(|&fi| lorentzian_model_jacobian(fi, p)).collect() };
    levenberg_marquardt(
        residuals,
        jacobian,
        init,
        &LmConfig::default(),
        "double-Lorentzian gain fit",
    )
}

/// Sort components (significant-then-broader first), normalize widths to
/// positive values and attach canonical parameter names.
fn package(fit: FitResult, collapsed: bool) -> DoubleLorentzianFit {
    let n_comp = fit.params.len() / 3;
    let mut order: Vec<usize> = (0..n_comp).collect();
    let a_max = (0..n_comp)
        .map(|k| fit.params[3 * k].abs())
        .fold(0.0, f64::max);
    let significant = |k: usize| fit.params[3 * k].abs() > 1e-6 * a_max;
    order.sort_by(|&i, &j| {
        significant(j)
            .cmp(&significant(i))
            .then(
                fit.params[3 * j + 2]
                    .abs()
                    .partial_cmp(&fit.params[3 * i + 2].abs())
                    .expect("finite widths"),
            )
    });

    let mut params = Vec::with_capacity(3 * n_comp);
    let mut std_errors = Vec::with_capacity(3 * n_comp);
    let mut names = Vec::with_capacity(3 * n_comp);
    let mut components = Vec::with_capacity(n_comp);
    for (slot, &k) in order.iter().enumerate() {
        let a = fit.params[3 * k];
        let fc = fit.params[3 * k + 1];
        let w = fit.params[3 * k + 2].abs();
        params.extend_from_slice(&[a, fc, w]);
        std_errors.extend_from_slice(&[
            fit.std_errors[3 * k],
            fit.std_errors[3 * k + 1],
            fit.std_errors[3 * k + 2],
        ]);
        let i = slot + 1;
        names.push(format!("a{i}"));
        names.push(format!("f{i}_hz"));
        names.push(format!("fwhm{i}_hz"));
        components.push(LorentzianComponent {
            amplitude: a,
            f_center_hz: fc,
            fwhm_hz: w,
            peak_gain_db: if 1.0 + a > 0.0 {
                10.0 * (1.0 + a).log10()
            } else {
                f64::NAN
            },
        });
    }
    DoubleLorentzianFit {
        components,
        collapsed,
        fit: FitResult {
            names,
            params,
            std_errors,
            ..fit
        },
    }
}

/// Full width at half maximum of `excess` around `peak`: distance between
/// the first half-height crossings on either side.
fn half_max_width(f: &[f64], excess: &[f64], peak: usize) -> Option<f64> {
    let half = excess[peak] / 2.0;
    let left = (0..peak).rev().find(|&i| excess[i] < half);
    let right = (peak..f.len()).find(|&i| excess[i] < half);
    match (left, right) {
        (Some(l), Some(r)) => Some(f[r] - f[l]),
        (Some(l), None) => Some(2.0 * (f[peak] - f[l])),
        (None, Some(r)) => Some(2.0 * (f[r] - f[peak])),
        (None, None) => None,
    }
}
