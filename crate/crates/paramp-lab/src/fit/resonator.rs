//! Complex reflection-resonance fits.
//!
//! The measurement model is a single-port reflection resonance seen through a
//! cable with delay `tau` and a complex instrument prefactor:
//!
//! ```text
//! S21(f) = a e^{i alpha} e^{-2 pi i f tau}
//!          * [ 1 - (2 Q / |Qc|) e^{i phi} / (1 + 2 i Q (f/f0 - 1)) ]
//! ```
//!
//! with loaded quality factor `Q`, coupling quality factor of magnitude
//! `|Qc|` and impedance-mismatch angle `phi`, and the internal quality factor
//! recovered from `1/Q_i = 1/Q - cos(phi)/|Qc|`. The factor 2 is the
//! reflection (one-port) convention: at critical coupling (`Q_i = |Qc|`,
//! `phi = 0`) the on-resonance reflection vanishes completely.
//!
//! The extraction runs in two stages. An algebraic stage first normalizes the
//! trace (linear phase fit on the trace edges for the cable delay, division
//! by the off-resonant level), fits a circle to the normalized data, and
//! reads `Q` and `f0` from an arctangent fit to the phase around the circle
//! center; `|Qc|` and `phi` follow from the circle geometry. A full
//! complex-domain Levenberg-Marquardt polish of all seven model parameters
//! then refines the algebraic estimates — with realistic noise the algebraic
//! stage alone leaves several times more scatter in `Q_i` than the polished
//! maximum-likelihood solution.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::constants::PLANCK;
use crate::error::{Error, Result};
use crate::fit::{levenberg_marquardt, levenberg_marquardt_numeric, FitResult, LmConfig};
use crate::io::ComplexTrace;

/// Evaluate the reflection model at one frequency.
///
/// This is the canonical forward model shared by the fitter and the
/// synthetic-data generator; see the module docs for the formula.
#[allow(clippy::too_many_arguments)]
pub fn reflection_s21(
    f: f64,
    f0: f64,
    q_total: f64,
    q_c_mag: f64,
    phi: f64,
    a: f64,
    alpha: f64,
    tau: f64,
) -> Complex64 {
    let x = 2.0 * q_total * (f / f0 - 1.0);
    let dip =
        (2.0 * q_total / q_c_mag) * Complex64::from_polar(1.0, phi) / Complex64::new(1.0, x);
    Complex64::from_polar(a, alpha - 2.0 * PI * f * tau) * (Complex64::new(1.0, 0.0) - dip)
}

/// Result of a reflection-resonance fit.
///
/// All quality factors are dimensionless; the decay rates are ordinary
/// frequencies (Hz, not angular).
#[derive(Debug, Clone, Serialize)]
pub struct ResonatorFit {
    /// Resonance frequency (Hz).
    pub f0_hz: f64,
    /// Loaded (total) quality factor.
    pub q_total: f64,
    /// Magnitude of the coupling quality factor.
    pub q_c_mag: f64,
    /// Impedance-mismatch angle (radians, in (-pi, pi]).
    pub phi: f64,
    /// Internal quality factor from `1/Q_i = 1/Q - cos(phi)/|Qc|`. Infinite
    /// or negative when the dataset is consistent with zero internal loss.
    pub q_i: f64,
    /// Off-resonant amplitude.
    pub amplitude: f64,
    /// Global phase (radians).
    pub alpha: f64,
    /// Cable delay (seconds).
    pub tau_s: f64,
    /// Total linewidth `f0/Q` (Hz).
    pub kappa_total_hz: f64,
    /// Coupling rate `f0 cos(phi)/|Qc|` (Hz).
    pub kappa_c_hz: f64,
    /// Internal loss rate `kappa_total - kappa_c` (Hz).
    pub kappa_i_hz: f64,
    /// The underlying seven-parameter fit, with parameters and standard
    /// errors in physical units.
    pub fit: FitResult,
}

/// Names of the seven fitted parameters, in `FitResult` order.
const PARAM_NAMES: [&str; 7] = [
    "a",
    "alpha_rad",
    "tau_s",
    "f0_hz",
    "q_total",
    "q_c_mag",
    "phi_rad",
];

/// Fit the reflection model to a complex trace.
///
/// The trace must hold at least 8 points and should span at least three
/// loaded linewidths around the resonance — narrower spans leave the circle
/// and the off-resonant level degenerate.
///
/// Errors: [`Error::NoResonance`] when the fitted circle radius is not
/// distinguishable from the noise floor; [`Error::InvalidArgument`] when the
/// span is too narrow; [`Error::FitConvergence`] from either internal
/// optimization stage.
pub fn resonator_reflection_fit(trace: &ComplexTrace) -> Result<ResonatorFit> {
    trace.validate_for_fit()?;
    let n = trace.freq_hz.len();
    let f = &trace.freq_hz;
    let span = f[n - 1] - f[0];
    let f_mid = 0.5 * (f[0] + f[n - 1]);

    // --- Stage 1: cable-delay estimate from the trace edges. ---------------
    let edge = (n / 10).max(3).min(n / 2);
    let slope_lo = phase_slope(&f[..edge], &trace.s21[..edge])?;
    let slope_hi = phase_slope(&f[n - edge..], &trace.s21[n - edge..])?;
    let tau0 = -0.5 * (slope_lo + slope_hi) / (2.0 * PI);

    // Remove the delay, then divide out the off-resonant level estimated
    // from the (delay-corrected) edges. Averaging both edges cancels the
    // antisymmetric part of the resonance tail.
    let corrected: Vec<Complex64> = f
        .iter()
        .zip(&trace.s21)
        .map(|(&fi, &s)| s * Complex64::from_polar(1.0, 2.0 * PI * fi * tau0))
        .collect();
    let mut reference = Complex64::new(0.0, 0.0);
    for s in corrected[..edge].iter().chain(corrected[n - edge..].iter()) {
        reference += s;
    }
    reference /= 2.0 * edge as f64;
    if reference.norm() < 1e-300 {
        return Err(Error::NoResonance(
            "off-resonant level is zero; cannot normalize the trace".into(),
        ));
    }
    let a0 = reference.norm();
    let alpha0 = reference.arg();
    let norm: Vec<Complex64> = corrected.iter().map(|s| s / reference).collect();

    // Per-point noise scale from successive differences; the resonance is
    // smooth on the grid scale, so differences are noise-dominated.
    let sigma2: f64 = norm
        .windows(2)
        .map(|w| (w[1] - w[0]).norm_sqr())
        .sum::<f64>()
        / (2.0 * (n - 1) as f64);
    let sigma = sigma2.sqrt();

    // --- Stage 2: algebraic circle fit on the normalized trace. ------------
    let (center, radius) = kasa_circle(&norm)?;
    if !(radius.is_finite() && radius > 3.0 * sigma) {
        return Err(Error::NoResonance(format!(
            "circle radius {radius:.3e} is below the noise floor {:.3e}",
            3.0 * sigma
        )));
    }

    // --- Stage 3: phase-vs-frequency arctangent fit around the center. -----
    // The resonance is the point farthest from the off-resonant level 1;
    // the half-winding points (distance sqrt(2)*radius from 1) are one
    // half-linewidth either side of it.
    let one = Complex64::new(1.0, 0.0);
    let dip_idx = (0..n)
        .max_by(|&i, &j| {
            (norm[i] - one)
                .norm()
                .partial_cmp(&(norm[j] - one).norm())
                .expect("finite trace")
        })
        .expect("non-empty trace");
    let f0_guess = f[dip_idx];
    let q_guess = initial_q(f, &norm, dip_idx, radius).unwrap_or(4.0 * f0_guess / span);

    let theta: Vec<f64> = unwrap_phases(norm.iter().map(|z| (z - center).arg()));
    let theta0_guess = {
        let mut acc = 0.0;
        for (k, t) in theta.iter().enumerate() {
            acc += t - 2.0 * (2.0 * q_guess * (1.0 - f[k] / f0_guess)).atan();
        }
        acc / n as f64
    };
    // Internal scaling keeps every parameter O(1) for the numeric Jacobian.
    let phase_res = |q: &[f64]| -> Vec<f64> {
        let (t0, f0, qq) = (q[0], f_mid + q[1] * span, q[2].exp());
        f.iter()
            .zip(&theta)
            .map(|(&fi, &ti)| t0 + 2.0 * (2.0 * qq * (1.0 - fi / f0)).atan() - ti)
            .collect()
    };
    let phase_fit = levenberg_marquardt_numeric(
        phase_res,
        &[theta0_guess, (f0_guess - f_mid) / span, q_guess.ln()],
        &LmConfig::default(),
        "resonator phase fit",
    )?;
    let f0_alg = f_mid + phase_fit.params[1] * span;
    let q_alg = phase_fit.params[2].exp();

    // Circle geometry: the off-resonant point sits at 1, the center at
    // 1 - (Q/|Qc|) e^{i phi}, and the radius equals Q/|Qc|.
    let phi_alg = (one - center).arg();
    let qc_alg = q_alg / radius;

    // --- Stage 4: full 7-parameter complex polish on the raw trace. --------
    // Internal parameters: [a, alpha, winding, x0, ln Q, ln |Qc|, phi] with
    // winding = 2 pi tau span (delay phase accumulated across the span) and
    // x0 = (f0 - f_mid)/span, so every component is O(1).
    let scaling = PolishScaling { f_mid, span };
    let full_res = |q: &[f64]| -> Vec<f64> {
        let p = scaling.to_physical(q);
        let mut out = Vec::with_capacity(2 * n);
        for (&fi, &si) in f.iter().zip(&trace.s21) {
            let m = reflection_s21(fi, p[3], p[4], p[5], p[6], p[0], p[1], p[2]);
            out.push(m.re - si.re);
            out.push(m.im - si.im);
        }
        out
    };
    let full_jac = |q: &[f64]| polish_jacobian(f, q, &scaling);
    let init = [
        a0,
        alpha0,
        2.0 * PI * tau0 * span,
        (f0_alg - f_mid) / span,
        q_alg.ln(),
        qc_alg.ln(),
        phi_alg,
    ];
    let polished = levenberg_marquardt(
        full_res,
        full_jac,
        &init,
        &LmConfig::default(),
        "resonator reflection fit",
    )?;
    let to_physical = |q: &[f64]| scaling.to_physical(q);

    // Convert the internal parameterization (and its standard errors) back
    // to physical units; the log parameters scale multiplicatively.
    let p = to_physical(&polished.params);
    let se = &polished.std_errors;
    let std_physical = vec![
        se[0],
        se[1],
        se[2] / (2.0 * PI * span),
        se[3] * span,
        p[4] * se[4],
        p[5] * se[5],
        se[6],
    ];
    let fit = FitResult {
        params: p.to_vec(),
        std_errors: std_physical,
        ..polished
    }
    .with_names(&PARAM_NAMES);

    let (a, alpha, tau_s, f0_hz, q_total, q_c_mag) = (p[0], p[1], p[2], p[3], p[4], p[5]);
    let phi = wrap_angle(p[6]);
    // Span precondition, checked against the polished linewidth (the
    // algebraic estimate is biased at narrow spans, where the off-resonant
    // reference still contains resonance tail).
    if span < 3.0 * f0_hz / q_total {
        return Err(Error::InvalidArgument(format!(
            "trace spans {:.2} linewidths; at least 3 are required around the dip",
            span * q_total / f0_hz
        )));
    }
    let inv_qi = 1.0 / q_total - phi.cos() / q_c_mag;
    let kappa_total_hz = f0_hz / q_total;
    let kappa_c_hz = f0_hz * phi.cos() / q_c_mag;
    Ok(ResonatorFit {
        f0_hz,
        q_total,
        q_c_mag,
        phi,
        q_i: 1.0 / inv_qi,
        amplitude: a,
        alpha: wrap_angle(alpha),
        tau_s,
        kappa_total_hz,
        kappa_c_hz,
        kappa_i_hz: kappa_total_hz - kappa_c_hz,
        fit,
    })
}

/// Steady-state intracavity photon number of the fitted (linear) resonator
/// under a coherent drive of `power_watts` arriving at the port.
///
/// ```text
/// n = kappa_c * (P / h f_drive) / (delta^2 + (kappa/2)^2),
/// delta = f_drive - f0, rates in Hz
/// ```
///
/// This is the zero-Kerr limit of the pump steady state, in the same
/// normalization as the nonlinear dynamics module.
pub fn intracavity_photon_number(
    fit: &ResonatorFit,
    f_drive: f64,
    power_watts: f64,
) -> Result<f64> {
    if !fit.fit.converged {
        return Err(Error::InvalidArgument(
            "photon-number inference requires a converged resonator fit".into(),
        ));
    }
    if !(f_drive.is_finite() && f_drive > 0.0) {
        return Err(Error::Domain(format!(
            "drive frequency must be positive, got {f_drive:e}"
        )));
    }
    if !(power_watts.is_finite() && power_watts >= 0.0) {
        return Err(Error::Domain(format!(
            "drive power must be non-negative, got {power_watts:e}"
        )));
    }
    let delta = f_drive - fit.f0_hz;
    let flux = power_watts / (PLANCK * f_drive);
    Ok(fit.kappa_c_hz * flux / (delta * delta + 0.25 * fit.kappa_total_hz * fit.kappa_total_hz))
}

/// Mapping between the polish's internal O(1) parameterization and the
/// physical model parameters.
#[derive(Clone, Copy)]
struct PolishScaling {
    f_mid: f64,
    span: f64,
}

impl PolishScaling {
    /// `[a, alpha, winding, x0, ln Q, ln |Qc|, phi]` ->
    /// `[a, alpha, tau, f0, Q, |Qc|, phi]`.
    fn to_physical(&self, q: &[f64]) -> [f64; 7] {
        [
            q[0],
            q[1],
            q[2] / (2.0 * PI * self.span),
            self.f_mid + q[3] * self.span,
            q[4].exp(),
            q[5].exp(),
            q[6],
        ]
    }
}

/// Analytic Jacobian of the polish residuals (alternating Re/Im rows) with
/// respect to the internal parameters.
///
/// With envelope `E = a e^{i(alpha - W f/span)}`, dip
/// `D = 2 (Q/|Qc|) e^{i phi} / (1 + i X)`, `X = 2 Q (f/f0 - 1)` and model
/// `m = E (1 - D)`, the derivatives are
///
/// ```text
/// dm/da     = m / a             dm/d(ln Q)   = -E D / (1 + i X)
/// dm/dalpha = i m               dm/d(ln |Qc|) = +E D
/// dm/dW     = -i (f/span) m     dm/dphi       = -i E D
/// dm/dx0    = E D * i/(1 + i X) * dX/dx0,  dX/dx0 = -2 Q f span / f0^2
/// ```
fn polish_jacobian(freq: &[f64], q: &[f64], scaling: &PolishScaling) -> Vec<Vec<f64>> {
    let p = scaling.to_physical(q);
    let (a, alpha, tau, f0, qt, qc, phi) = (p[0], p[1], p[2], p[3], p[4], p[5], p[6]);
    let span = scaling.span;
    let mut rows = Vec::with_capacity(2 * freq.len());
    for &f in freq {
        let x = 2.0 * qt * (f / f0 - 1.0);
        let one_ix = Complex64::new(1.0, x);
        let envelope = Complex64::from_polar(a, alpha - 2.0 * PI * f * tau);
        let dip = (2.0 * qt / qc) * Complex64::from_polar(1.0, phi) / one_ix;
        let m = envelope * (Complex64::new(1.0, 0.0) - dip);
        let ed = envelope * dip;
        let i = Complex64::new(0.0, 1.0);
        let derivs = [
            m / a,
            i * m,
            -i * (f / span) * m,
            ed * i / one_ix * (-2.0 * qt * f * span / (f0 * f0)),
            -ed / one_ix,
            ed,
            -i * ed,
        ];
        rows.push(derivs.iter().map(|d| d.re).collect());
        rows.push(derivs.iter().map(|d| d.im).collect());
    }
    rows
}

/// OLS slope of unwrapped phase versus frequency over one trace edge.
fn phase_slope(f: &[f64], s: &[Complex64]) -> Result<f64> {
    if f.len() < 2 {
        return Err(Error::InvalidArgument(
            "phase slope needs at least 2 points".into(),
        ));
    }
    let phases = unwrap_phases(s.iter().map(|z| z.arg()));
    let n = f.len() as f64;
    let fm = f.iter().sum::<f64>() / n;
    let pm = phases.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (fi, pi) in f.iter().zip(&phases) {
        sxx += (fi - fm) * (fi - fm);
        sxy += (fi - fm) * (pi - pm);
    }
    if sxx <= 0.0 {
        return Err(Error::Rank("degenerate frequency axis on trace edge".into()));
    }
    Ok(sxy / sxx)
}

/// Sequentially unwrap a phase sequence (removes 2 pi jumps).
fn unwrap_phases<I: IntoIterator<Item = f64>>(phases: I) -> Vec<f64> {
    let mut out = Vec::new();
    let mut offset = 0.0;
    let mut prev = None;
    for p in phases {
        if let Some(q) = prev {
            let mut d: f64 = p + offset - q;
            while d > PI {
                offset -= 2.0 * PI;
                d -= 2.0 * PI;
            }
            while d < -PI {
                offset += 2.0 * PI;
                d += 2.0 * PI;
            }
        }
        let v = p + offset;
        out.push(v);
        prev = Some(v);
    }
    out
}

/// Wrap an angle into (-pi, pi].
fn wrap_angle(x: f64) -> f64 {
    let mut y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y -= 2.0 * PI;
    }
    y
}

/// Algebraic (Kasa) circle fit: least squares on
/// `|z|^2 = 2 cx x + 2 cy y + (r^2 - |c|^2)`.
fn kasa_circle(points: &[Complex64]) -> Result<(Complex64, f64)> {
    let mut m = Matrix3::zeros();
    let mut b = Vector3::zeros();
    for z in points {
        let row = [2.0 * z.re, 2.0 * z.im, 1.0];
        let rhs = z.norm_sqr();
        for i in 0..3 {
            b[i] += row[i] * rhs;
            for j in 0..3 {
                m[(i, j)] += row[i] * row[j];
            }
        }
    }
    let sol = m
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Rank("degenerate circle fit".into()))?;
    let center = Complex64::new(sol[0], sol[1]);
    let r2 = sol[2] + center.norm_sqr();
    if r2 <= 0.0 {
        return Err(Error::NoResonance(
            "circle fit produced a non-positive radius".into(),
        ));
    }
    Ok((center, r2.sqrt()))
}

/// Loaded-Q estimate from the half-winding points: the distance from the
/// off-resonant point 1 falls to sqrt(2)*radius half a linewidth either side
/// of the resonance.
fn initial_q(f: &[f64], norm: &[Complex64], dip_idx: usize, radius: f64) -> Option<f64> {
    let one = Complex64::new(1.0, 0.0);
    let threshold = std::f64::consts::SQRT_2 * radius;
    let left = (0..dip_idx)
        .rev()
        .find(|&i| (norm[i] - one).norm() < threshold)?;
    let right = (dip_idx..f.len()).find(|&i| (norm[i] - one).norm() < threshold)?;
    let width = f[right] - f[left];
    if width > 0.0 {
        Some(f[dip_idx] / width)
    } else {
        None
    }
}
