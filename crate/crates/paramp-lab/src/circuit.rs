//! Circuit model of a nanowire-loaded quarter-wave resonator.
//!
//! The resonator is a coplanar-waveguide quarter-wave section (total line
//! inductance `l_line_total`, total line capacitance `c_line_total`) shorted
//! to ground through a high-kinetic-inductance nanowire (`l_nanowire_zero` at
//! zero gate voltage and zero field). Resonant modes satisfy the transcendental
//! condition
//!
//! ```text
//! Z0 * cot(pi/2 * f / f_lambda4) = 2 * pi * f * l_nw
//! ```
//!
//! with the line impedance `Z0 = sqrt(L/C)` and the unloaded quarter-wave
//! frequency `f_lambda4 = 1 / (4 sqrt(L C))`. The nanowire pulls every mode
//! down from its unloaded position; tuning enters exclusively through the
//! effective `l_nw`:
//!
//! - a gate voltage modulates the carrier density, mapped here as a monotone
//!   logistic frequency shift ([`GateMap`]);
//! - an in-plane magnetic field suppresses the superconducting gap,
//!   `delta(B) = delta_0 * (1 - (B/B*)^2)`, and kinetic inductance scales as
//!   `1/delta`, so `l_nw(B) = l_nw(0) / (1 - (B/B*)^2)` ([`FieldMap`]).

use serde::{Deserialize, Serialize};

use crate::constants::FLUX_QUANTUM;
use crate::error::{Error, Result};
use crate::numeric::find_root;

/// Grid pitch used to bracket roots of the resonance condition [Hz].
const BRACKET_SCAN_STEP: f64 = 10e6;

/// Nanowire-loaded quarter-wave resonator, lumped totals in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadedResonator {
    /// Total line capacitance of the quarter-wave section [F].
    pub c_line_total: f64,
    /// Total line inductance of the quarter-wave section [H].
    pub l_line_total: f64,
    /// Coupling capacitance to the feedline [F].
    pub c_coupling: f64,
    /// Nanowire kinetic inductance at the gate reference point and B = 0 [H].
    pub l_nanowire_zero: f64,
    /// Feedline port impedance [ohm].
    pub port_impedance: f64,
}

impl LoadedResonator {
    pub fn new(
        c_line_total: f64,
        l_line_total: f64,
        c_coupling: f64,
        l_nanowire_zero: f64,
        port_impedance: f64,
    ) -> Result<Self> {
        let r = Self {
            c_line_total,
            l_line_total,
            c_coupling,
            l_nanowire_zero,
            port_impedance,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("c_line_total", self.c_line_total),
            ("l_line_total", self.l_line_total),
            ("c_coupling", self.c_coupling),
            ("port_impedance", self.port_impedance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("{name} must be positive, got {v:e}")));
            }
        }
        if !(self.l_nanowire_zero.is_finite() && self.l_nanowire_zero >= 0.0) {
            return Err(Error::Domain(format!(
                "l_nanowire_zero must be non-negative, got {:e}",
                self.l_nanowire_zero
            )));
        }
        Ok(())
    }

    /// Characteristic impedance of the line, Z0 = sqrt(L/C) [ohm].
    pub fn characteristic_impedance(&self) -> f64 {
        (self.l_line_total / self.c_line_total).sqrt()
    }

    /// Unloaded quarter-wave frequency, 1 / (4 sqrt(L C)) [Hz].
    pub fn quarter_wave_frequency(&self) -> f64 {
        1.0 / (4.0 * (self.l_line_total * self.c_line_total).sqrt())
    }
}

/// Kinetic-inductance participation ratio alpha = l_nw / (l_nw + l_line),
/// strictly inside (0, 1) for positive arguments.
pub fn inductance_fraction(l_nw: f64, l_line: f64) -> Result<f64> {
    for (name, v) in [("l_nw", l_nw), ("l_line", l_line)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain(format!(
                "{name} must be positive, got {v:e}"
            )));
        }
    }
    Ok(l_nw / (l_nw + l_line))
}

/// Critical current a Josephson junction of equal inductance would have:
/// I_c = Phi_0 / (2 pi L) [A]. Quantifies how "junction-like" the nanowire is.
pub fn equivalent_critical_current(l_nw: f64) -> Result<f64> {
    if !(l_nw.is_finite() && l_nw > 0.0) {
        return Err(Error::Domain(format!(
            "inductance must be positive, got {l_nw:e}"
        )));
    }
    Ok(FLUX_QUANTUM / (2.0 * std::f64::consts::PI * l_nw))
}

/// First `n_modes` resonances of the loaded resonator for a given effective
/// nanowire inductance, ascending [Hz].
///
/// Mode `k` lives on the branch of cot with electrical length in
/// `(k pi, (k+1) pi)`; on each branch the mismatch
/// `g(f) = Z0 cot(theta) - 2 pi f l_nw` falls monotonically from +inf to
/// -inf, so there is exactly one root per branch. Brackets come from a fixed
/// 10 MHz scan of the branch (anchored just inside the poles at the branch
/// edges), refined by bisection with secant acceleration.
pub fn loaded_mode_frequencies(
    res: &LoadedResonator,
    l_nw: f64,
    n_modes: usize,
) -> Result<Vec<f64>> {
    res.validate()?;
    if !(l_nw.is_finite() && l_nw >= 0.0) {
        return Err(Error::Domain(format!(
            "l_nw must be non-negative, got {l_nw:e}"
        )));
    }
    if n_modes == 0 {
        return Ok(Vec::new());
    }
    let z0 = res.characteristic_impedance();
    let f_q = res.quarter_wave_frequency();
    let theta = |f: f64| std::f64::consts::FRAC_PI_2 * f / f_q;
    let mismatch = |f: f64| z0 * theta(f).tan().recip() - 2.0 * std::f64::consts::PI * f * l_nw;

    let mut modes = Vec::with_capacity(n_modes);
    for k in 0..n_modes {
        let left = 2.0 * k as f64 * f_q;
        let right = 2.0 * (k + 1) as f64 * f_q;
        // Anchor just inside the poles where the sign of g is known.
        let eps = 1e-6 * BRACKET_SCAN_STEP;
        let mut lo = left + eps;
        let mut flo = mismatch(lo);
        let mut bracket = None;
        let mut f = left + BRACKET_SCAN_STEP;
        loop {
            let probe = f.min(right - eps);
            let fp = mismatch(probe);
            if flo.signum() != fp.signum() {
                bracket = Some((lo, probe));
                break;
            }
            if probe >= right - eps {
                break;
            }
            lo = probe;
            flo = fp;
            f += BRACKET_SCAN_STEP;
        }
        let (a, b) = bracket.ok_or_else(|| Error::Bracketing {
            context: format!("resonance condition, mode {k}"),
            lo: left,
            hi: right,
        })?;
        let root = find_root(&mismatch, a, b, 1e-3, "resonance condition")?;
        // The solved root must actually satisfy the resonance condition.
        let residual = mismatch(root).abs();
        if residual > 1e-6 * z0 {
            return Err(Error::Bracketing {
                context: format!("resonance residual {residual:e} ohm too large, mode {k}"),
                lo: a,
                hi: b,
            });
        }
        modes.push(root);
    }
    Ok(modes)
}

/// Fundamental mode for a given effective nanowire inductance [Hz].
pub fn fundamental_frequency(res: &LoadedResonator, l_nw: f64) -> Result<f64> {
    Ok(loaded_mode_frequencies(res, l_nw, 1)?[0])
}

/// Effective nanowire inductance that puts the fundamental at `f_target` [H].
///
/// Inverts the monotone map `l_nw -> f_0` by bracketed root finding, widening
/// the bracket around `l_nanowire_zero` geometrically until it straddles the
/// target.
pub fn nanowire_inductance_for_frequency(res: &LoadedResonator, f_target: f64) -> Result<f64> {
    if !(f_target.is_finite() && f_target > 0.0) {
        return Err(Error::Domain(format!(
            "target frequency must be positive, got {f_target:e}"
        )));
    }
    let l0 = res.l_nanowire_zero.max(1e-15);
    let h = |l: f64| fundamental_frequency(res, l).map(|f| f - f_target);
    let mut factor = 2.0;
    for _ in 0..8 {
        let (lo, hi) = (l0 / factor, l0 * factor);
        let (hlo, hhi) = (h(lo)?, h(hi)?);
        // Fundamental decreases with l_nw, so h(lo) > 0 > h(hi) at a bracket.
        if hlo >= 0.0 && hhi <= 0.0 {
            let root = find_root(
                |l| h(l).unwrap_or(f64::NAN),
                lo,
                hi,
                1e-9 * l0,
                "nanowire inductance inversion",
            )?;
            return Ok(root);
        }
        factor *= 4.0;
    }
    Err(Error::Bracketing {
        context: "nanowire inductance inversion".into(),
        lo: 0.0,
        hi: l0 * factor,
    })
}

/// Monotone gate-voltage-to-frequency-shift map over a voltage window.
///
/// The shift follows a logistic curve renormalized so the window edges map
/// exactly to 0 and `total_frequency_span`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateMap {
    /// Lower edge of the calibrated gate window [V]; shift(v_low) = 0.
    pub v_low: f64,
    /// Upper edge of the calibrated gate window [V]; shift(v_high) = span.
    pub v_high: f64,
    /// Total frequency shift across the window [Hz].
    pub total_frequency_span: f64,
    /// Logistic midpoint voltage [V].
    pub v_mid: f64,
    /// Logistic slope scale [V]; larger means a gentler S-curve.
    pub v_scale: f64,
}

impl GateMap {
    /// Map with a default logistic shape: midpoint at the window center,
    /// slope scale one sixth of the window (the S-curve saturates inside it).
    pub fn new(v_low: f64, v_high: f64, total_frequency_span: f64) -> Result<Self> {
        Self::with_shape(
            v_low,
            v_high,
            total_frequency_span,
            0.5 * (v_low + v_high),
            (v_high - v_low) / 6.0,
        )
    }

    pub fn with_shape(
        v_low: f64,
        v_high: f64,
        total_frequency_span: f64,
        v_mid: f64,
        v_scale: f64,
    ) -> Result<Self> {
        let m = Self {
            v_low,
            v_high,
            total_frequency_span,
            v_mid,
            v_scale,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_low.is_finite() && self.v_high.is_finite() && self.v_low < self.v_high) {
            return Err(Error::Domain(format!(
                "gate window must satisfy v_low < v_high, got [{}, {}]",
                self.v_low, self.v_high
            )));
        }
        if !(self.total_frequency_span.is_finite() && self.total_frequency_span >= 0.0) {
            return Err(Error::Domain(format!(
                "total_frequency_span must be non-negative, got {:e}",
                self.total_frequency_span
            )));
        }
        if !(self.v_scale.is_finite() && self.v_scale > 0.0) {
            return Err(Error::Domain(format!(
                "v_scale must be positive, got {}",
                self.v_scale
            )));
        }
        if !self.v_mid.is_finite() {
            return Err(Error::Domain("v_mid must be finite".into()));
        }
        Ok(())
    }

    /// Frequency shift at gate voltage `v_g` relative to `v_low` [Hz].
    pub fn frequency_shift(&self, v_g: f64) -> Result<f64> {
        if !(v_g >= self.v_low && v_g <= self.v_high) {
            return Err(Error::OutOfRange {
                what: "gate voltage".into(),
                value: v_g,
                lo: self.v_low,
                hi: self.v_high,
            });
        }
        let s = |v: f64| 1.0 / (1.0 + (-(v - self.v_mid) / self.v_scale).exp());
        let (s_lo, s_hi) = (s(self.v_low), s(self.v_high));
        Ok(self.total_frequency_span * ((s(v_g) - s_lo) / (s_hi - s_lo)))
    }
}

/// Gated fundamental frequency: the zero-gate fundamental plus the map shift,
/// realized physically by the gate tuning the effective nanowire inductance.
pub fn gate_frequency(map: &GateMap, res: &LoadedResonator, v_g: f64) -> Result<f64> {
    let f_ref = fundamental_frequency(res, res.l_nanowire_zero)?;
    Ok(f_ref + map.frequency_shift(v_g)?)
}

/// Effective nanowire inductance at gate voltage `v_g` [H]: the inductance
/// whose loaded fundamental equals [`gate_frequency`].
pub fn gate_nanowire_inductance(map: &GateMap, res: &LoadedResonator, v_g: f64) -> Result<f64> {
    let f_target = gate_frequency(map, res, v_g)?;
    nanowire_inductance_for_frequency(res, f_target)
}

/// In-plane magnetic field tuning through gap suppression.
///
/// `delta(B) = delta_0 (1 - (B/b_star)^2)` with `b_star` the phenomenological
/// gap-closing field; kinetic inductance scales as `1/delta`. `b_star` is
/// fixed by one calibration point `(b_calibration, shift_at_calibration)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldMap {
    /// Phenomenological gap-closing field [T].
    pub b_star: f64,
    /// Field at which the map was calibrated [T].
    pub b_calibration: f64,
    /// Fundamental-frequency shift measured at the calibration field [Hz].
    pub shift_at_calibration: f64,
}

impl FieldMap {
    /// Solve for `b_star` so the modeled shift at `b_calibration` equals
    /// `shift_at_calibration` (a negative number: the field always softens).
    pub fn calibrated(
        res: &LoadedResonator,
        b_calibration: f64,
        shift_at_calibration: f64,
    ) -> Result<Self> {
        if !(b_calibration.is_finite() && b_calibration != 0.0) {
            return Err(Error::Domain("calibration field must be nonzero".into()));
        }
        if !(shift_at_calibration.is_finite() && shift_at_calibration < 0.0) {
            return Err(Error::Domain(format!(
                "calibration shift must be negative (gap suppression softens the mode), got {:e}",
                shift_at_calibration
            )));
        }
        let f_ref = fundamental_frequency(res, res.l_nanowire_zero)?;
        let b_cal = b_calibration.abs();
        let shift_for = |b_star: f64| -> f64 {
            let l = res.l_nanowire_zero / (1.0 - (b_cal / b_star).powi(2));
            match fundamental_frequency(res, l) {
                Ok(f) => f - f_ref,
                Err(_) => f64::NAN,
            }
        };
        // Just above b_cal the inductance diverges and the shift is hugely
        // negative; far above, the shift vanishes. One sign change in between.
        let lo = b_cal * 1.000001;
        let hi = b_cal * 1e3;
        let b_star = find_root(
            |b| shift_for(b) - shift_at_calibration,
            lo,
            hi,
            1e-12 * b_cal,
            "field map calibration",
        )?;
        Ok(Self {
            b_star,
            b_calibration,
            shift_at_calibration,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b_star.is_finite() && self.b_star > 0.0) {
            return Err(Error::Domain(format!(
                "b_star must be positive, got {}",
                self.b_star
            )));
        }
        Ok(())
    }

    /// Effective nanowire inductance at field `b` [H].
    pub fn nanowire_inductance(&self, res: &LoadedResonator, b: f64) -> Result<f64> {
        self.validate()?;
        if b.abs() >= self.b_star {
            return Err(Error::OutOfRange {
                what: "magnetic field".into(),
                value: b,
                lo: -self.b_star,
                hi: self.b_star,
            });
        }
        Ok(res.l_nanowire_zero / (1.0 - (b / self.b_star).powi(2)))
    }
}

/// Fundamental-frequency shift at in-plane field `b`, relative to B = 0 [Hz].
/// Even in `b` and monotone non-increasing in `|b|`.
pub fn field_frequency_shift(map: &FieldMap, res: &LoadedResonator, b: f64) -> Result<f64> {
    let f_ref = fundamental_frequency(res, res.l_nanowire_zero)?;
    let l = map.nanowire_inductance(res, b)?;
    Ok(fundamental_frequency(res, l)? - f_ref)
}
