//! Chebyshev low-pass ladder synthesis for the DC gate line.
//!
//! The gate electrode must carry a static bias onto the chip without
//! opening a microwave loss channel at the amplifier frequencies. A
//! lumped LC low-pass ladder does this: this module synthesizes the
//! standard equiripple (Chebyshev) prototype, denormalizes it to physical
//! shunt capacitors and series inductors, evaluates its scattering
//! response by cascading ABCD matrices, and checks stop-band suppression
//! over a frequency window (including a parallel-plate dielectric
//!-thickness sensitivity sweep, since the shunt capacitors scale as
//! `C -> C * d0/d`).
//!
//! Elements are ideal and lumped. Distributed self-resonances are not
//! modeled, so checks extending above 10 GHz carry
//! `lumped_model_valid = false`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One ladder element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Element {
    /// Shunt capacitor to ground (farads).
    ShuntC(f64),
    /// Series inductor (henries).
    SeriesL(f64),
}

impl Element {
    pub fn value(&self) -> f64 {
        match *self {
            Element::ShuntC(c) => c,
            Element::SeriesL(l) => l,
        }
    }
}

/// A source-terminated LC ladder: elements listed from the source side to
/// the load side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderNetwork {
    pub elements: Vec<Element>,
    pub source_impedance: f64,
    pub load_impedance: f64,
}

impl LadderNetwork {
    pub fn validate(&self) -> Result<()> {
        for (i, e) in self.elements.iter().enumerate() {
            let v = e.value();
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!(
                    "element {i} has non-positive value {v:e}"
                )));
            }
        }
        for (label, z) in [
            ("source impedance", self.source_impedance),
            ("load impedance", self.load_impedance),
        ] {
            if !(z.is_finite() && z > 0.0) {
                return Err(Error::Domain(format!("{label} must be positive, got {z:e}")));
            }
        }
        Ok(())
    }
}

/// Design parameters for the gate filter; `Default` is the reference
/// design (order 5, 0.5 dB ripple, 0.3 GHz cutoff, 50 ohm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FilterDesign {
    pub order: usize,
    pub ripple_db: f64,
    pub cutoff_hz: f64,
    pub z0_ohm: f64,
}

impl Default for FilterDesign {
    fn default() -> Self {
        FilterDesign {
            order: 5,
            ripple_db: 0.5,
            cutoff_hz: 0.3e9,
            z0_ohm: 50.0,
        }
    }
}

impl FilterDesign {
    /// Synthesize the physical ladder for this design.
    pub fn synthesize(&self) -> Result<LadderNetwork> {
        let g = chebyshev_prototype(self.order, self.ripple_db)?;
        denormalize_ladder(&g, self.cutoff_hz, self.z0_ohm)
    }
}

/// Normalized Chebyshev element values `g_1..g_n` for an equiripple
/// low-pass prototype with `g_0 = 1` source normalization.
///
/// Uses the closed-form recursion
/// `beta = ln(coth(ripple_db ln(10)/40))`, `gamma = sinh(beta/2n)`,
/// `a_k = sin((2k-1)pi/2n)`, `b_k = gamma^2 + sin^2(k pi / n)`,
/// `g_1 = 2 a_1 / gamma`, `g_k = 4 a_{k-1} a_k / (b_{k-1} g_{k-1})`.
pub fn chebyshev_prototype(order: usize, ripple_db: f64) -> Result<Vec<f64>> {
    if order < 1 {
        return Err(Error::InvalidArgument("filter order must be >= 1".into()));
    }
    if !(ripple_db.is_finite() && ripple_db > 0.0) {
        return Err(Error::Domain(format!(
            "passband ripple must be positive, got {ripple_db} dB"
        )));
    }
    let n = order as f64;
    let beta = (1.0 / (ripple_db * std::f64::consts::LN_10 / 40.0).tanh()).ln();
    let gamma = (beta / (2.0 * n)).sinh();
    let a = |k: usize| ((2 * k - 1) as f64 * std::f64::consts::PI / (2.0 * n)).sin();
    let b = |k: usize| gamma * gamma + (k as f64 * std::f64::consts::PI / n).sin().powi(2);
    let mut g = Vec::with_capacity(order);
    g.push(2.0 * a(1) / gamma);
    for k in 2..=order {
        let prev = *g.last().unwrap();
        g.push(4.0 * a(k - 1) * a(k) / (b(k - 1) * prev));
    }
    Ok(g)
}

/// Normalized load termination `g_{n+1}` for the prototype: 1 for odd
/// order, `coth^2(beta/4)` for even order (a load conductance, since the
/// last element of a shunt-first even-order ladder is a series inductor).
/// [`denormalize_ladder`] infers this factor back from `g_1`; the two must
/// agree, which the test suite checks.
pub fn chebyshev_load_factor(order: usize, ripple_db: f64) -> f64 {
    if order % 2 == 1 {
        1.0
    } else {
        let beta = (1.0 / (ripple_db * std::f64::consts::LN_10 / 40.0).tanh()).ln();
        (1.0 / (beta / 4.0).tanh()).powi(2)
    }
}

/// Scale prototype g-values to physical elements: shunt-first, so odd
/// positions become capacitors `C_k = g_k / (2 pi f_c z0)` and even
/// positions inductors `L_k = g_k z0 / (2 pi f_c)`.
pub fn denormalize_ladder(g: &[f64], f_cutoff_hz: f64, z0: f64) -> Result<LadderNetwork> {
    if g.is_empty() {
        return Err(Error::InvalidArgument("no prototype coefficients".into()));
    }
    if !(f_cutoff_hz.is_finite() && f_cutoff_hz > 0.0) {
        return Err(Error::Domain(format!(
            "cutoff must be positive, got {f_cutoff_hz:e} Hz"
        )));
    }
    if !(z0.is_finite() && z0 > 0.0) {
        return Err(Error::Domain(format!("z0 must be positive, got {z0:e}")));
    }
    let w_c = 2.0 * std::f64::consts::PI * f_cutoff_hz;
    let elements = g
        .iter()
        .enumerate()
        .map(|(i, gk)| {
            if i % 2 == 0 {
                Element::ShuntC(gk / (w_c * z0))
            } else {
                Element::SeriesL(gk * z0 / w_c)
            }
        })
        .collect();
    // Even-order equiripple prototypes terminate into a mismatched load;
    // infer the ripple back from g1 so callers only pass the g-list.
    let load_impedance = if g.len() % 2 == 1 {
        z0
    } else {
        // g1 = 2 a1 / gamma with a1 = sin(pi/2n); invert for beta.
        let n = g.len() as f64;
        let a1 = (std::f64::consts::PI / (2.0 * n)).sin();
        let gamma = 2.0 * a1 / g[0];
        let beta = 2.0 * n * gamma.asinh();
        let g_load = (1.0 / (beta / 4.0).tanh()).powi(2);
        z0 / g_load
    };
    let net = LadderNetwork {
        elements,
        source_impedance: z0,
        load_impedance,
    };
    net.validate()?;
    Ok(net)
}

/// Chain (ABCD) matrix of the ladder at one frequency.
pub fn ladder_abcd(net: &LadderNetwork, freq_hz: f64) -> Result<[[Complex64; 2]; 2]> {
    if !(freq_hz.is_finite() && freq_hz >= 0.0) {
        return Err(Error::Domain(format!(
            "frequency must be >= 0, got {freq_hz:e}"
        )));
    }
    let w = 2.0 * std::f64::consts::PI * freq_hz;
    let mut m = [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
    ];
    for e in &net.elements {
        let s = match *e {
            Element::ShuntC(c) => [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, w * c), Complex64::new(1.0, 0.0)],
            ],
            Element::SeriesL(l) => [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, w * l)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ],
        };
        m = [
            [
                m[0][0] * s[0][0] + m[0][1] * s[1][0],
                m[0][0] * s[0][1] + m[0][1] * s[1][1],
            ],
            [
                m[1][0] * s[0][0] + m[1][1] * s[1][0],
                m[1][0] * s[0][1] + m[1][1] * s[1][1],
            ],
        ];
    }
    Ok(m)
}

/// Transmission coefficient of the terminated ladder:
///
/// ```text
/// S21 = 2 sqrt(Zs Zl) / (A Zl + B + C Zs Zl + D Zs)
/// ```
///
/// which reduces to `2 / (A + B/Z0 + C Z0 + D)` for equal terminations.
/// An empty ladder is a through (S21 = 1 for matched terminations).
pub fn ladder_s21(net: &LadderNetwork, freq_hz: f64) -> Result<Complex64> {
    net.validate()?;
    let [[a, b], [c, d]] = ladder_abcd(net, freq_hz)?;
    let zs = net.source_impedance;
    let zl = net.load_impedance;
    let denom = a * zl + b + c * zs * zl + d * zs;
    Ok(2.0 * (zs * zl).sqrt() / denom)
}

/// `|S21|^2` in dB at one frequency.
pub fn ladder_s21_db(net: &LadderNetwork, freq_hz: f64) -> Result<f64> {
    Ok(20.0 * ladder_s21(net, freq_hz)?.norm().log10())
}

/// Evaluate the response on a uniform grid; returns `(freq_hz, s21_db)`
/// pairs.
pub fn response_grid(
    net: &LadderNetwork,
    f_lo_hz: f64,
    f_hi_hz: f64,
    n_points: usize,
) -> Result<Vec<(f64, f64)>> {
    if n_points < 2 {
        return Err(Error::InvalidArgument("grid needs >= 2 points".into()));
    }
    if !(f_lo_hz.is_finite() && f_hi_hz.is_finite() && f_lo_hz >= 0.0 && f_lo_hz < f_hi_hz) {
        return Err(Error::InvalidArgument(format!(
            "band must be ordered with non-negative start, got ({f_lo_hz:e}, {f_hi_hz:e})"
        )));
    }
    let step = (f_hi_hz - f_lo_hz) / (n_points - 1) as f64;
    (0..n_points)
        .map(|i| {
            let f = f_lo_hz + step * i as f64;
            Ok((f, ladder_s21_db(net, f)?))
        })
        .collect()
}

/// Result of a stop-band suppression check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StopbandReport {
    pub pass: bool,
    /// Least-suppressed point in the band.
    pub worst_freq_hz: f64,
    pub worst_db: f64,
    pub threshold_db: f64,
    /// False when the band extends above 10 GHz, where distributed
    /// self-resonances the lumped model cannot see become relevant.
    pub lumped_model_valid: bool,
}

/// Check that `|S21|` stays at or below `-threshold_db` over the band,
/// sampled on a 2001-point grid.
pub fn stopband_check(
    net: &LadderNetwork,
    band_hz: (f64, f64),
    threshold_db: f64,
) -> Result<StopbandReport> {
    let grid = response_grid(net, band_hz.0, band_hz.1, 2001)?;
    let (worst_freq_hz, worst_db) = grid
        .into_iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty grid");
    Ok(StopbandReport {
        pass: worst_db <= -threshold_db,
        worst_freq_hz,
        worst_db,
        threshold_db,
        lumped_model_valid: band_hz.1 <= 10e9,
    })
}

/// Uniformly rescale every shunt capacitor, leaving inductors and
/// terminations alone. A parallel-plate dielectric thinner or thicker
/// than nominal scales all capacitors together as `C -> C * d0/d`.
pub fn scale_capacitors(net: &LadderNetwork, factor: f64) -> Result<LadderNetwork> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(Error::Domain(format!(
            "capacitor scale factor must be positive, got {factor:e}"
        )));
    }
    let elements = net
        .elements
        .iter()
        .map(|e| match *e {
            Element::ShuntC(c) => Element::ShuntC(c * factor),
            Element::SeriesL(l) => Element::SeriesL(l),
        })
        .collect();
    Ok(LadderNetwork {
        elements,
        ..net.clone()
    })
}

/// Stop-band check at nominal and at a symmetric dielectric-thickness
/// tolerance: returns reports for `d/d0` in `{1, 1+tol, 1-tol}` (labelled
/// nominal / thick / thin). All must pass for a robust design.
pub fn dielectric_sensitivity(
    net: &LadderNetwork,
    band_hz: (f64, f64),
    threshold_db: f64,
    thickness_tolerance: f64,
) -> Result<Vec<(String, StopbandReport)>> {
    if !(thickness_tolerance.is_finite() && (0.0..1.0).contains(&thickness_tolerance)) {
        return Err(Error::Domain(format!(
            "thickness tolerance must be in [0,1), got {thickness_tolerance}"
        )));
    }
    let mut out = Vec::with_capacity(3);
    for (label, d_over_d0) in [
        ("nominal", 1.0),
        ("thick", 1.0 + thickness_tolerance),
        ("thin", 1.0 - thickness_tolerance),
    ] {
        let scaled = scale_capacitors(net, 1.0 / d_over_d0)?;
        out.push((label.to_string(), stopband_check(&scaled, band_hz, threshold_db)?));
    }
    Ok(out)
}
