//! Kerr-coefficient extraction: the resonance frequency of a Kerr resonator
//! shifts linearly with intracavity photon number, `f_r(n) = f_r0 + K n`,
//! so `K` is the slope of an ordinary least-squares line through
//! (photon number, resonance frequency) points.

use crate::error::{Error, Result};
use crate::fit::FitResult;

/// Fit `f_r = f_r0 + K n` by ordinary least squares.
///
/// `points` are `(n_photons, f_r_hz)` pairs; at least two are required, and
/// the photon numbers must not all coincide. The returned [`FitResult`]
/// carries parameters named `K` (Hz per photon) and `f_r0` (Hz) with
/// standard errors from the residual variance; with exactly two points the
/// line interpolates and the standard errors are reported as zero.
pub fn kerr_slope_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "Kerr slope fit needs at least 2 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(n, f)| !(n.is_finite() && f.is_finite())) {
        return Err(Error::InvalidArgument(
            "Kerr slope fit requires finite points".into(),
        ));
    }
    let m = points.len() as f64;
    let n_mean = points.iter().map(|p| p.0).sum::<f64>() / m;
    let f_mean = points.iter().map(|p| p.1).sum::<f64>() / m;
    let mut s_nn = 0.0;
    let mut s_nf = 0.0;
    for &(n, f) in points {
        s_nn += (n - n_mean) * (n - n_mean);
        s_nf += (n - n_mean) * (f - f_mean);
    }
    if s_nn <= 0.0 {
        return Err(Error::Rank(
            "all photon numbers coincide; the slope is unconstrained".into(),
        ));
    }
    let slope = s_nf / s_nn;
    let intercept = f_mean - slope * n_mean;

    let cost: f64 = points
        .iter()
        .map(|&(n, f)| {
            let r = intercept + slope * n - f;
            r * r
        })
        .sum();
    let dof = points.len().saturating_sub(2);
    let (se_slope, se_intercept) = if dof == 0 {
        // Exact interpolation: no residual degrees of freedom, no scatter to
        // report.
        (0.0, 0.0)
    } else {
        let sigma2 = cost / dof as f64;
        (
            (sigma2 / s_nn).sqrt(),
            (sigma2 * (1.0 / m + n_mean * n_mean / s_nn)).sqrt(),
        )
    };

    Ok(FitResult {
        names: vec!["K".into(), "f_r0".into()],
        params: vec![slope, intercept],
        std_errors: vec![se_slope, se_intercept],
        cost,
        cost_history: vec![cost],
        iterations: 0,
        converged: true,
    })
}
