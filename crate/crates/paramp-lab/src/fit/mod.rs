//! Model fitting: a small Levenberg-Marquardt engine and the extraction
//! procedures built on it (reflection resonances, Kerr slopes, gain spectra).

mod kerr_slope;
mod lm;
mod lorentzian;
mod resonator;
mod spectrum;

pub use kerr_slope::kerr_slope_fit;
pub use lm::{levenberg_marquardt, levenberg_marquardt_numeric, LmConfig};
pub use lorentzian::{
    double_lorentzian_fit, lorentzian_model_jacobian, lorentzian_model_value,
    DoubleLorentzianFit, LorentzianComponent,
};
pub use resonator::{
    intracavity_photon_number, reflection_s21, resonator_reflection_fit, ResonatorFit,
};
pub use spectrum::{spectrum_snr, SpectrumSnr};

use serde::Serialize;

/// Outcome of a nonlinear least-squares fit.
///
/// `params` minimizes the sum of squared residuals `cost`; `std_errors` are
/// 1-sigma parameter uncertainties from the local curvature,
/// `sigma^2 (J^T J)^-1` with `sigma^2 = cost / (n_residuals - n_params)`.
/// They are NaN when the curvature is singular at the solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    /// Human-readable parameter names, same order as `params`.
    pub names: Vec<String>,
    /// Best-fit parameter vector.
    pub params: Vec<f64>,
    /// 1-sigma standard errors, same order as `params`.
    pub std_errors: Vec<f64>,
    /// Final sum of squared residuals.
    pub cost: f64,
    /// Cost after the initial point and after every accepted step;
    /// non-increasing by construction.
    pub cost_history: Vec<f64>,
    /// Number of damping iterations spent (accepted and rejected).
    pub iterations: usize,
    /// Whether the optimizer reached a stationary point. When false the
    /// parameter values and standard errors should not be trusted.
    pub converged: bool,
}

impl FitResult {
    /// Look up a parameter estimate and its standard error by name.
    pub fn get(&self, name: &str) -> Option<(f64, f64)> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| (self.params[i], self.std_errors[i]))
    }

    /// Relabel the parameters. The engine emits generic `p0, p1, ...` names;
    /// the extraction procedures built on it substitute physical ones.
    ///
    /// # Panics
    /// If the number of names differs from the number of parameters.
    pub fn with_names(mut self, names: &[&str]) -> Self {
        assert_eq!(
            names.len(),
            self.params.len(),
            "parameter/name count mismatch"
        );
        self.names = names.iter().map(|s| s.to_string()).collect();
        self
    }
}
