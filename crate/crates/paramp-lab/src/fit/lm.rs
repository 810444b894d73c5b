//! Dense Levenberg-Marquardt with Marquardt diagonal scaling.
//!
//! The normal equations `(J^T J + lambda diag(J^T J)) step = -J^T r` are
//! solved per damping trial; `lambda` shrinks on accepted steps and grows on
//! rejected ones, so the iteration interpolates between Gauss-Newton and
//! scaled gradient descent. Problems in this crate are small (<= ~10
//! parameters, <= ~20k residuals), so dense factorizations are ample.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::fit::FitResult;

/// Damping schedule and stopping rules for [`levenberg_marquardt`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmConfig {
    /// Hard cap on damping iterations (accepted plus rejected).
    pub max_iterations: usize,
    /// Starting damping factor.
    pub initial_lambda: f64,
    /// Multiplier applied to lambda when a step is rejected.
    pub lambda_increase: f64,
    /// Divisor applied to lambda when a step is accepted.
    pub lambda_decrease: f64,
    /// Stop when an accepted step improves the cost by less than this
    /// relative amount.
    pub cost_tolerance: f64,
    /// Stop when the accepted step is smaller than this relative size.
    pub step_tolerance: f64,
}

impl Default for LmConfig {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            initial_lambda: 1e-3,
            lambda_increase: 10.0,
            lambda_decrease: 3.0,
            cost_tolerance: 1e-12,
            step_tolerance: 1e-12,
        }
    }
}

/// Damping factor beyond which the iteration is declared stationary: the
/// trial steps have shrunk to nothing without finding an improvement.
const LAMBDA_CEILING: f64 = 1e12;

fn cost_of(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

/// Minimize the sum of squared residuals with an analytic Jacobian.
///
/// `residuals` maps parameters to the residual vector; `jacobian` returns the
/// matrix of partial derivatives, one row per residual, one column per
/// parameter. Returns the best iterate wrapped in
/// [`Error::FitConvergence`] when the iteration budget runs out.
pub fn levenberg_marquardt<R, J>(
    residuals: R,
    jacobian: J,
    initial: &[f64],
    config: &LmConfig,
    context: &str,
) -> Result<FitResult>
where
    R: Fn(&[f64]) -> Vec<f64>,
    J: Fn(&[f64]) -> Vec<Vec<f64>>,
{
    let n_params = initial.len();
    if n_params == 0 {
        return Err(Error::InvalidArgument("fit with zero parameters".into()));
    }
    if initial.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "non-finite initial guess ({context})"
        )));
    }

    let mut params = initial.to_vec();
    let mut r = residuals(&params);
    let n_res = r.len();
    if n_res < n_params {
        return Err(Error::Rank(format!(
            "{n_res} residuals cannot constrain {n_params} parameters ({context})"
        )));
    }
    let mut cost = cost_of(&r);
    if !cost.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "residuals non-finite at the initial guess ({context})"
        )));
    }
    let mut history = vec![cost];
    let mut lambda = config.initial_lambda;
    let mut iterations = 0;
    let mut jtj = DMatrix::zeros(n_params, n_params);

    while iterations < config.max_iterations {
        let jac = jacobian(&params);
        if jac.len() != n_res || jac.iter().any(|row| row.len() != n_params) {
            return Err(Error::InvalidArgument(format!(
                "jacobian shape mismatch: expected {n_res} x {n_params} ({context})"
            )));
        }
        // J^T J and J^T r accumulated directly; J itself is never stored
        // as a matrix.
        jtj.fill(0.0);
        let mut jtr = DVector::zeros(n_params);
        for (row, &ri) in jac.iter().zip(r.iter()) {
            for a in 0..n_params {
                jtr[a] += row[a] * ri;
                for b in a..n_params {
                    jtj[(a, b)] += row[a] * row[b];
                }
            }
        }
        for a in 0..n_params {
            for b in 0..a {
                jtj[(a, b)] = jtj[(b, a)];
            }
        }

        // Inner damping loop: escalate lambda until a step improves the cost.
        let mut accepted = false;
        while iterations < config.max_iterations {
            iterations += 1;
            let mut damped = jtj.clone();
            for a in 0..n_params {
                // Marquardt scaling; the max keeps flat directions solvable.
                damped[(a, a)] += lambda * jtj[(a, a)].max(1e-300);
            }
            let step = match damped.cholesky() {
                Some(ch) => ch.solve(&(-&jtr)),
                None => {
                    lambda *= config.lambda_increase;
                    if lambda > LAMBDA_CEILING {
                        break;
                    }
                    continue;
                }
            };
            let trial: Vec<f64> = params
                .iter()
                .zip(step.iter())
                .map(|(p, s)| p + s)
                .collect();
            let r_trial = residuals(&trial);
            let cost_trial = cost_of(&r_trial);
            if cost_trial.is_finite() && cost_trial < cost {
                let rel_drop = (cost - cost_trial) / cost.max(1e-300);
                let rel_step = step
                    .iter()
                    .zip(params.iter())
                    .map(|(s, p)| s.abs() / p.abs().max(1.0))
                    .fold(0.0, f64::max);
                params = trial;
                r = r_trial;
                cost = cost_trial;
                history.push(cost);
                lambda = (lambda / config.lambda_decrease).max(1e-300);
                accepted = true;
                if rel_drop < config.cost_tolerance || rel_step < config.step_tolerance {
                    return Ok(finish(params, r, cost, history, iterations, &jtj, true));
                }
                break;
            }
            lambda *= config.lambda_increase;
            if lambda > LAMBDA_CEILING {
                break;
            }
        }
        if !accepted {
            if lambda > LAMBDA_CEILING {
                // Stationary: no descent direction at any damping. The
                // current iterate is the answer (e.g. an exact initial guess).
                return Ok(finish(params, r, cost, history, iterations, &jtj, true));
            }
            break; // iteration budget exhausted inside the damping loop
        }
    }

    let best = finish(params, r, cost, history, iterations, &jtj, false);
    Err(Error::FitConvergence {
        context: context.to_string(),
        iterations,
        best: Box::new(best),
    })
}

/// [`levenberg_marquardt`] with a central-difference Jacobian.
pub fn levenberg_marquardt_numeric<R>(
    residuals: R,
    initial: &[f64],
    config: &LmConfig,
    context: &str,
) -> Result<FitResult>
where
    R: Fn(&[f64]) -> Vec<f64>,
{
    let jac = |p: &[f64]| numeric_jacobian(&residuals, p);
    levenberg_marquardt(&residuals, jac, initial, config, context)
}

/// Central-difference Jacobian, one row per residual.
pub(crate) fn numeric_jacobian<R>(residuals: &R, params: &[f64]) -> Vec<Vec<f64>>
where
    R: Fn(&[f64]) -> Vec<f64>,
{
    let base = residuals(params);
    let n_res = base.len();
    let n_params = params.len();
    let mut jac = vec![vec![0.0; n_params]; n_res];
    let mut p = params.to_vec();
    for a in 0..n_params {
        let h = 6e-6 * params[a].abs().max(1.0);
        p[a] = params[a] + h;
        let plus = residuals(&p);
        p[a] = params[a] - h;
        let minus = residuals(&p);
        p[a] = params[a];
        for i in 0..n_res {
            jac[i][a] = (plus[i] - minus[i]) / (2.0 * h);
        }
    }
    jac
}

fn finish(
    params: Vec<f64>,
    r: Vec<f64>,
    cost: f64,
    history: Vec<f64>,
    iterations: usize,
    jtj: &DMatrix<f64>,
    converged: bool,
) -> FitResult {
    let n_params = params.len();
    let dof = r.len().saturating_sub(n_params);
    let sigma2 = if dof > 0 { cost / dof as f64 } else { f64::NAN };
    let std_errors = match jtj.clone().try_inverse() {
        Some(cov) => (0..n_params)
            .map(|a| (sigma2 * cov[(a, a)]).sqrt())
            .collect(),
        None => vec![f64::NAN; n_params],
    };
    FitResult {
        names: (0..n_params).map(|a| format!("p{a}")).collect(),
        params,
        std_errors,
        cost,
        cost_history: history,
        iterations,
        converged,
    }
}
