//! Maximum-likelihood model fitting: logistic regression by iteratively
//! reweighted least squares, and ordinary least squares via QR.
//!
//! Standard errors come from the inverse observed information (logistic) or
//! the classical sandwich-free variance estimate (OLS). No regularisation,
//! no robust or clustered errors.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::design::DesignMatrix;
use crate::linalg::{self, LinalgError, Matrix};
use crate::stats;

/// Deviance-change convergence tolerance for IRLS.
pub const IRLS_TOLERANCE: f64 = 1e-8;
/// Iteration cap for IRLS.
pub const IRLS_MAX_ITER: usize = 100;
/// A coefficient beyond this magnitude on the log-odds scale is treated as
/// diverging (perfect separation).
const DIVERGENCE_BOUND: f64 = 30.0;

/// Model-family specific fit statistics.
#[derive(Debug, Clone, PartialEq)]
pub enum FitStatistics {
    Logistic { log_likelihood: f64, aic: f64 },
    Ols { r_squared: f64 },
}

/// A fitted regression model: coefficient table plus fit statistics.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub columns: Vec<String>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// z statistics for logistic fits, t statistics for OLS fits.
    pub statistics: Vec<f64>,
    pub p_values: Vec<f64>,
    pub stats: FitStatistics,
    pub n_observations: usize,
    pub iterations: usize,
    pub converged: bool,
    /// Present when the fit did not converge cleanly.
    pub diagnostic: Option<String>,
}

impl FitResult {
    pub fn coefficient(&self, column: &str) -> Option<f64> {
        self.columns
            .iter()
            .position(|c| c == column)
            .map(|i| self.coefficients[i])
    }

    pub fn log_likelihood(&self) -> Option<f64> {
        match self.stats {
            FitStatistics::Logistic { log_likelihood, .. } => Some(log_likelihood),
            FitStatistics::Ols { .. } => None,
        }
    }

    pub fn aic(&self) -> Option<f64> {
        match self.stats {
            FitStatistics::Logistic { aic, .. } => Some(aic),
            FitStatistics::Ols { .. } => None,
        }
    }

    pub fn r_squared(&self) -> Option<f64> {
        match self.stats {
            FitStatistics::Ols { r_squared } => Some(r_squared),
            FitStatistics::Logistic { .. } => None,
        }
    }

    pub fn stars(&self, index: usize) -> &'static str {
        stats::stars(self.p_values[index])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitError {
    /// The design matrix is rank deficient; the named column is linearly
    /// dependent on earlier ones.
    SingularDesign { column: String },
    /// The logistic response contained a value other than 0 or 1.
    NonBinaryResponse { row: usize, value: f64 },
    /// Covariates passed to prediction do not line up with the fit columns.
    CovariateMismatch { expected: usize, got: usize },
    /// Design and response sizes disagree, or no rows at all.
    EmptyDesign,
}

impl fmt::Display for FitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitError::SingularDesign { column } => {
                write!(f, "singular design: column `{column}` is linearly dependent")
            }
            FitError::NonBinaryResponse { row, value } => {
                write!(f, "response at row {row} is {value}, expected 0 or 1")
            }
            FitError::CovariateMismatch { expected, got } => {
                write!(f, "expected {expected} covariates, got {got}")
            }
            FitError::EmptyDesign => write!(f, "design matrix has no rows"),
        }
    }
}

impl core::error::Error for FitError {}

fn singular(design: &DesignMatrix, err: LinalgError) -> FitError {
    match err {
        LinalgError::Singular { column } => FitError::SingularDesign {
            column: design.columns.get(column).cloned().unwrap_or_default(),
        },
        LinalgError::Underdetermined => FitError::EmptyDesign,
    }
}

/// Bernoulli log-likelihood at coefficients `beta`.
pub fn log_likelihood(design: &DesignMatrix, beta: &[f64]) -> f64 {
    let eta = design.x.mul_vec(beta);
    eta.iter()
        .zip(&design.response)
        .map(|(&e, &y)| {
            // y*log(p) + (1-y)*log(1-p) in a catastrophically-stable form:
            // log(1+exp(e)) with overflow guard
            let log1pe = if e > 35.0 { e } else { libm::log1p(libm::exp(e)) };
            y * e - log1pe
        })
        .sum()
}

/// Score vector (gradient of the log-likelihood): Xᵀ(y − p).
pub fn score(design: &DesignMatrix, beta: &[f64]) -> Vec<f64> {
    let eta = design.x.mul_vec(beta);
    let resid: Vec<f64> = eta
        .iter()
        .zip(&design.response)
        .map(|(&e, &y)| y - stats::inv_logit(e))
        .collect();
    design.x.transpose_mul_vec(&resid)
}

/// Observed information matrix XᵀWX with W = diag(p(1−p)).
pub fn information(design: &DesignMatrix, beta: &[f64]) -> Matrix {
    let eta = design.x.mul_vec(beta);
    let k = design.x.n_cols();
    let mut info = Matrix::zeros(k, k);
    for (i, &e) in eta.iter().enumerate() {
        let p = stats::inv_logit(e);
        let w = p * (1.0 - p);
        let row = design.x.row(i);
        for a in 0..k {
            let wa = w * row[a];
            for b in a..k {
                info[(a, b)] += wa * row[b];
            }
        }
    }
    for a in 0..k {
        for b in 0..a {
            info[(a, b)] = info[(b, a)];
        }
    }
    info
}

/// Fits a logistic regression by IRLS from a zero start.
///
/// Converges when the deviance changes by less than `IRLS_TOLERANCE`;
/// diverging coefficients (perfect separation) end the loop with
/// `converged = false` and a diagnostic naming the runaway column.
pub fn fit_logistic(design: &DesignMatrix) -> Result<FitResult, FitError> {
    let n = design.x.n_rows();
    let k = design.x.n_cols();
    if n == 0 || design.response.len() != n {
        return Err(FitError::EmptyDesign);
    }
    for (row, &y) in design.response.iter().enumerate() {
        if y != 0.0 && y != 1.0 {
            return Err(FitError::NonBinaryResponse { row, value: y });
        }
    }

    let mut beta = vec![0.0; k];
    let mut deviance = -2.0 * log_likelihood(design, &beta);
    let mut iterations = 0;
    let mut converged = false;
    let mut diagnostic = None;

    while iterations < IRLS_MAX_ITER {
        iterations += 1;
        let eta = design.x.mul_vec(&beta);
        // weighted least squares on the working response z = eta + (y-p)/w
        let mut wx = Matrix::zeros(n, k);
        let mut wz = vec![0.0; n];
        for i in 0..n {
            let p = stats::inv_logit(eta[i]);
            let w = (p * (1.0 - p)).max(1e-10);
            let sw = libm::sqrt(w);
            let z = eta[i] + (design.response[i] - p) / w;
            let row = design.x.row(i);
            for j in 0..k {
                wx[(i, j)] = sw * row[j];
            }
            wz[i] = sw * z;
        }
        let ls = linalg::qr_least_squares(wx, &wz).map_err(|e| singular(design, e))?;
        beta = ls.coefficients;

        if let Some((j, b)) = beta
            .iter()
            .enumerate()
            .find(|(_, b)| libm::fabs(**b) > DIVERGENCE_BOUND)
        {
            diagnostic = Some(format!(
                "coefficient `{}` diverging ({b:.1} on the log-odds scale); \
                 possible perfect separation",
                design.columns[j]
            ));
            break;
        }
        let new_deviance = -2.0 * log_likelihood(design, &beta);
        let delta = libm::fabs(deviance - new_deviance);
        deviance = new_deviance;
        if delta < IRLS_TOLERANCE {
            converged = true;
            break;
        }
    }
    // a separated fit can stall the deviance before the magnitude bound trips
    if converged {
        if let Some((j, b)) = beta
            .iter()
            .enumerate()
            .find(|(_, b)| libm::fabs(**b) > DIVERGENCE_BOUND / 2.0)
        {
            converged = false;
            diagnostic = Some(format!(
                "coefficient `{}` diverging ({b:.1} on the log-odds scale); \
                 possible perfect separation",
                design.columns[j]
            ));
        }
    }
    if !converged && diagnostic.is_none() {
        diagnostic = Some(format!("no convergence after {iterations} iterations"));
    }

    // standard errors from the inverse information at the optimum; a
    // degenerate information matrix only blocks a fit that claims convergence
    let info = information(design, &beta);
    let std_errors: Vec<f64> = match linalg::invert_spd(&info) {
        Ok(covariance) => (0..k).map(|j| libm::sqrt(covariance[(j, j)])).collect(),
        Err(e) if converged => return Err(singular(design, e)),
        Err(_) => vec![f64::INFINITY; k],
    };
    let statistics: Vec<f64> = beta
        .iter()
        .zip(&std_errors)
        .map(|(b, se)| b / se)
        .collect();
    let p_values: Vec<f64> = statistics.iter().map(|&z| stats::normal_p_value(z)).collect();
    let ll = log_likelihood(design, &beta);
    let aic = 2.0 * k as f64 - 2.0 * ll;

    Ok(FitResult {
        columns: design.columns.clone(),
        coefficients: beta,
        std_errors,
        statistics,
        p_values,
        stats: FitStatistics::Logistic { log_likelihood: ll, aic },
        n_observations: n,
        iterations,
        converged,
        diagnostic,
    })
}

/// Fits an ordinary least-squares regression via Householder QR.
///
/// R² is reported as zero for a constant response rather than dividing by a
/// zero total sum of squares.
pub fn fit_ols(design: &DesignMatrix) -> Result<FitResult, FitError> {
    let n = design.x.n_rows();
    let k = design.x.n_cols();
    if n == 0 || design.response.len() != n {
        return Err(FitError::EmptyDesign);
    }
    let ls = linalg::qr_least_squares(design.x.clone(), &design.response)
        .map_err(|e| singular(design, e))?;
    let beta = ls.coefficients;

    let fitted = design.x.mul_vec(&beta);
    let ssr: f64 = fitted
        .iter()
        .zip(&design.response)
        .map(|(f, y)| (y - f) * (y - f))
        .sum();
    let mean = design.response.iter().sum::<f64>() / n as f64;
    let sst: f64 = design.response.iter().map(|y| (y - mean) * (y - mean)).sum();
    // guard against a (numerically) constant response
    let sst_floor = 1e-20 * n as f64 * (1.0 + mean * mean);
    let r_squared = if sst > sst_floor { 1.0 - ssr / sst } else { 0.0 };

    let df = n.saturating_sub(k).max(1);
    let sigma2 = ssr / df as f64;
    let std_errors: Vec<f64> = (0..k)
        .map(|j| libm::sqrt(sigma2 * ls.xtx_inverse[(j, j)]))
        .collect();
    let statistics: Vec<f64> = beta
        .iter()
        .zip(&std_errors)
        .map(|(b, se)| if *se > 0.0 { b / se } else { 0.0 })
        .collect();
    let p_values: Vec<f64> = statistics
        .iter()
        .map(|&t| stats::student_t_p_value(t, df))
        .collect();

    Ok(FitResult {
        columns: design.columns.clone(),
        coefficients: beta,
        std_errors,
        statistics,
        p_values,
        stats: FitStatistics::Ols { r_squared },
        n_observations: n,
        iterations: 1,
        converged: true,
        diagnostic: None,
    })
}

/// Win probability predicted by a logistic fit for the given non-intercept
/// covariates (in the fit's column order).
pub fn predict_win_prob(fit: &FitResult, covariates: &[f64]) -> Result<f64, FitError> {
    if covariates.len() + 1 != fit.coefficients.len() {
        return Err(FitError::CovariateMismatch {
            expected: fit.coefficients.len() - 1,
            got: covariates.len(),
        });
    }
    let eta = fit.coefficients[0] + linalg::dot(&fit.coefficients[1..], covariates);
    Ok(stats::inv_logit(eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::DesignMatrix;
    use alloc::string::ToString;

    fn design(rows: &[Vec<f64>], y: &[f64], names: &[&str]) -> DesignMatrix {
        DesignMatrix {
            columns: names.iter().map(|s| s.to_string()).collect(),
            x: Matrix::from_rows(rows),
            response: y.to_vec(),
        }
    }

    #[test]
    fn intercept_only_half_ones() {
        let rows: Vec<Vec<f64>> = (0..10).map(|_| vec![1.0]).collect();
        let y = [1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0];
        let fit = fit_logistic(&design(&rows, &y, &["intercept"])).unwrap();
        assert!(fit.converged);
        assert!(fit.coefficients[0].abs() < 1e-9, "logit(0.5) = 0");
    }

    #[test]
    fn two_group_closed_form() {
        // group 0 wins 1/4, group 1 wins 3/4:
        // intercept = logit(0.25) = -ln 3, slope = logit(0.75)-logit(0.25) = ln 9
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..8 {
            let g = (i % 2) as f64;
            rows.push(vec![1.0, g]);
            let wins = if g == 0.0 { i / 2 == 0 } else { i / 2 != 0 };
            y.push(wins as u8 as f64);
        }
        // counts: g0: 1 win / 4, g1: 3 wins / 4
        let fit = fit_logistic(&design(&rows, &y, &["intercept", "g"])).unwrap();
        assert!((fit.coefficients[0] + 1.0986123).abs() < 1e-6);
        assert!((fit.coefficients[1] - 2.1972246).abs() < 1e-6);
    }

    #[test]
    fn logistic_aic_identity() {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![1.0, (i as f64 - 10.0) / 5.0])
            .collect();
        let y: Vec<f64> = (0..20).map(|i| ((i * 7) % 3 == 0) as u8 as f64).collect();
        let fit = fit_logistic(&design(&rows, &y, &["intercept", "x"])).unwrap();
        let (ll, aic) = match fit.stats {
            FitStatistics::Logistic { log_likelihood, aic } => (log_likelihood, aic),
            _ => unreachable!(),
        };
        assert_eq!(aic, 2.0 * 2.0 - 2.0 * ll);
    }

    #[test]
    fn separation_is_flagged() {
        // x > 0 wins, x < 0 loses: perfectly separated
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| vec![1.0, if i < 6 { -1.0 - i as f64 * 0.1 } else { 1.0 + i as f64 * 0.1 }])
            .collect();
        let y: Vec<f64> = (0..12).map(|i| (i >= 6) as u8 as f64).collect();
        let fit = fit_logistic(&design(&rows, &y, &["intercept", "x"])).unwrap();
        assert!(!fit.converged);
        let msg = fit.diagnostic.unwrap();
        assert!(msg.contains("diverging"), "{msg}");
    }

    #[test]
    fn singular_design_names_column() {
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![1.0, i as f64, 2.0 * i as f64])
            .collect();
        let y: Vec<f64> = (0..10).map(|i| (i % 2) as f64).collect();
        let err = fit_logistic(&design(&rows, &y, &["intercept", "x", "x2"])).unwrap_err();
        assert_eq!(err, FitError::SingularDesign { column: "x2".to_string() });
    }

    #[test]
    fn rejects_non_binary_response() {
        let rows = vec![vec![1.0], vec![1.0]];
        let err = fit_logistic(&design(&rows, &[0.0, 0.5], &["intercept"])).unwrap_err();
        assert!(matches!(err, FitError::NonBinaryResponse { row: 1, .. }));
    }

    #[test]
    fn ols_recovers_exact_line() {
        let rows: Vec<Vec<f64>> = (0..30).map(|i| vec![1.0, i as f64 / 10.0]).collect();
        let y: Vec<f64> = rows.iter().map(|r| 0.05 - 0.002 * r[1]).collect();
        let fit = fit_ols(&design(&rows, &y, &["intercept", "x"])).unwrap();
        assert!((fit.coefficients[0] - 0.05).abs() < 1e-12);
        assert!((fit.coefficients[1] + 0.002).abs() < 1e-12);
        assert!((fit.r_squared().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ols_constant_response() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![1.0, i as f64]).collect();
        let y = vec![0.3; 10];
        let fit = fit_ols(&design(&rows, &y, &["intercept", "x"])).unwrap();
        assert!((fit.coefficients[0] - 0.3).abs() < 1e-12);
        assert!(fit.coefficients[1].abs() < 1e-12);
        assert_eq!(fit.r_squared().unwrap(), 0.0);
    }

    #[test]
    fn predict_from_known_coefficients() {
        // a hand-built fit: plugging implied 0.5 through the logistic link
        let fit = FitResult {
            columns: crate::design::MODEL1_COLUMNS.iter().map(|s| s.to_string()).collect(),
            coefficients: vec![-2.207, 4.530, -0.162, 0.032, -0.606, 1.136],
            std_errors: vec![0.0; 6],
            statistics: vec![0.0; 6],
            p_values: vec![1.0; 6],
            stats: FitStatistics::Logistic { log_likelihood: 0.0, aic: 0.0 },
            n_observations: 0,
            iterations: 0,
            converged: true,
            diagnostic: None,
        };
        // home bet behind closed doors at implied 0.5
        let home = predict_win_prob(&fit, &[0.5, 0.0, 1.0, 1.0, 0.0]).unwrap();
        assert!((home - 0.374).abs() < 5e-4, "{home}");
        // away bet behind closed doors at implied 0.5
        let away = predict_win_prob(&fit, &[0.5, 1.0, 1.0, 1.0, 1.0]).unwrap();
        assert!((away - 0.613).abs() < 1e-3, "{away}");
        // mismatched covariate count
        assert!(predict_win_prob(&fit, &[0.5]).is_err());
    }

    #[test]
    fn zero_coefficients_predict_half() {
        let fit = FitResult {
            columns: vec!["intercept".to_string(), "x".to_string()],
            coefficients: vec![0.0, 0.0],
            std_errors: vec![0.0; 2],
            statistics: vec![0.0; 2],
            p_values: vec![1.0; 2],
            stats: FitStatistics::Logistic { log_likelihood: 0.0, aic: 0.0 },
            n_observations: 0,
            iterations: 0,
            converged: true,
            diagnostic: None,
        };
        assert_eq!(predict_win_prob(&fit, &[0.0]).unwrap(), 0.5);
        assert_eq!(predict_win_prob(&fit, &[7.0]).unwrap(), 0.5);
    }
}
