use serde::{Deserialize, Serialize};

use super::{ScalingError, ScanResult};
use crate::numeric::{least_squares, CompensatedSum};

/// Width of one decade in natural log; the threshold for two-sided boundedness.
pub const DECADE: f64 = std::f64::consts::LN_10;

/// Least-squares power law ln Z = e·ln k + c.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    pub ln_prefactor: f64,
    /// Largest |residual| of the straight-line fit in log-log space.
    pub max_residual: f64,
    /// max − min of ln(Z·k^{−e}) with e the predicted exponent if given, else the fitted one.
    pub spread: f64,
    /// Whether `spread` stays below one decade.
    pub bounded: bool,
    pub predicted: Option<f64>,
    pub tolerance: Option<f64>,
    /// |exponent − predicted| ≤ tolerance, when a prediction is given.
    pub passed: Option<bool>,
    pub samples: usize,
}

fn log_points(scan: &ScanResult, needed: usize) -> Result<(Vec<f64>, Vec<f64>), ScalingError> {
    if scan.samples.len() < needed {
        return Err(ScalingError::TooFewSamples { needed, got: scan.samples.len() });
    }
    if let Some((index, s)) = scan.samples.iter().enumerate().find(|(_, s)| !s.ln_z.is_finite()) {
        return Err(ScalingError::NonPositive { index, ln_z: s.ln_z });
    }
    Ok(scan.samples.iter().map(|s| (s.ln_k, s.ln_z)).unzip())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().copied().collect::<CompensatedSum>().value() / v.len() as f64
}

pub fn fit_power(scan: &ScanResult, predicted: Option<f64>, tol: f64) -> Result<PowerFit, ScalingError> {
    let (x, y) = log_points(scan, 4)?;
    let (mx, my) = (mean(&x), mean(&y));
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).collect::<CompensatedSum>().value();
    let sxy: f64 = x.iter().zip(&y).map(|(xi, yi)| (xi - mx) * (yi - my)).collect::<CompensatedSum>().value();
    if !(sxx > 0.0) {
        return Err(ScalingError::Degenerate);
    }
    let exponent = sxy / sxx;
    let ln_prefactor = my - exponent * mx;
    let max_residual = x.iter().zip(&y).map(|(xi, yi)| (yi - ln_prefactor - exponent * xi).abs()).fold(0.0, f64::max);
    let e = predicted.unwrap_or(exponent);
    let shifted: Vec<f64> = x.iter().zip(&y).map(|(xi, yi)| yi - e * xi).collect();
    let spread = shifted.iter().copied().fold(f64::NEG_INFINITY, f64::max) - shifted.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(PowerFit {
        exponent,
        ln_prefactor,
        max_residual,
        spread,
        bounded: spread < DECADE,
        predicted,
        tolerance: predicted.map(|_| tol),
        passed: predicted.map(|p| (exponent - p).abs() <= tol),
        samples: x.len(),
    })
}

/// ln Z = A·(ln k)² + B·ln k + C.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogQuadraticFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub max_residual: f64,
    pub samples: usize,
}

pub fn fit_log_quadratic(scan: &ScanResult) -> Result<LogQuadraticFit, ScalingError> {
    let (x, y) = log_points(scan, 5)?;
    let design: Vec<Vec<f64>> = x.iter().map(|&xi| vec![xi * xi, xi, 1.0]).collect();
    let coef = least_squares(&design, &y).ok_or(ScalingError::Degenerate)?;
    let (a, b, c) = (coef[0], coef[1], coef[2]);
    let max_residual = x.iter().zip(&y).map(|(xi, yi)| (yi - (a * xi * xi + b * xi + c)).abs()).fold(0.0, f64::max);
    Ok(LogQuadraticFit { a, b, c, max_residual, samples: x.len() })
}
