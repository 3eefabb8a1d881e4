use serde::{Deserialize, Serialize};

use super::RenormError;
use crate::algebra::lyapunov_spectrum;
use crate::substitution::SubstitutionRule;

/// How the scaling exponent was obtained from the substitution matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Derivation {
    /// Binary rule: α̃ = 2 − log|det M| / log λ.
    Determinant { det: i128 },
    /// Larger alphabet: α̃ = 1 − log|μ| / log λ for each distinct subdominant modulus μ.
    Subdominant { moduli: Vec<f64> },
    /// No finite prediction (for example a singular binary matrix).
    Exceptional { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentPrediction {
    pub lambda: f64,
    /// α̃ from the leading subdominant modulus; `None` when exceptional.
    pub alpha_tilde: Option<f64>,
    /// All α̃ candidates, slowest decay first.
    pub candidates: Vec<f64>,
    /// Predicted exponent of Z(k), 2α̃.
    pub predicted_exponent: Option<f64>,
    pub derivation: Derivation,
}

pub fn predict_exponent(rule: &SubstitutionRule) -> Result<ExponentPrediction, RenormError> {
    let spectral = rule.spectral_data()?;
    let lambda = spectral.pf_eigenvalue;
    let log_lambda = lambda.ln();
    let (candidates, derivation) = if rule.alphabet_size() == 2 {
        let det = spectral.determinant;
        if det == 0 {
            (Vec::new(), Derivation::Exceptional { reason: "singular substitution matrix".into() })
        } else {
            (vec![2.0 - (det.unsigned_abs() as f64).ln() / log_lambda], Derivation::Determinant { det })
        }
    } else {
        let mut moduli: Vec<f64> = Vec::new();
        for &m in spectral.moduli.iter().skip(1).filter(|&&m| m > 1e-12) {
            if moduli.last().is_none_or(|&last| (last - m).abs() > 1e-9 * last) {
                moduli.push(m);
            }
        }
        if moduli.is_empty() {
            (Vec::new(), Derivation::Exceptional { reason: "no nonzero subdominant eigenvalue".into() })
        } else {
            (moduli.iter().map(|m| 1.0 - m.ln() / log_lambda).collect(), Derivation::Subdominant { moduli })
        }
    };
    let alpha_tilde = candidates.first().copied();
    Ok(ExponentPrediction { lambda, alpha_tilde, candidates, predicted_exponent: alpha_tilde.map(|a| 2.0 * a), derivation })
}

/// Machine-readable summary of a rule's spectral data and predicted exponent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub rule: String,
    pub lambda: f64,
    pub det: i128,
    /// Decreasing log-moduli; `None` stands for a zero eigenvalue.
    pub lyapunov_spectrum: Vec<Option<f64>>,
    pub alpha_tilde: Option<f64>,
    pub predicted_exponent: Option<f64>,
}

pub fn exponent_report(rule: &SubstitutionRule) -> Result<ExponentReport, RenormError> {
    let prediction = predict_exponent(rule)?;
    let spectral = rule.spectral_data()?;
    let lyap = lyapunov_spectrum(&rule.matrix())?;
    Ok(ExponentReport {
        rule: rule.name().to_string(),
        lambda: prediction.lambda,
        det: spectral.determinant,
        lyapunov_spectrum: lyap.into_iter().map(|x| x.is_finite().then_some(x)).collect(),
        alpha_tilde: prediction.alpha_tilde,
        predicted_exponent: prediction.predicted_exponent,
    })
}
