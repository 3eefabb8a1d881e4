use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use super::{beta, RieszError, RieszFactor, TmFourierSeries};

/// The bracket 2⁻ⁿf_n(2⁻ⁿ⁻¹) ≤ F(2⁻ⁿ) ≤ 2⁻ⁿf_n(2⁻ⁿ), with logarithms kept for large n.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TmBounds {
    pub n: u32,
    pub lower: f64,
    pub upper: f64,
    pub ln_lower: f64,
    pub ln_upper: f64,
}

fn check_n(n: u32, min: u32) -> Result<(), RieszError> {
    if n < min {
        return Err(RieszError::Parameter { name: "n", reason: format!("must be at least {min}, got {n}") });
    }
    Ok(())
}

pub fn tm_bounds(n: u32) -> Result<TmBounds, RieszError> {
    check_n(n, 1)?;
    let f = RieszFactor::thue_morse();
    let scale = 2f64.powi(-(n as i32));
    let ln_upper = -f64::from(n) * LN_2 + f.ln_f_n(scale, n);
    let ln_lower = -f64::from(n) * LN_2 + f.ln_f_n(0.5 * scale, n);
    Ok(TmBounds { n, lower: ln_lower.exp(), upper: ln_upper.exp(), ln_lower, ln_upper })
}

/// ln of the improved lower bound 2⁻ⁿ f_{n−1}(2⁻ⁿ⁺¹β), β from `terms` odd coefficients.
pub fn tm_improved_lower_ln(n: u32, terms: usize) -> Result<f64, RieszError> {
    check_n(n, 2)?;
    let b = beta(terms);
    Ok(-f64::from(n) * LN_2 + RieszFactor::thue_morse().ln_f_n(2f64.powi(1 - n as i32) * b, n - 1))
}

pub fn tm_improved_lower(n: u32, terms: usize) -> Result<f64, RieszError> {
    tm_improved_lower_ln(n, terms).map(f64::exp)
}

/// Limits of the rescaled bracket ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TmConstants {
    /// lim upper·2^{n²}(2/π²)ⁿ.
    pub c: f64,
    /// lim lower·2^{n²}(8/π²)ⁿ, which equals π²c/4.
    pub c_lower: f64,
    /// Depth at which successive values changed by less than the tolerance.
    pub n: u32,
}

/// Iterate n until both rescaled sequences change by less than `tol` (past n = 10).
pub fn tm_constants(tol: f64, max_n: u32) -> Result<TmConstants, RieszError> {
    let rescaled = |n: u32| -> Result<(f64, f64), RieszError> {
        let b = tm_bounds(n)?;
        let n2 = f64::from(n * n) * LN_2;
        let nf = f64::from(n);
        let up = b.ln_upper + n2 + nf * (2.0 / (PI * PI)).ln();
        let lo = b.ln_lower + n2 + nf * (8.0 / (PI * PI)).ln();
        Ok((up.exp(), lo.exp()))
    };
    let mut prev = rescaled(10)?;
    for n in 11..=max_n {
        let cur = rescaled(n)?;
        if (cur.0 - prev.0).abs() < tol && (cur.1 - prev.1).abs() < tol {
            return Ok(TmConstants { c: cur.0, c_lower: cur.1, n });
        }
        prev = cur;
    }
    Err(RieszError::Parameter { name: "max_n", reason: format!("constants not stable to {tol:e} by n = {max_n}") })
}

/// One line of the bound report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: u32,
    pub lower: f64,
    pub improved_lower: f64,
    pub upper: f64,
    #[serde(rename = "F_est")]
    pub f_est: Option<f64>,
}

impl BoundReport {
    pub fn new(n: u32, beta_terms: usize, series: Option<&TmFourierSeries>) -> Result<Self, RieszError> {
        let b = tm_bounds(n)?;
        let improved_lower = if n >= 2 { tm_improved_lower(n, beta_terms)? } else { b.lower };
        let f_est = series.map(|s| s.eval(2f64.powi(-(n as i32)))).transpose()?.map(|v| v.value);
        Ok(Self { n, lower: b.lower, improved_lower, upper: b.upper, f_est })
    }
}
