//! Stochastic and random-matrix reference systems: analytic Z(k), seeded samplers and an
//! empirical periodogram estimator.

mod periodogram;
mod sample;

pub use periodogram::{empirical_diffraction, empirical_z, empirical_z_curve, uniform_periodogram, Centering, Diffraction, EmpiricalZ};
pub use sample::{sample, sample_stream, Support, WeightedRealisation, MAX_SITES};

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::numeric::{fmt_real, integrate_adaptive};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StochasticError {
    #[error("invalid parameter {name}: {reason}")]
    Parameter { name: &'static str, reason: String },
    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },
    #[error("bin width {spacing:e} under-resolves the periodogram; at most {required:e} is needed")]
    UnderResolved { spacing: f64, required: f64 },
    #[error("adaptive quadrature did not converge at k = {0}")]
    Quadrature(f64),
    #[error("model {0} has no sampler")]
    NotSamplable(String),
}

/// Weight convention for the Bernoulli lattice gas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Occupied 1, empty 0.
    ZeroOne,
    /// Occupied +1, empty −1.
    PlusMinus,
}

/// A stochastic or random-matrix reference system with a known Z(k).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum AnalyticModel {
    /// Homogeneous Poisson process of unit intensity.
    Poisson,
    /// Independent occupation of the integers with probability p.
    Bernoulli { p: f64, weighting: Weighting },
    /// Circular β-ensemble eigenvalue statistics at unit density.
    Rmt { beta: u8 },
    /// Two-state lattice gas; empty stays empty with probability p, occupied stays occupied with q.
    Markov { p: f64, q: f64 },
    /// Binary random tiling with lengths u (probability p) and v, scatterers at left endpoints.
    RandomTiling { u: f64, v: f64, p: f64 },
    /// Rudin–Shapiro ±1 weights with every sign flipped independently with probability p.
    RudinShapiro { p: f64 },
}

fn probability(name: &'static str, p: f64) -> Result<(), StochasticError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(StochasticError::Parameter { name, reason: format!("{p} is not in [0, 1]") })
    }
}

impl AnalyticModel {
    pub fn validate(&self) -> Result<(), StochasticError> {
        match *self {
            AnalyticModel::Poisson => Ok(()),
            AnalyticModel::Bernoulli { p, .. } | AnalyticModel::RudinShapiro { p } => probability("p", p),
            AnalyticModel::Rmt { beta } => match beta {
                1 | 2 | 4 => Ok(()),
                _ => Err(StochasticError::Parameter { name: "beta", reason: format!("{beta} is not one of 1, 2, 4") }),
            },
            AnalyticModel::Markov { p, q } => {
                probability("p", p)?;
                probability("q", q)?;
                let s = p + q;
                if !(s > 0.0 && s < 2.0) {
                    return Err(StochasticError::Parameter { name: "p + q", reason: format!("{s} is not in (0, 2)") });
                }
                Ok(())
            }
            AnalyticModel::RandomTiling { u, v, p } => {
                probability("p", p)?;
                for (name, x) in [("u", u), ("v", v)] {
                    if !(x > 0.0 && x.is_finite()) {
                        return Err(StochasticError::Parameter { name, reason: format!("tile length {x} must be positive") });
                    }
                }
                Ok(())
            }
        }
    }

    /// True when the support is a subset of the integers, so Bragg peaks sit at integer k.
    pub fn is_lattice(&self) -> bool {
        matches!(self, AnalyticModel::Bernoulli { .. } | AnalyticModel::Markov { .. } | AnalyticModel::RudinShapiro { .. })
    }

    /// Markov r = p + q − 1.
    pub fn markov_r(&self) -> Option<f64> {
        match *self {
            AnalyticModel::Markov { p, q } => Some(p + q - 1.0),
            _ => None,
        }
    }

    /// Markov stationary occupation ρ = (1 − p)/(2 − p − q).
    pub fn markov_rho(&self) -> Option<f64> {
        match *self {
            AnalyticModel::Markov { p, q } => Some((1.0 - p) / (2.0 - p - q)),
            _ => None,
        }
    }
}

impl fmt::Display for AnalyticModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AnalyticModel::Poisson => write!(f, "poisson"),
            AnalyticModel::Bernoulli { p, weighting: Weighting::ZeroOne } => write!(f, "bernoulli(p={p})"),
            AnalyticModel::Bernoulli { p, weighting: Weighting::PlusMinus } => write!(f, "bernoulli-pm(p={p})"),
            AnalyticModel::Rmt { beta } => write!(f, "rmt(beta={beta})"),
            AnalyticModel::Markov { p, q } => write!(f, "markov(p={p},q={q})"),
            AnalyticModel::RandomTiling { u, v, p } => write!(f, "random-tiling(u={u},v={v},p={p})"),
            AnalyticModel::RudinShapiro { p } => write!(f, "rudin-shapiro(p={p})"),
        }
    }
}

/// Absolutely continuous diffraction density of the Markov lattice gas.
pub fn markov_density(p: f64, q: f64, k: f64) -> Result<f64, StochasticError> {
    AnalyticModel::Markov { p, q }.validate()?;
    Ok(markov_g(p, q, k))
}

fn markov_g(p: f64, q: f64, k: f64) -> f64 {
    let r = p + q - 1.0;
    (1.0 - p) * (1.0 - q) * (1.0 + r) / ((1.0 - r) * (1.0 - 2.0 * r * (2.0 * PI * k).cos() + r * r))
}

/// Structure-factor density of the β-ensembles at unit density.
pub fn rmt_density(beta: u8, k: f64) -> Result<f64, StochasticError> {
    AnalyticModel::Rmt { beta }.validate()?;
    if !(k >= 0.0) {
        return Err(StochasticError::Domain { what: "k", value: k });
    }
    Ok(rmt_g(beta, k))
}

fn rmt_g(beta: u8, k: f64) -> f64 {
    match beta {
        1 if k <= 1.0 => 2.0 * k - k * (2.0 * k).ln_1p(),
        1 => 2.0 - k * ((2.0 * k + 1.0) / (2.0 * k - 1.0)).ln(),
        2 => k.min(1.0),
        _ if k <= 2.0 => 0.5 * k - 0.25 * k * (1.0 - k).abs().ln(),
        _ => 1.0,
    }
}

const QUAD_ABS: f64 = 1e-15;
const QUAD_REL: f64 = 1e-13;

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, k: f64) -> Result<f64, StochasticError> {
    integrate_adaptive(f, a, b, QUAD_ABS, QUAD_REL).ok_or(StochasticError::Quadrature(k))
}

/// Z(k), the absolutely continuous diffraction mass in (0, k]. Lattice models need k < 1.
pub fn z_analytic(model: &AnalyticModel, k: f64) -> Result<f64, StochasticError> {
    model.validate()?;
    if !(k > 0.0 && k.is_finite()) || (model.is_lattice() && k >= 1.0) {
        return Err(StochasticError::Domain { what: "k", value: k });
    }
    match *model {
        AnalyticModel::Poisson | AnalyticModel::RudinShapiro { .. } => Ok(k),
        AnalyticModel::Bernoulli { p, weighting: Weighting::ZeroOne } => Ok(p * (1.0 - p) * k),
        AnalyticModel::Bernoulli { p, weighting: Weighting::PlusMinus } => Ok(4.0 * p * (1.0 - p) * k),
        AnalyticModel::Markov { p, q } => {
            if (p + q - 1.0).abs() < f64::EPSILON {
                return Ok((1.0 - p) * (1.0 - q) * k);
            }
            integrate(|x| markov_g(p, q, x), 0.0, k, k)
        }
        AnalyticModel::Rmt { beta } => {
            // Split at the kinks so each piece is smooth apart from an endpoint log.
            let mut total = integrate(|x| rmt_g(beta, x), 0.0, k.min(1.0), k)?;
            if k > 1.0 {
                total += integrate(|x| rmt_g(beta, x), 1.0, k.min(2.0), k)?;
            }
            if k > 2.0 {
                total += integrate(|x| rmt_g(beta, x), 2.0, k, k)?;
            }
            Ok(total)
        }
        AnalyticModel::RandomTiling { u, v, p } => {
            let q = 1.0 - p;
            let spread = p * q * (u - v).powi(2);
            if spread == 0.0 {
                return Ok(0.0);
            }
            let second = p * u * u + q * v * v;
            let cubic = PI * PI / 9.0 * (u * u * v * v - 2.0 * u * v * second) / (spread - second);
            Ok(spread / (p * u + q * v).powi(3) * (k + cubic * k.powi(3)))
        }
    }
}

/// Analytic Z sampled on a k grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticCurve {
    pub model: String,
    pub samples: Vec<(f64, f64)>,
}

impl AnalyticCurve {
    pub fn new(model: &AnalyticModel, ks: &[f64]) -> Result<Self, StochasticError> {
        let samples = ks.iter().map(|&k| Ok((k, z_analytic(model, k)?))).collect::<Result<_, StochasticError>>()?;
        Ok(Self { model: model.to_string(), samples })
    }

    /// CSV with header `k,Z,model`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), csv::Error> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["k", "Z", "model"])?;
        for &(k, z) in &self.samples {
            wr.write_record([fmt_real(k), fmt_real(z), self.model.clone()])?;
        }
        wr.flush()?;
        Ok(())
    }
}
